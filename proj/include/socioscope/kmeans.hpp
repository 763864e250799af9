#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "socioscope/common.hpp"

namespace socioscope {

using Point = std::vector<double>;

inline double squared_distance(const Point& a, const Point& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

struct KMeansResult {
  std::vector<int> labels;
  std::vector<Point> centers;
  double inertia = 0;              // within-cluster sum of squared distances
  std::vector<double> objective;   // inertia after each iteration of the winning restart
};

namespace detail {

inline std::vector<Point> kmeanspp_seed(const std::vector<Point>& pts, int k, Rng& rng) {
  std::vector<Point> centers{pts[uniform_index(rng, pts.size())]};
  std::vector<double> d2(pts.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(centers.size()) < k) {
    double total = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      d2[i] = std::min(d2[i], squared_distance(pts[i], centers.back()));
      total += d2[i];
    }
    if (total <= 0) {
      centers.push_back(pts[uniform_index(rng, pts.size())]);
      continue;
    }
    double x = std::uniform_real_distribution<double>(0, total)(rng);
    std::size_t pick = pts.size() - 1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      x -= d2[i];
      if (x < 0) {
        pick = i;
        break;
      }
    }
    centers.push_back(pts[pick]);
  }
  return centers;
}

inline KMeansResult lloyd(const std::vector<Point>& pts, std::vector<Point> centers, int max_iter) {
  const std::size_t n = pts.size(), dim = pts.front().size();
  const std::size_t k = centers.size();
  KMeansResult r;
  r.labels.assign(n, -1);
  for (int it = 0; it < max_iter; ++it) {
    bool changed = false;
    double inertia = 0;
    for (std::size_t i = 0; i < n; ++i) {
      int best = 0;
      double bd = squared_distance(pts[i], centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        double d = squared_distance(pts[i], centers[c]);
        if (d < bd) {
          bd = d;
          best = static_cast<int>(c);
        }
      }
      inertia += bd;
      if (r.labels[i] != best) {
        r.labels[i] = best;
        changed = true;
      }
    }
    r.objective.push_back(inertia);
    r.inertia = inertia;
    if (!changed && it > 0) break;
    std::vector<Point> sums(k, Point(dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      auto c = static_cast<std::size_t>(r.labels[i]);
      ++counts[c];
      for (std::size_t d = 0; d < dim; ++d) sums[c][d] += pts[i][d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (!counts[c]) continue;  // empty cluster keeps its center
      for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
  }
  r.centers = std::move(centers);
  return r;
}

}  // namespace detail

/// Lloyd's algorithm from k-means++ seeds; the restart with the lowest inertia wins.
inline KMeansResult kmeans(const std::vector<Point>& pts, int k, Rng& rng, int restarts = 10, int max_iter = 300) {
  if (k < 1 || static_cast<std::size_t>(k) > pts.size()) throw Error("k-means needs 1 <= k <= number of points");
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < std::max(1, restarts); ++r) {
    auto res = detail::lloyd(pts, detail::kmeanspp_seed(pts, k, rng), max_iter);
    if (res.inertia < best.inertia) best = std::move(res);
  }
  return best;
}

/// Mean over clusters of the worst (S_i + S_j) / M_ij; NaN when two centers coincide.
inline double davies_bouldin(const std::vector<Point>& pts, const KMeansResult& r) {
  const std::size_t k = r.centers.size();
  std::vector<double> scatter(k, 0);
  std::vector<std::size_t> counts(k, 0);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    auto c = static_cast<std::size_t>(r.labels[i]);
    scatter[c] += std::sqrt(squared_distance(pts[i], r.centers[c]));
    ++counts[c];
  }
  for (std::size_t c = 0; c < k; ++c) scatter[c] = counts[c] ? scatter[c] / static_cast<double>(counts[c]) : 0;
  double total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    double worst = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double m = std::sqrt(squared_distance(r.centers[i], r.centers[j]));
      if (m == 0) return kMissing;
      worst = std::max(worst, (scatter[i] + scatter[j]) / m);
    }
    total += worst;
  }
  return total / static_cast<double>(k);
}

/// Variance ratio (B / (k - 1)) / (W / (n - k)); NaN when W = 0.
inline double calinski_harabasz(const std::vector<Point>& pts, const KMeansResult& r) {
  const std::size_t n = pts.size(), k = r.centers.size(), dim = pts.front().size();
  if (k < 2 || n <= k) return kMissing;
  Point mean(dim, 0.0);
  for (const auto& p : pts)
    for (std::size_t d = 0; d < dim; ++d) mean[d] += p[d] / static_cast<double>(n);
  std::vector<std::size_t> counts(k, 0);
  for (int l : r.labels) ++counts[static_cast<std::size_t>(l)];
  double between = 0;
  for (std::size_t c = 0; c < k; ++c) between += static_cast<double>(counts[c]) * squared_distance(r.centers[c], mean);
  if (r.inertia <= 0) return kMissing;
  return (between / static_cast<double>(k - 1)) / (r.inertia / static_cast<double>(n - k));
}

struct ClusterCriteria {
  int k = 0;
  double inertia = kMissing;
  double davies_bouldin = kMissing;
  double calinski_harabasz = kMissing;
  double gap = kMissing;
  double gap_se = kMissing;  // s_k
};

struct ClusterSelection {
  std::vector<ClusterCriteria> table;
  std::optional<int> best_db, best_ch, best_gap;
  std::vector<std::vector<int>> labels;  // per row of `table`
  std::vector<std::string> diagnostics;

  const std::vector<int>* labels_for(int k) const {
    for (std::size_t i = 0; i < table.size(); ++i)
      if (table[i].k == k) return &labels[i];
    return nullptr;
  }
};

struct KMeansOptions {
  int k_min = 2;
  int k_max = 25;
  int restarts = 10;
  int gap_references = 20;
  int gap_restarts = 3;
  std::uint64_t seed = 42;
};

/// Column-wise z-scores; constant columns become zero.
inline std::vector<Point> standardize(std::vector<Point> pts) {
  if (pts.empty()) return pts;
  const std::size_t dim = pts.front().size();
  for (std::size_t d = 0; d < dim; ++d) {
    double mean = 0, var = 0;
    for (const auto& p : pts) mean += p[d];
    mean /= static_cast<double>(pts.size());
    for (const auto& p : pts) var += (p[d] - mean) * (p[d] - mean);
    const double sd = pts.size() > 1 ? std::sqrt(var / static_cast<double>(pts.size() - 1)) : 0.0;
    for (auto& p : pts) p[d] = sd > 0 ? (p[d] - mean) / sd : 0.0;
  }
  return pts;
}

/// k-means for every k in range, with Davies-Bouldin (min), Calinski-Harabasz (max) and the
/// Gap statistic (smallest k with Gap(k) >= Gap(k+1) - s_{k+1}, uniform box reference).
inline ClusterSelection kmeans_with_selection(const std::vector<Point>& pts, const KMeansOptions& opt) {
  ClusterSelection sel;
  if (pts.empty()) {
    sel.diagnostics.push_back("no points to cluster");
    return sel;
  }
  const std::size_t dim = pts.front().size();
  Point lo = pts.front(), hi = pts.front();
  for (const auto& p : pts)
    for (std::size_t d = 0; d < dim; ++d) {
      lo[d] = std::min(lo[d], p[d]);
      hi[d] = std::max(hi[d], p[d]);
    }

  for (int k = opt.k_min; k <= opt.k_max; ++k) {
    if (static_cast<std::size_t>(k) > pts.size()) {
      sel.diagnostics.push_back("k=" + std::to_string(k) + " skipped: fewer points than clusters");
      continue;
    }
    Rng rng(derive_seed(opt.seed, "kmeans", static_cast<std::uint64_t>(k)));
    auto r = kmeans(pts, k, rng, opt.restarts);
    ClusterCriteria c;
    c.k = k;
    c.inertia = r.inertia;
    c.davies_bouldin = davies_bouldin(pts, r);
    c.calinski_harabasz = calinski_harabasz(pts, r);
    if (is_missing(c.davies_bouldin)) sel.diagnostics.push_back("k=" + std::to_string(k) + ": Davies-Bouldin undefined");
    if (is_missing(c.calinski_harabasz))
      sel.diagnostics.push_back("k=" + std::to_string(k) + ": Calinski-Harabasz undefined");

    if (r.inertia > 0 && opt.gap_references > 0) {
      std::vector<double> logs;
      Rng ref_rng(derive_seed(opt.seed, "gap", static_cast<std::uint64_t>(k)));
      for (int b = 0; b < opt.gap_references; ++b) {
        std::vector<Point> ref(pts.size(), Point(dim));
        for (auto& p : ref)
          for (std::size_t d = 0; d < dim; ++d) p[d] = std::uniform_real_distribution<double>(lo[d], hi[d])(ref_rng);
        auto rr = kmeans(ref, k, ref_rng, opt.gap_restarts);
        logs.push_back(std::log(std::max(rr.inertia, std::numeric_limits<double>::min())));
      }
      const double B = static_cast<double>(logs.size());
      const double mean = std::accumulate(logs.begin(), logs.end(), 0.0) / B;
      double var = 0;
      for (double v : logs) var += (v - mean) * (v - mean);
      c.gap = mean - std::log(r.inertia);
      c.gap_se = std::sqrt(var / B) * std::sqrt(1.0 + 1.0 / B);
    } else if (r.inertia <= 0) {
      sel.diagnostics.push_back("k=" + std::to_string(k) + ": Gap undefined (zero dispersion)");
    }
    sel.table.push_back(c);
    sel.labels.push_back(std::move(r.labels));
  }

  for (const auto& c : sel.table) {
    if (!is_missing(c.davies_bouldin) &&
        (!sel.best_db || c.davies_bouldin < sel.table[static_cast<std::size_t>(*sel.best_db)].davies_bouldin))
      sel.best_db = static_cast<int>(&c - sel.table.data());
    if (!is_missing(c.calinski_harabasz) &&
        (!sel.best_ch || c.calinski_harabasz > sel.table[static_cast<std::size_t>(*sel.best_ch)].calinski_harabasz))
      sel.best_ch = static_cast<int>(&c - sel.table.data());
  }
  for (std::size_t i = 0; i + 1 < sel.table.size(); ++i) {
    const auto &a = sel.table[i], &b = sel.table[i + 1];
    if (is_missing(a.gap) || is_missing(b.gap) || b.k != a.k + 1) continue;
    if (a.gap >= b.gap - b.gap_se) {
      sel.best_gap = static_cast<int>(i);
      break;
    }
  }
  // row indices -> k values
  if (sel.best_db) sel.best_db = sel.table[static_cast<std::size_t>(*sel.best_db)].k;
  if (sel.best_ch) sel.best_ch = sel.table[static_cast<std::size_t>(*sel.best_ch)].k;
  if (sel.best_gap) sel.best_gap = sel.table[static_cast<std::size_t>(*sel.best_gap)].k;
  if (!sel.best_gap) sel.diagnostics.push_back("Gap rule found no k in range");
  return sel;
}

}  // namespace socioscope
