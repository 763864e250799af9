#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/kmeans.hpp"
#include "socioscope/louvain.hpp"
#include "socioscope/socio.hpp"

namespace socioscope {

// ---------------------------------------------------------------------------
// Per-user category fractions r(c, u)

/// Sparse r(c, u) over the retained merchant categories. Rows cover every user in V,
/// including users with no retained spend (empty rows).
struct CategorySpendTable {
  std::vector<int> categories;  // retained MCCs, ascending
  std::vector<UserId> users;
  std::vector<std::vector<std::pair<std::uint32_t, double>>> rows;  // (category index, r), sorted by index
  std::vector<std::size_t> purchasers;                               // users with r > 0, per category
  std::vector<std::size_t> purchases;                                // transactions, per category
  std::vector<std::string> diagnostics;

  std::optional<std::size_t> index_of(int mcc) const {
    auto it = std::lower_bound(categories.begin(), categories.end(), mcc);
    if (it == categories.end() || *it != mcc) return std::nullopt;
    return static_cast<std::size_t>(it - categories.begin());
  }
};

/// Builds the table over non-cash directory categories with at least min_purchases purchases.
inline CategorySpendTable category_spend_table(const Profiles& profiles, const CategoryDirectory& directory,
                                               std::size_t min_purchases = 100) {
  std::map<int, std::size_t> counts;
  for (const auto& [id, p] : profiles)
    for (const auto& [mcc, n] : p.category_count) counts[mcc] += static_cast<std::size_t>(n);

  CategorySpendTable t;
  std::size_t dropped = 0;
  for (int mcc : directory.mccs()) {
    if (directory.is_cash(mcc)) continue;
    auto it = counts.find(mcc);
    const std::size_t n = it == counts.end() ? 0 : it->second;
    if (n < min_purchases) {
      ++dropped;
      continue;
    }
    t.categories.push_back(mcc);
    t.purchases.push_back(n);
  }
  if (dropped) t.diagnostics.push_back(std::to_string(dropped) + " categories below " + std::to_string(min_purchases) + " purchases dropped");
  t.purchasers.assign(t.categories.size(), 0);

  for (const auto& [id, p] : profiles) {
    std::vector<std::pair<std::uint32_t, double>> row;
    Cents total = 0;
    for (const auto& [mcc, amount] : p.category_spend) {
      auto idx = t.index_of(mcc);
      if (!idx || amount <= 0) continue;
      total += amount;
      row.emplace_back(static_cast<std::uint32_t>(*idx), static_cast<double>(amount));
    }
    for (auto& [c, v] : row) {
      v /= static_cast<double>(total);
      ++t.purchasers[c];
    }
    std::sort(row.begin(), row.end());
    t.users.push_back(id);
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Category-pair correlation

enum class CorrelationMean {
  AllUsers,    // <r(c, .)> over every user in V
  Purchasers,  // <r(c, .)> over users with r(c, u) > 0
};

struct CategoryCorrelation {
  std::vector<int> categories;             // categories kept in the matrix
  std::vector<double> rho;                 // dense, row-major, size^2
  std::vector<std::size_t> co_purchasers;  // users with r > 0 on both, row-major
  std::vector<std::string> diagnostics;

  std::size_t size() const { return categories.size(); }
  double operator()(std::size_t i, std::size_t j) const { return rho[i * size() + j]; }
  std::size_t support(std::size_t i, std::size_t j) const { return co_purchasers[i * size() + j]; }
};

/// rho(c_i, c_j) = < r(c_i,u) r(c_j,u) >_V / (<r(c_i,.)> <r(c_j,.)>), from sparse pair sums.
inline CategoryCorrelation category_correlation(const CategorySpendTable& t,
                                                CorrelationMean mode = CorrelationMean::AllUsers) {
  const std::size_t C = t.categories.size();
  const std::size_t V = t.users.size();
  if (C < 2) throw Error("category correlation needs at least two retained categories");
  if (V == 0) throw Error("category correlation needs at least one user");

  std::vector<long double> mean(C, 0);
  for (const auto& row : t.rows)
    for (auto [c, r] : row) mean[c] += r;
  for (std::size_t c = 0; c < C; ++c) {
    const std::size_t denom = mode == CorrelationMean::AllUsers ? V : t.purchasers[c];
    mean[c] = denom ? mean[c] / static_cast<long double>(denom) : 0;
  }

  // fixed sharding keeps the summation order independent of the thread count
  const std::size_t shards = std::min<std::size_t>(64, V);
  std::vector<std::vector<long double>> part_sum(shards);
  std::vector<std::vector<std::size_t>> part_cnt(shards);
  parallel_for(shards, [&](std::size_t s) {
    auto& sum = part_sum[s];
    auto& cnt = part_cnt[s];
    sum.assign(C * C, 0);
    cnt.assign(C * C, 0);
    for (std::size_t u = s * V / shards; u < (s + 1) * V / shards; ++u) {
      const auto& row = t.rows[u];
      for (std::size_t a = 0; a < row.size(); ++a)
        for (std::size_t b = a; b < row.size(); ++b) {
          const std::size_t i = row[a].first, j = row[b].first;
          sum[i * C + j] += static_cast<long double>(row[a].second) * row[b].second;
          ++cnt[i * C + j];
        }
    }
  });
  std::vector<long double> sum(C * C, 0);
  std::vector<std::size_t> cnt(C * C, 0);
  for (std::size_t s = 0; s < shards; ++s)
    for (std::size_t x = 0; x < C * C; ++x) {
      sum[x] += part_sum[s][x];
      cnt[x] += part_cnt[s][x];
    }

  CategoryCorrelation out;
  std::vector<std::size_t> keep;
  for (std::size_t c = 0; c < C; ++c) {
    if (mean[c] > 0) {
      keep.push_back(c);
    } else {
      out.diagnostics.push_back("category " + std::to_string(t.categories[c]) + " has zero mean spend, excluded");
    }
  }
  const std::size_t K = keep.size();
  out.categories.reserve(K);
  for (std::size_t c : keep) out.categories.push_back(t.categories[c]);
  out.rho.assign(K * K, 0);
  out.co_purchasers.assign(K * K, 0);
  for (std::size_t a = 0; a < K; ++a)
    for (std::size_t b = a; b < K; ++b) {
      const std::size_t i = keep[a], j = keep[b];
      const long double v = sum[i * C + j] / static_cast<long double>(V) / (mean[i] * mean[j]);
      out.rho[a * K + b] = out.rho[b * K + a] = static_cast<double>(v);
      out.co_purchasers[a * K + b] = out.co_purchasers[b * K + a] = cnt[i * C + j];
    }
  return out;
}

struct CategoryGraph {
  std::vector<int> nodes;  // MCCs with at least one kept edge, ascending
  WeightedGraph graph;     // node indices into `nodes`, weights are rho
  std::vector<std::size_t> support;  // co-purchasers per edge
};

/// Keeps pairs with rho >= rho_min and at least support_min co-purchasers; isolated nodes dropped.
inline CategoryGraph threshold_graph(const CategoryCorrelation& m, double rho_min = 1.5,
                                     std::size_t support_min = 1000) {
  if (!(rho_min > 0)) throw Error("rho threshold must be positive");
  const std::size_t K = m.size();
  std::vector<std::tuple<std::size_t, std::size_t, double, std::size_t>> kept;
  std::vector<char> used(K, 0);
  for (std::size_t i = 0; i < K; ++i)
    for (std::size_t j = i + 1; j < K; ++j)
      if (m(i, j) >= rho_min && m.support(i, j) >= support_min) {
        kept.emplace_back(i, j, m(i, j), m.support(i, j));
        used[i] = used[j] = 1;
      }
  CategoryGraph g;
  std::vector<std::uint32_t> remap(K, 0);
  for (std::size_t i = 0; i < K; ++i)
    if (used[i]) {
      remap[i] = static_cast<std::uint32_t>(g.nodes.size());
      g.nodes.push_back(m.categories[i]);
    }
  g.graph.n = g.nodes.size();
  for (auto [i, j, w, s] : kept) {
    g.graph.edges.push_back({remap[i], remap[j], w});
    g.support.push_back(s);
  }
  return g;
}

// ---------------------------------------------------------------------------
// Average feature sets

enum class Feature { Age = 0, Gender = 1, Seg = 2 };
inline constexpr std::size_t kFeatureCount = 3;

enum class AfsMode {
  PerUser,   // sum_u r(c,u) v_u / sum_u r(c,u)
  PerValue,  // alpha(v) = mean r(c,u) over purchasers with value v; sum_v alpha(v) v / sum_v alpha(v)
};

struct FeatureSet {
  int mcc = 0;
  std::array<double, kFeatureCount> value{kMissing, kMissing, kMissing};  // age, gender, SEG
  std::array<double, kFeatureCount> num{};  // weighted sum, kept so sets can be pooled
  std::array<double, kFeatureCount> den{};
  int cluster = -1;

  double age() const { return value[0]; }
  double gender() const { return value[1]; }
  double seg() const { return value[2]; }
  bool complete() const { return std::none_of(value.begin(), value.end(), [](double v) { return is_missing(v); }); }
};

/// AFS(c) for every category in the table. Users contribute to a feature only when it is known.
inline std::vector<FeatureSet> average_feature_set(const CategorySpendTable& t, const Profiles& profiles,
                                                   const ClassPartition& partition,
                                                   AfsMode mode = AfsMode::PerUser) {
  const std::size_t C = t.categories.size();
  // per category and feature: value -> (sum r, purchasers)
  std::vector<std::array<std::map<int, std::pair<long double, std::size_t>>, kFeatureCount>> acc(C);
  for (std::size_t u = 0; u < t.users.size(); ++u) {
    const auto& id = t.users[u];
    std::array<std::optional<int>, kFeatureCount> f;
    if (auto it = profiles.find(id); it != profiles.end()) {
      f[0] = it->second.age;
      f[1] = it->second.gender;
    }
    f[2] = partition.class_of(id);
    for (auto [c, r] : t.rows[u]) {
      for (std::size_t k = 0; k < kFeatureCount; ++k) {
        if (!f[k]) continue;
        auto& cell = acc[c][k][*f[k]];
        cell.first += r;
        ++cell.second;
      }
    }
  }
  std::vector<FeatureSet> out(C);
  for (std::size_t c = 0; c < C; ++c) {
    out[c].mcc = t.categories[c];
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      long double num = 0, den = 0;
      for (const auto& [v, cell] : acc[c][k]) {
        const long double w = mode == AfsMode::PerUser ? cell.first : cell.first / cell.second;
        num += w * v;
        den += w;
      }
      out[c].num[k] = static_cast<double>(num);
      out[c].den[k] = static_cast<double>(den);
      if (den > 0) out[c].value[k] = static_cast<double>(num / den);
    }
  }
  return out;
}

/// Pools the per-category sums of each community's categories.
inline std::vector<FeatureSet> community_feature_sets(const std::vector<FeatureSet>& features,
                                                      const std::vector<int>& community_nodes,
                                                      const CommunityResult& communities) {
  std::vector<FeatureSet> out(static_cast<std::size_t>(communities.count));
  for (std::size_t c = 0; c < out.size(); ++c) out[c].mcc = -1;
  std::map<int, const FeatureSet*> by_mcc;
  for (const auto& f : features) by_mcc[f.mcc] = &f;
  for (std::size_t i = 0; i < community_nodes.size(); ++i) {
    auto it = by_mcc.find(community_nodes[i]);
    if (it == by_mcc.end()) continue;
    auto& pool = out[static_cast<std::size_t>(communities.labels[i])];
    for (std::size_t k = 0; k < kFeatureCount; ++k) {
      pool.num[k] += it->second->num[k];
      pool.den[k] += it->second->den[k];
    }
  }
  for (std::size_t c = 0; c < out.size(); ++c) {
    out[c].cluster = static_cast<int>(c);
    for (std::size_t k = 0; k < kFeatureCount; ++k)
      if (out[c].den[k] > 0) out[c].value[k] = out[c].num[k] / out[c].den[k];
  }
  return out;
}

/// Feature triplets of complete categories, in input order, with their positions.
inline std::vector<Point> feature_points(const std::vector<FeatureSet>& features, std::vector<std::size_t>* index) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (!features[i].complete()) continue;
    pts.push_back({features[i].age(), features[i].gender(), features[i].seg()});
    if (index) index->push_back(i);
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Pearson correlation

struct PearsonResult {
  double r = kMissing;
  double p_value = kMissing;
  std::size_t n = 0;
  bool defined() const { return !is_missing(r); }
};

/// Pearson r with a two-sided p-value from Student's t on n - 2 degrees of freedom.
inline PearsonResult pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw Error("pearson needs samples of equal length");
  PearsonResult out;
  out.n = x.size();
  if (out.n < 3) return out;
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= out.n;
  my /= out.n;
  long double sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0 || syy <= 0) return out;
  double r = static_cast<double>(sxy / std::sqrt(sxx * syy));
  r = std::clamp(r, -1.0, 1.0);
  out.r = r;
  const double dof = static_cast<double>(out.n - 2);
  if (std::abs(r) >= 1.0) {
    out.p_value = 0.0;
  } else {
    const double tstat = r * std::sqrt(dof / (1.0 - r * r));
    boost::math::students_t dist(dof);
    out.p_value = 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(tstat)));
  }
  return out;
}

struct FeatureCorrelation {
  std::string pair;
  PearsonResult result;
};

/// (age, SEG), (gender, SEG), (age, gender) over categories with complete features.
inline std::vector<FeatureCorrelation> feature_correlations(const std::vector<FeatureSet>& features) {
  std::array<std::vector<double>, kFeatureCount> cols;
  for (const auto& f : features) {
    if (!f.complete()) continue;
    for (std::size_t k = 0; k < kFeatureCount; ++k) cols[k].push_back(f.value[k]);
  }
  return {{"age,seg", pearson(cols[0], cols[2])},
          {"gender,seg", pearson(cols[1], cols[2])},
          {"age,gender", pearson(cols[0], cols[1])}};
}

// ---------------------------------------------------------------------------
// Writers

inline void write_correlation_matrix(std::ostream& out, const CategoryCorrelation& m) {
  out << "mcc";
  for (int c : m.categories) out << ',' << c;
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << m.categories[i];
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << csv::format(m(i, j));
    out << '\n';
  }
}

inline void write_category_edges(std::ostream& out, const CategoryGraph& g) {
  out << "source,target,rho,support\n";
  for (std::size_t e = 0; e < g.graph.edges.size(); ++e) {
    const auto& x = g.graph.edges[e];
    out << g.nodes[x.u] << ',' << g.nodes[x.v] << ',' << csv::format(x.w) << ',' << g.support[e] << '\n';
  }
}

inline void write_communities(std::ostream& out, const CategoryGraph& g, const CommunityResult& c,
                              const CategoryDirectory& directory) {
  out << "mcc,name,community\n";
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    const int mcc = g.nodes[i];
    out << mcc << ',' << csv::escape(directory.contains(mcc) ? directory.mcc_name(mcc) : "") << ','
        << c.labels[i] << '\n';
  }
}

inline void write_feature_sets(std::ostream& out, const std::vector<FeatureSet>& f, const CategoryDirectory& directory) {
  out << "mcc,name,age,gender,seg,cluster\n";
  for (const auto& x : f) {
    out << x.mcc << ',' << csv::escape(directory.contains(x.mcc) ? directory.mcc_name(x.mcc) : "") << ','
        << csv::format(x.age()) << ',' << csv::format(x.gender()) << ',' << csv::format(x.seg()) << ','
        << x.cluster << '\n';
  }
}

inline void write_cluster_criteria(std::ostream& out, const ClusterSelection& s) {
  out << "k,inertia,davies_bouldin,calinski_harabasz,gap,gap_se\n";
  for (const auto& c : s.table) {
    out << c.k << ',' << csv::format(c.inertia) << ',' << csv::format(c.davies_bouldin) << ','
        << csv::format(c.calinski_harabasz) << ',' << csv::format(c.gap) << ',' << csv::format(c.gap_se) << '\n';
  }
}

}  // namespace socioscope
