#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "socioscope/class_matrix.hpp"
#include "socioscope/common.hpp"
#include "socioscope/dynamics.hpp"
#include "socioscope/graph.hpp"
#include "socioscope/socio.hpp"
#include "socioscope/spending.hpp"

namespace socioscope {

// ---------------------------------------------------------------------------
// Degree-preserving rewiring

struct RewirePlan {
  std::optional<std::size_t> swap_attempts;  // unset: swaps_factor * |E|
  double swaps_factor = 5.0;
  std::size_t ensemble_size = 100;
  std::uint64_t seed = 42;
  bool verify_members = false;  // check degrees and simplicity of every member

  std::size_t attempts_for(std::size_t edges) const {
    if (swap_attempts) return *swap_attempts;
    return static_cast<std::size_t>(std::llround(swaps_factor * static_cast<double>(edges)));
  }

  void validate() const {
    if (swap_attempts && *swap_attempts < 1) throw Error("swap_attempts must be at least 1");
    if (!swap_attempts && !(swaps_factor > 0)) throw Error("swaps factor must be positive");
    if (ensemble_size < 1) throw Error("ensemble size must be at least 1");
  }
};

struct RewireStats {
  std::size_t attempts = 0;
  std::size_t accepted = 0;
  std::string warning;
};

/// Double edge swaps in place: pick two distinct edges (a,b), (c,d), orient the second at
/// random and propose (a,d), (c,b). Proposals that would create a self-loop or a repeated
/// edge are rejected; every proposal consumes one attempt.
inline RewireStats rewire_edges(std::vector<Edge>& edges, std::size_t attempts, Rng& rng) {
  RewireStats stats;
  const std::size_t m = edges.size();
  if (m < 2) {
    stats.warning = "graph has fewer than 2 edges, left unchanged";
    return stats;
  }
  std::unordered_set<std::uint64_t> present;
  present.reserve(2 * m);
  for (const Edge& e : edges) present.insert(edge_key(e.u, e.v));

  std::uniform_int_distribution<std::size_t> pick_first(0, m - 1), pick_second(0, m - 2);
  for (std::size_t t = 0; t < attempts; ++t) {
    ++stats.attempts;
    const std::size_t i = pick_first(rng);
    std::size_t j = pick_second(rng);
    if (j >= i) ++j;
    Node a = edges[i].u, b = edges[i].v, c = edges[j].u, d = edges[j].v;
    if (rng() & 1) std::swap(c, d);
    if (a == d || c == b) continue;
    const auto k1 = edge_key(a, d), k2 = edge_key(c, b);
    if (k1 == k2 || present.count(k1) || present.count(k2)) continue;
    present.erase(edge_key(a, b));
    present.erase(edge_key(c, d));
    present.insert(k1);
    present.insert(k2);
    edges[i] = make_edge(a, d);
    edges[j] = make_edge(c, b);
    ++stats.accepted;
  }
  return stats;
}

/// One configuration-model sample of g, seeded by plan.seed.
inline SocialGraph rewire(const SocialGraph& g, const RewirePlan& plan, RewireStats* stats = nullptr) {
  plan.validate();
  std::vector<Edge> edges(g.edges().begin(), g.edges().end());
  Rng rng(derive_seed(plan.seed, "rewire"));
  auto s = rewire_edges(edges, plan.attempts_for(edges.size()), rng);
  if (stats) *stats = s;
  return g.with_edges(std::move(edges));
}

/// Throws unless `edges` is simple and has exactly the given degree sequence.
inline void check_degree_preserving(std::span<const Edge> edges, const std::vector<std::size_t>& degrees) {
  std::vector<std::size_t> d(degrees.size(), 0);
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(2 * edges.size());
  for (const Edge& e : edges) {
    if (e.u == e.v) throw Error("rewired graph has a self-loop");
    if (!seen.insert(edge_key(e.u, e.v)).second) throw Error("rewired graph has a repeated edge");
    ++d[e.u];
    ++d[e.v];
  }
  if (d != degrees) throw Error("rewired graph changed the degree sequence");
}

// ---------------------------------------------------------------------------
// Per-node data aligned with graph nodes

/// Dense per-node vectors and class labels. Class 0 or a missing vector marks the node unusable.
struct NodeData {
  std::size_t dim = 0;
  int n_classes = 0;
  std::vector<double> values;  // node-major
  std::vector<int> cls;        // 1-based; 0 when unusable
  std::size_t unusable = 0;

  const double* row(Node n) const { return values.data() + static_cast<std::size_t>(n) * dim; }
  bool usable(Node n) const { return cls[n] != 0; }
};

/// fill(id, out) writes `dim` values and returns false when the user has no vector.
template <class Fill>
NodeData align_nodes(const SocialGraph& g, const ClassPartition* partition, std::size_t dim, Fill fill) {
  NodeData nd;
  nd.dim = dim;
  nd.n_classes = partition ? partition->n_classes() : 1;
  nd.values.assign(g.node_count() * dim, 0.0);
  nd.cls.assign(g.node_count(), 0);
  for (Node n = 0; n < g.node_count(); ++n) {
    int c = 1;
    if (partition) {
      auto k = partition->class_of(g.id(n));
      c = k ? *k : 0;
    }
    if (c != 0 && fill(g.id(n), nd.values.data() + static_cast<std::size_t>(n) * dim)) {
      nd.cls[n] = c;
    } else {
      ++nd.unusable;
    }
  }
  return nd;
}

inline NodeData node_data(const SocialGraph& g, const SpendingVectors& sv, const ClassPartition* partition,
                          Subset subset) {
  return align_nodes(g, partition, subset_dim(subset), [&](const UserId& id, double* out) {
    auto it = sv.vectors.find(id);
    if (it == sv.vectors.end()) return false;
    subset_values(it->second, subset, out);
    return true;
  });
}

inline NodeData node_data(const SocialGraph& g, const WeeklyVectors& wv, const ClassPartition* partition) {
  return align_nodes(g, partition, kDaysPerWeek, [&](const UserId& id, double* out) {
    auto it = wv.find(id);
    if (it == wv.end()) return false;
    std::copy(it->second.values.begin(), it->second.values.end(), out);
    return true;
  });
}

// ---------------------------------------------------------------------------
// Edge statistics per class pair

/// How an edge compares its two endpoint vectors.
enum class EdgeMetric {
  ComponentAbsDiff,  // |x_k(u) - x_k(v)| for every component k
  Euclidean,         // one value, ||x(u) - x(v)||_2
};

/// Sums per unordered class pair (i <= j) and component, plus edge counts.
struct CellStats {
  int n = 0;
  std::size_t comps = 0;
  std::vector<double> sums;          // [(cell) * comps + k]
  std::vector<std::size_t> counts;   // [cell]
  std::size_t skipped_edges = 0;

  std::size_t cell(int i, int j) const {
    if (i > j) std::swap(i, j);
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j - 1);
  }
  std::size_t count(int i, int j) const { return counts[cell(i, j)]; }
  double mean(int i, int j, std::size_t k) const {
    auto c = cell(i, j);
    return counts[c] ? sums[c * comps + k] / static_cast<double>(counts[c]) : kMissing;
  }
};

inline std::size_t metric_components(const NodeData& nd, EdgeMetric m) {
  return m == EdgeMetric::Euclidean ? 1 : nd.dim;
}

inline CellStats edge_cell_stats(std::span<const Edge> edges, const NodeData& nd, EdgeMetric metric) {
  CellStats s;
  s.n = nd.n_classes;
  s.comps = metric_components(nd, metric);
  const std::size_t cells = static_cast<std::size_t>(s.n) * static_cast<std::size_t>(s.n);
  s.sums.assign(cells * s.comps, 0.0);
  s.counts.assign(cells, 0);
  for (const Edge& e : edges) {
    if (!nd.usable(e.u) || !nd.usable(e.v)) {
      ++s.skipped_edges;
      continue;
    }
    const std::size_t c = s.cell(nd.cls[e.u], nd.cls[e.v]);
    ++s.counts[c];
    const double* a = nd.row(e.u);
    const double* b = nd.row(e.v);
    double* out = s.sums.data() + c * s.comps;
    if (metric == EdgeMetric::Euclidean) {
      double sq = 0;
      for (std::size_t k = 0; k < nd.dim; ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
      out[0] += std::sqrt(sq);
    } else {
      for (std::size_t k = 0; k < nd.dim; ++k) out[k] += std::abs(a[k] - b[k]);
    }
  }
  return s;
}

/// d^k(s_i, s_j) per component, and the edge count per class pair.
struct EdgeSimilarity {
  std::vector<ClassMatrix> per_component;
  ClassMatrix counts;
  std::size_t skipped_edges = 0;
};

inline EdgeSimilarity edge_similarity(const SocialGraph& g, const NodeData& nd,
                                      EdgeMetric metric = EdgeMetric::ComponentAbsDiff) {
  auto s = edge_cell_stats(g.edges(), nd, metric);
  EdgeSimilarity out;
  out.skipped_edges = s.skipped_edges;
  out.counts = ClassMatrix(s.n, "edges");
  for (std::size_t k = 0; k < s.comps; ++k) out.per_component.emplace_back(s.n, "d" + std::to_string(k), kMissing);
  for (int i = 1; i <= s.n; ++i)
    for (int j = 1; j <= s.n; ++j) {
      out.counts(i, j) = static_cast<double>(s.count(i, j));
      for (std::size_t k = 0; k < s.comps; ++k) out.per_component[k](i, j) = s.mean(i, j, k);
    }
  return out;
}

// ---------------------------------------------------------------------------
// Network / null-ensemble ratios

/// What to measure on the observed graph and on every ensemble member.
struct NullMeasure {
  const NodeData* data = nullptr;
  EdgeMetric metric = EdgeMetric::ComponentAbsDiff;
  std::string label;
};

struct NullRatio {
  ClassMatrix ratio;      // L or Lambda
  ClassMatrix sigma;      // spread of the same ratio across ensemble members
  ClassMatrix observed;   // observed edge statistic, averaged over components
  ClassMatrix null_mean;  // ensemble edge statistic, averaged over components
  std::size_t members = 0;
  std::vector<std::string> diagnostics;
};

namespace detail {
inline std::vector<double> cell_means(const CellStats& s) {
  std::vector<double> out(s.sums.size(), kMissing);
  for (std::size_t c = 0; c < s.counts.size(); ++c) {
    if (!s.counts[c]) continue;
    for (std::size_t k = 0; k < s.comps; ++k) out[c * s.comps + k] = s.sums[c * s.comps + k] / s.counts[c];
  }
  return out;
}
}  // namespace detail

/// Ratio of the observed edge statistic to its mean over plan.ensemble_size rewired
/// copies of g, averaged over components. All measures share the same ensemble.
inline std::vector<NullRatio> null_ratios(const SocialGraph& g, std::span<const NullMeasure> measures,
                                          const RewirePlan& plan) {
  plan.validate();
  const std::size_t members = plan.ensemble_size;
  const std::size_t attempts = plan.attempts_for(g.edge_count());
  const auto degrees = plan.verify_members ? g.degrees() : std::vector<std::size_t>{};

  // member_means[m][measure] = per-cell, per-component means for that member
  std::vector<std::vector<std::vector<double>>> member_means(members);
  parallel_for(members, [&](std::size_t m) {
    std::vector<Edge> edges(g.edges().begin(), g.edges().end());
    Rng rng(derive_seed(plan.seed, "ensemble", m));
    rewire_edges(edges, attempts, rng);
    if (plan.verify_members) check_degree_preserving(edges, degrees);
    auto& out = member_means[m];
    for (const auto& ms : measures) out.push_back(detail::cell_means(edge_cell_stats(edges, *ms.data, ms.metric)));
  });

  std::vector<NullRatio> results;
  for (std::size_t q = 0; q < measures.size(); ++q) {
    const auto& ms = measures[q];
    const auto obs = edge_cell_stats(g.edges(), *ms.data, ms.metric);
    const auto obs_mean = detail::cell_means(obs);
    const int n = obs.n;
    const std::size_t comps = obs.comps;

    NullRatio r;
    r.members = members;
    r.ratio = ClassMatrix(n, ms.label, kMissing);
    r.sigma = ClassMatrix(n, ms.label + "_sigma", kMissing);
    r.observed = ClassMatrix(n, ms.label + "_observed", kMissing);
    r.null_mean = ClassMatrix(n, ms.label + "_null", kMissing);
    if (obs.skipped_edges) {
      r.diagnostics.push_back(std::to_string(obs.skipped_edges) + " edges skipped (endpoint without vector or class)");
    }

    for (int i = 1; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        const std::size_t c = obs.cell(i, j);
        const std::string where = "(" + std::to_string(i) + "," + std::to_string(j) + ")";
        if (!obs.counts[c]) {
          r.diagnostics.push_back("no edges in class pair " + where);
          continue;
        }
        // ensemble mean per component: equal weight per member that has edges in the cell
        std::vector<double> rn(comps, 0.0);
        std::size_t contributing = 0;
        for (std::size_t m = 0; m < members; ++m) {
          const double* mm = member_means[m][q].data() + c * comps;
          if (is_missing(mm[0])) continue;
          for (std::size_t k = 0; k < comps; ++k) rn[k] += mm[k];
          ++contributing;
        }
        if (!contributing) {
          r.diagnostics.push_back("no ensemble member has edges in class pair " + where);
          continue;
        }
        for (double& v : rn) v /= static_cast<double>(contributing);

        std::vector<std::size_t> valid;
        double obs_avg = 0, rn_avg = 0, ratio = 0;
        for (std::size_t k = 0; k < comps; ++k) {
          obs_avg += obs_mean[c * comps + k];
          rn_avg += rn[k];
          if (rn[k] > 0) {
            valid.push_back(k);
            ratio += obs_mean[c * comps + k] / rn[k];
          }
        }
        r.observed(i, j) = r.observed(j, i) = obs_avg / static_cast<double>(comps);
        r.null_mean(i, j) = r.null_mean(j, i) = rn_avg / static_cast<double>(comps);
        if (valid.size() < comps) {
          r.diagnostics.push_back(std::to_string(comps - valid.size()) + " component(s) with zero null mean skipped in " +
                                  where);
        }
        if (valid.empty()) continue;
        r.ratio(i, j) = r.ratio(j, i) = ratio / static_cast<double>(valid.size());

        std::vector<double> member_ratio;
        for (std::size_t m = 0; m < members; ++m) {
          const double* mm = member_means[m][q].data() + c * comps;
          if (is_missing(mm[0])) continue;
          double s = 0;
          for (std::size_t k : valid) s += mm[k] / rn[k];
          member_ratio.push_back(s / static_cast<double>(valid.size()));
        }
        if (member_ratio.size() > 1) {
          double mean = std::accumulate(member_ratio.begin(), member_ratio.end(), 0.0) / member_ratio.size();
          double var = 0;
          for (double v : member_ratio) var += (v - mean) * (v - mean);
          r.sigma(i, j) = r.sigma(j, i) = std::sqrt(var / static_cast<double>(member_ratio.size() - 1));
        }
      }
    }
    results.push_back(std::move(r));
  }
  return results;
}

/// L(s_i, s_j) on spending vectors over the chosen subset.
inline NullRatio L_matrix(const SocialGraph& g, const SpendingVectors& sv, const ClassPartition& partition,
                          Subset subset, const RewirePlan& plan) {
  auto nd = node_data(g, sv, &partition, subset);
  NullMeasure m{&nd, EdgeMetric::ComponentAbsDiff, subset == Subset::Cash ? "L_k1" : "L_SV"};
  return std::move(null_ratios(g, std::span(&m, 1), plan).front());
}

/// Lambda(s_i, s_j) on weekly vectors (Euclidean edge distance).
inline NullRatio lambda_matrix(const SocialGraph& g, const WeeklyVectors& wv, const ClassPartition& partition,
                               const RewirePlan& plan, std::string label = "Lambda") {
  auto nd = node_data(g, wv, &partition);
  NullMeasure m{&nd, EdgeMetric::Euclidean, std::move(label)};
  return std::move(null_ratios(g, std::span(&m, 1), plan).front());
}

// ---------------------------------------------------------------------------
// Edge assortativity of a category

struct Assortativity {
  double rho = kMissing;
  std::size_t edges = 0;     // edges with both endpoints usable
  std::size_t spenders = 0;  // distinct endpoints with r > 0
  bool defined() const { return !is_missing(rho); }
};

/// rho(c, E): mean over edges of r(c,u) r(c,v) divided by the square of the mean r over
/// edge endpoints. Both orientations of an edge give the same product, so one pass suffices.
inline Assortativity edge_assortativity(std::span<const Edge> edges, const NodeData& nd, std::size_t column) {
  Assortativity a;
  long double prod = 0, ends = 0;
  std::vector<char> seen(nd.cls.size(), 0);
  for (const Edge& e : edges) {
    if (!nd.usable(e.u) || !nd.usable(e.v)) continue;
    const double x = nd.row(e.u)[column], y = nd.row(e.v)[column];
    prod += static_cast<long double>(x) * y;
    ends += static_cast<long double>(x) + y;
    ++a.edges;
    for (Node n : {e.u, e.v}) {
      if (!seen[n] && nd.row(n)[column] > 0) {
        seen[n] = 1;
        ++a.spenders;
      }
    }
  }
  if (a.edges == 0 || a.spenders < 2 || ends <= 0) return a;
  const long double E = static_cast<long double>(a.edges);
  const long double mean_r = ends / (2 * E);
  a.rho = static_cast<double>((prod / E) / (mean_r * mean_r));
  return a;
}

struct RobustnessTable {
  std::vector<std::size_t> order;          // columns sorted ascending by full-graph rho, undefined last
  std::vector<double> full;                // full-graph rho per column
  std::vector<double> fractions;           // removal fractions actually evaluated
  std::vector<std::vector<double>> rho;    // [fraction][column], mean over repeats
  std::vector<std::string> diagnostics;
};

/// Recomputes rho for every column after removing a random fraction of edges.
inline RobustnessTable robustness_by_removal(const SocialGraph& g, const NodeData& nd,
                                             std::span<const double> fractions, std::size_t repeats,
                                             std::uint64_t seed, std::size_t min_edges = 100) {
  if (repeats < 1) throw Error("robustness needs at least one repeat");
  RobustnessTable t;
  for (std::size_t c = 0; c < nd.dim; ++c) t.full.push_back(edge_assortativity(g.edges(), nd, c).rho);
  t.order.resize(nd.dim);
  std::iota(t.order.begin(), t.order.end(), 0);
  std::stable_sort(t.order.begin(), t.order.end(), [&](std::size_t a, std::size_t b) {
    const double x = t.full[a], y = t.full[b];
    if (is_missing(x) || is_missing(y)) return !is_missing(x) && is_missing(y);
    return x < y;
  });
  for (std::size_t c = 0; c < nd.dim; ++c)
    if (is_missing(t.full[c])) t.diagnostics.push_back("column " + std::to_string(c) + ": rho undefined");

  for (std::size_t fi = 0; fi < fractions.size(); ++fi) {
    const double f = fractions[fi];
    if (!(f >= 0 && f < 1)) throw Error("removal fraction must lie in [0, 1)");
    const auto keep = static_cast<std::size_t>(std::llround((1.0 - f) * static_cast<double>(g.edge_count())));
    if (keep < min_edges) {
      t.diagnostics.push_back("fraction " + csv::format(f) + " leaves " + std::to_string(keep) + " edges, skipped");
      continue;
    }
    std::vector<double> acc(nd.dim, 0.0);
    std::vector<std::size_t> hits(nd.dim, 0);
    for (std::size_t r = 0; r < repeats; ++r) {
      std::vector<Edge> edges(g.edges().begin(), g.edges().end());
      Rng rng(derive_seed(seed, "removal", fi * repeats + r));
      std::shuffle(edges.begin(), edges.end(), rng);
      edges.resize(keep);
      for (std::size_t c = 0; c < nd.dim; ++c) {
        auto a = edge_assortativity(edges, nd, c);
        if (a.defined()) {
          acc[c] += a.rho;
          ++hits[c];
        }
      }
    }
    std::vector<double> row(nd.dim, kMissing);
    for (std::size_t c = 0; c < nd.dim; ++c)
      if (hits[c]) row[c] = acc[c] / static_cast<double>(hits[c]);
    t.fractions.push_back(f);
    t.rho.push_back(std::move(row));
  }
  return t;
}

}  // namespace socioscope
