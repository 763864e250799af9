#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <span>
#include <vector>

#include "socioscope/common.hpp"

namespace socioscope {

struct WeightedEdge {
  std::uint32_t u;
  std::uint32_t v;
  double w;
};

/// Undirected weighted graph on nodes 0..n-1. Self-loops carry their weight once.
struct WeightedGraph {
  std::size_t n = 0;
  std::vector<WeightedEdge> edges;
};

struct CommunityResult {
  std::vector<int> labels;  // 0-based, numbered by first appearance in node order
  int count = 0;
  double modularity = 0;
};

/// Q = sum_c [ in_c / 2m - (tot_c / 2m)^2 ].
inline double modularity(const WeightedGraph& g, std::span<const int> labels) {
  long double m2 = 0;
  std::map<int, long double> in, tot;
  for (const auto& e : g.edges) {
    const long double w = e.w;
    if (e.u == e.v) {
      m2 += 2 * w;
      tot[labels[e.u]] += 2 * w;
      in[labels[e.u]] += 2 * w;
      continue;
    }
    m2 += 2 * w;
    tot[labels[e.u]] += w;
    tot[labels[e.v]] += w;
    if (labels[e.u] == labels[e.v]) in[labels[e.u]] += 2 * w;
  }
  if (m2 <= 0) return 0;
  long double q = 0;
  for (const auto& [c, t] : tot) q += in[c] / m2 - (t / m2) * (t / m2);
  return static_cast<double>(q);
}

namespace detail {

struct LouvainLevel {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> adj;  // no self entries
  std::vector<double> self;                                        // self-loop weight (counted once)
  std::vector<double> strength;                                    // weighted degree, self-loops twice
  double m2 = 0;
};

inline LouvainLevel make_level(const WeightedGraph& g) {
  LouvainLevel L;
  L.adj.resize(g.n);
  L.self.assign(g.n, 0);
  L.strength.assign(g.n, 0);
  std::vector<std::map<std::uint32_t, double>> merged(g.n);
  for (const auto& e : g.edges) {
    if (e.w < 0) throw Error("Louvain needs non-negative edge weights");
    if (e.u == e.v) {
      L.self[e.u] += e.w;
      L.strength[e.u] += 2 * e.w;
    } else {
      merged[e.u][e.v] += e.w;
      merged[e.v][e.u] += e.w;
      L.strength[e.u] += e.w;
      L.strength[e.v] += e.w;
    }
    L.m2 += 2 * e.w;
  }
  for (std::size_t i = 0; i < g.n; ++i) L.adj[i].assign(merged[i].begin(), merged[i].end());
  return L;
}

/// Local moving phase; returns true if any node changed community.
inline bool move_nodes(const LouvainLevel& L, std::vector<int>& comm, Rng& rng) {
  const std::size_t n = L.adj.size();
  std::vector<double> tot(n, 0);
  for (std::size_t i = 0; i < n; ++i) tot[static_cast<std::size_t>(comm[i])] += L.strength[i];
  std::vector<double> link(n, 0);
  std::vector<int> touched;
  bool any = false;
  constexpr double eps = 1e-12;
  for (bool moved = true; moved;) {
    moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const int own = comm[i];
      touched.clear();
      for (auto [j, w] : L.adj[i]) {
        const int c = comm[j];
        if (link[static_cast<std::size_t>(c)] == 0) touched.push_back(c);
        link[static_cast<std::size_t>(c)] += w;
      }
      const double ki = L.strength[i];
      tot[static_cast<std::size_t>(own)] -= ki;
      auto gain = [&](int c) { return link[static_cast<std::size_t>(c)] - tot[static_cast<std::size_t>(c)] * ki / L.m2; };
      double best_gain = gain(own);
      std::vector<int> best;
      for (int c : touched) {
        if (c == own) continue;
        const double gc = gain(c);
        if (gc > best_gain + eps) {
          best_gain = gc;
          best.assign(1, c);
        } else if (!best.empty() && std::abs(gc - best_gain) <= eps) {
          best.push_back(c);
        }
      }
      int target = own;
      if (!best.empty()) {
        std::sort(best.begin(), best.end());
        best.erase(std::unique(best.begin(), best.end()), best.end());
        target = best[best.size() == 1 ? 0 : uniform_index(rng, best.size())];
      }
      tot[static_cast<std::size_t>(target)] += ki;
      for (int c : touched) link[static_cast<std::size_t>(c)] = 0;
      if (target != own) {
        comm[i] = target;
        moved = any = true;
      }
    }
  }
  return any;
}

}  // namespace detail

/// Weighted Louvain: local moving in fixed node order, then aggregation, until stable.
/// The seed only breaks ties between equally good moves.
inline CommunityResult louvain_communities(const WeightedGraph& g, std::uint64_t seed = 42) {
  CommunityResult r;
  if (g.n == 0) return r;
  Rng rng(derive_seed(seed, "louvain"));
  std::vector<int> node_comm(g.n);
  std::iota(node_comm.begin(), node_comm.end(), 0);
  if (g.edges.empty()) {
    r.labels = node_comm;
    r.count = static_cast<int>(g.n);
    return r;
  }

  WeightedGraph level = g;
  for (;;) {
    auto L = detail::make_level(level);
    std::vector<int> comm(level.n);
    std::iota(comm.begin(), comm.end(), 0);
    if (!detail::move_nodes(L, comm, rng)) break;
    // renumber communities in order of first appearance
    std::vector<int> remap(level.n, -1);
    int next = 0;
    for (auto& c : comm) {
      if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
      c = remap[static_cast<std::size_t>(c)];
    }
    for (auto& c : node_comm) c = comm[static_cast<std::size_t>(c)];
    if (static_cast<std::size_t>(next) == level.n) break;
    std::map<std::pair<std::uint32_t, std::uint32_t>, double> w;
    for (const auto& e : level.edges) {
      auto a = static_cast<std::uint32_t>(comm[e.u]), b = static_cast<std::uint32_t>(comm[e.v]);
      if (a > b) std::swap(a, b);
      w[{a, b}] += e.w;
    }
    WeightedGraph up;
    up.n = static_cast<std::size_t>(next);
    for (const auto& [k, v] : w) up.edges.push_back({k.first, k.second, v});
    level = std::move(up);
  }

  std::vector<int> remap(g.n, -1);
  int next = 0;
  for (auto& c : node_comm) {
    if (remap[static_cast<std::size_t>(c)] < 0) remap[static_cast<std::size_t>(c)] = next++;
    c = remap[static_cast<std::size_t>(c)];
  }
  r.labels = std::move(node_comm);
  r.count = next;
  r.modularity = modularity(g, r.labels);
  return r;
}

/// Normalized mutual information 2 I(A;B) / (H(A) + H(B)); 1 when both labelings are trivial.
inline double normalized_mutual_information(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("NMI needs labelings of equal length");
  const double n = static_cast<double>(a.size());
  if (a.empty()) return 1.0;
  std::map<int, double> pa, pb;
  std::map<std::pair<int, int>, double> pab;
  for (std::size_t i = 0; i < a.size(); ++i) {
    pa[a[i]] += 1;
    pb[b[i]] += 1;
    pab[{a[i], b[i]}] += 1;
  }
  auto entropy = [&](const std::map<int, double>& p) {
    double h = 0;
    for (const auto& [k, c] : p) h -= (c / n) * std::log(c / n);
    return h;
  };
  const double ha = entropy(pa), hb = entropy(pb);
  if (ha + hb == 0) return 1.0;
  double mi = 0;
  for (const auto& [k, c] : pab) mi += (c / n) * std::log(c * n / (pa[k.first] * pb[k.second]));
  return 2 * mi / (ha + hb);
}

}  // namespace socioscope
