#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "socioscope/common.hpp"

namespace socioscope {

using Node = std::uint32_t;

/// Undirected edge, always stored with u < v.
struct Edge {
  Node u;
  Node v;
  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

inline Edge make_edge(Node a, Node b) { return a < b ? Edge{a, b} : Edge{b, a}; }

inline std::uint64_t edge_key(Node a, Node b) {
  auto e = make_edge(a, b);
  return (static_cast<std::uint64_t>(e.u) << 32) | e.v;
}

/// Simple undirected graph over user ids. Nodes are indexed in natural id order,
/// edges are sorted and unique, and the value is immutable once built.
class SocialGraph {
 public:
  SocialGraph() = default;

  /// Builds from id pairs; self-pairs are dropped and counted, duplicates collapse.
  template <class Pairs>
  static SocialGraph from_id_pairs(const Pairs& pairs, std::vector<UserId> extra_nodes = {}) {
    std::vector<UserId> ids = std::move(extra_nodes);
    for (const auto& [a, b] : pairs) {
      if (a == b) continue;
      ids.push_back(a);
      ids.push_back(b);
    }
    std::sort(ids.begin(), ids.end(), IdLess{});
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

    SocialGraph g;
    g.ids_ = std::move(ids);
    std::vector<Edge> edges;
    std::size_t loops = 0;
    for (const auto& [a, b] : pairs) {
      if (a == b) {
        ++loops;
        continue;
      }
      edges.push_back(make_edge(*g.find(a), *g.find(b)));
    }
    g.self_loops_dropped_ = loops;
    g.set_edges(std::move(edges));
    return g;
  }

  /// Same node set, different edge set (used by rewiring and edge removal).
  SocialGraph with_edges(std::vector<Edge> edges) const {
    SocialGraph g;
    g.ids_ = ids_;
    g.set_edges(std::move(edges));
    return g;
  }

  /// Subgraph induced by `keep` (node indices of this graph).
  SocialGraph induced(std::span<const Node> keep) const {
    std::vector<char> in(ids_.size(), 0);
    for (Node n : keep) in[n] = 1;
    std::vector<Node> remap(ids_.size(), 0);
    SocialGraph g;
    for (Node n = 0; n < ids_.size(); ++n) {
      if (!in[n]) continue;
      remap[n] = static_cast<Node>(g.ids_.size());
      g.ids_.push_back(ids_[n]);
    }
    std::vector<Edge> edges;
    for (const Edge& e : edges_) {
      if (in[e.u] && in[e.v]) edges.push_back(make_edge(remap[e.u], remap[e.v]));
    }
    g.set_edges(std::move(edges));
    return g;
  }

  std::size_t node_count() const { return ids_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  bool empty() const { return ids_.empty(); }

  const UserId& id(Node n) const { return ids_[n]; }
  const std::vector<UserId>& ids() const { return ids_; }

  std::optional<Node> find(std::string_view id) const {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), id, IdLess{});
    if (it == ids_.end() || *it != id) return std::nullopt;
    return static_cast<Node>(it - ids_.begin());
  }

  std::span<const Edge> edges() const { return edges_; }

  std::span<const Node> neighbors(Node n) const {
    return {adjacency_.data() + offsets_[n], adjacency_.data() + offsets_[n + 1]};
  }
  std::size_t degree(Node n) const { return offsets_[n + 1] - offsets_[n]; }

  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> d(ids_.size());
    for (Node n = 0; n < ids_.size(); ++n) d[n] = degree(n);
    return d;
  }

  bool has_edge(Node a, Node b) const {
    auto nb = neighbors(a);
    return std::binary_search(nb.begin(), nb.end(), b);
  }

  std::size_t self_loops_dropped() const { return self_loops_dropped_; }

  friend bool operator==(const SocialGraph& a, const SocialGraph& b) {
    return a.ids_ == b.ids_ && a.edges_ == b.edges_;
  }

 private:
  void set_edges(std::vector<Edge> edges) {
    for (const Edge& e : edges) {
      if (e.u == e.v) throw Error("self-loop in edge set");
      if (e.u > e.v || e.v >= ids_.size()) throw Error("malformed edge");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    offsets_.assign(ids_.size() + 1, 0);
    for (const Edge& e : edges_) {
      ++offsets_[e.u + 1];
      ++offsets_[e.v + 1];
    }
    for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
    adjacency_.assign(2 * edges_.size(), 0);
    std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (const Edge& e : edges_) {
      adjacency_[fill[e.u]++] = e.v;
      adjacency_[fill[e.v]++] = e.u;
    }
    for (Node n = 0; n < ids_.size(); ++n) {
      std::sort(adjacency_.begin() + offsets_[n], adjacency_.begin() + offsets_[n + 1]);
    }
  }

  std::vector<UserId> ids_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Node> adjacency_;
  std::size_t self_loops_dropped_ = 0;
};

/// Connected components as node lists, each sorted, in order of their smallest node.
inline std::vector<std::vector<Node>> connected_components(const SocialGraph& g) {
  std::vector<std::vector<Node>> out;
  std::vector<char> seen(g.node_count(), 0);
  for (Node s = 0; s < g.node_count(); ++s) {
    if (seen[s]) continue;
    std::vector<Node> comp{s};
    seen[s] = 1;
    for (std::size_t i = 0; i < comp.size(); ++i) {
      for (Node nb : g.neighbors(comp[i])) {
        if (!seen[nb]) {
          seen[nb] = 1;
          comp.push_back(nb);
        }
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

/// Largest connected component; equal sizes go to the one holding the smallest id.
inline SocialGraph largest_component(const SocialGraph& g) {
  if (g.empty()) return g;
  auto comps = connected_components(g);
  std::size_t best = 0;
  for (std::size_t i = 1; i < comps.size(); ++i) {
    if (comps[i].size() > comps[best].size()) best = i;
  }
  return g.induced(comps[best]);
}

}  // namespace socioscope
