#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "socioscope/nullmodel.hpp"
#include "socioscope/synth.hpp"

using namespace socioscope;

namespace {

SocialGraph graph_of(std::vector<std::pair<UserId, UserId>> pairs) { return SocialGraph::from_id_pairs(pairs); }

SocialGraph erdos_renyi(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::set<std::pair<std::size_t, std::size_t>> seen;
  std::vector<std::pair<UserId, UserId>> pairs;
  while (pairs.size() < m) {
    auto a = uniform_index(rng, n), b = uniform_index(rng, n);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.insert({a, b}).second) pairs.emplace_back(std::to_string(a), std::to_string(b));
  }
  return graph_of(pairs);
}

std::set<std::pair<Node, Node>> edge_set(const SocialGraph& g) {
  std::set<std::pair<Node, Node>> s;
  for (const auto& e : g.edges()) s.insert({e.u, e.v});
  return s;
}

// dim-1 node data straight from a value per node id
NodeData scalar_data(const SocialGraph& g, const std::function<double(const UserId&)>& f) {
  NodeData nd;
  nd.dim = 1;
  nd.n_classes = 1;
  for (Node n = 0; n < g.node_count(); ++n) {
    nd.values.push_back(f(g.id(n)));
    nd.cls.push_back(1);
  }
  return nd;
}

ClassPartition partition_of(const SynthPopulation& pop) {
  std::map<UserId, int, IdLess> a;
  for (std::size_t i = 0; i < pop.ids.size(); ++i) a[pop.ids[i]] = pop.cls[i];
  return ClassPartition::from_assignment(a, pop.spec.n_classes);
}

}  // namespace

TEST(Rewire, FourCycleStaysTwoRegular) {
  auto g = graph_of({{"a", "b"}, {"b", "c"}, {"c", "d"}, {"d", "a"}});
  for (std::uint64_t s = 0; s < 20; ++s) {
    RewirePlan plan;
    plan.seed = s;
    auto r = rewire(g, plan);
    EXPECT_NO_THROW(check_degree_preserving(r.edges(), g.degrees()));
    EXPECT_EQ(r.degrees(), std::vector<std::size_t>(4, 2));
  }
}

TEST(Rewire, StarCannotMove) {
  auto g = graph_of({{"c", "1"}, {"c", "2"}, {"c", "3"}});
  RewireStats st;
  auto r = rewire(g, RewirePlan{}, &st);
  EXPECT_EQ(st.accepted, 0u);
  EXPECT_EQ(edge_set(r), edge_set(g));
}

TEST(Rewire, TooFewEdgesWarns) {
  auto g = graph_of({{"a", "b"}});
  RewireStats st;
  auto r = rewire(g, RewirePlan{}, &st);
  EXPECT_FALSE(st.warning.empty());
  EXPECT_EQ(r.edge_count(), 1u);
}

TEST(Rewire, RandomGraphDecorrelates) {
  auto g = erdos_renyi(200, 1000, 3);
  RewirePlan plan;
  plan.seed = 3;
  auto r = rewire(g, plan);
  EXPECT_EQ(r.degrees(), g.degrees());
  EXPECT_NO_THROW(check_degree_preserving(r.edges(), g.degrees()));
  auto a = edge_set(g), b = edge_set(r);
  std::size_t common = 0;
  for (const auto& e : a) common += b.count(e);
  const double jaccard = static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
  EXPECT_LT(jaccard, 0.2);
}

TEST(Rewire, CheckCatchesBrokenGraphs) {
  std::vector<Edge> loop{{0, 0}, {0, 1}};
  EXPECT_THROW(check_degree_preserving(loop, {3, 1}), Error);
  std::vector<Edge> twice{{0, 1}, {0, 1}};
  EXPECT_THROW(check_degree_preserving(twice, {2, 2}), Error);
}

TEST(EdgeSimilarity, IdenticalVectorsGiveZero) {
  auto g = erdos_renyi(30, 60, 1);
  auto nd = scalar_data(g, [](const UserId&) { return 0.4; });
  auto s = edge_similarity(g, nd);
  EXPECT_EQ(s.per_component[0](1, 1), 0.0);
}

TEST(EdgeSimilarity, SingleEdgeHandCase) {
  auto g = graph_of({{"u", "v"}});
  SpendingVectors sv;
  SpendingVector a, b;
  a.values[0] = 1;
  b.values[1] = 1;
  sv.vectors = {{"u", a}, {"v", b}};
  auto p = ClassPartition::from_assignment({{"u", 1}, {"v", 2}}, 2);
  auto s = edge_similarity(g, node_data(g, sv, &p, Subset::NonCash));
  EXPECT_EQ(s.per_component[0](1, 2), 1.0);
  EXPECT_EQ(s.per_component[1](1, 2), 1.0);
  EXPECT_EQ(s.per_component[2](1, 2), 0.0);
  EXPECT_TRUE(is_missing(s.per_component[0](1, 1)));
  EXPECT_EQ(s.counts(2, 1), 1.0);
}

TEST(EdgeSimilarity, CompleteBipartiteMatchesEnumeration) {
  // left side class 1, right side class 2, values vary by node
  std::vector<std::pair<UserId, UserId>> pairs;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) pairs.emplace_back("L" + std::to_string(i), "R" + std::to_string(j));
  auto g = graph_of(pairs);
  auto value = [](const UserId& id) { return (id[0] == 'L' ? 0.1 : 0.05) * (id[1] - '0' + 1); };
  std::map<UserId, int, IdLess> a;
  for (Node n = 0; n < g.node_count(); ++n) a[g.id(n)] = g.id(n)[0] == 'L' ? 1 : 2;
  auto p = ClassPartition::from_assignment(a, 2);
  auto nd = align_nodes(g, &p, 1, [&](const UserId& id, double* out) {
    out[0] = value(id);
    return true;
  });
  double brute = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) brute += std::abs(value("L" + std::to_string(i)) - value("R" + std::to_string(j)));
  EXPECT_NEAR(edge_similarity(g, nd).per_component[0](1, 2), brute / 20, 1e-15);
}

TEST(LMatrix, IndependentVectorsSitNearOne) {
  SynthSpec spec;
  spec.n_users = 3000;
  spec.homophily = 0;
  spec.mean_degree = 8;
  spec.pareto_alpha = 2.5;
  spec.seed = 4;
  auto pop = generate_population(spec);
  RewirePlan plan;
  plan.ensemble_size = 30;
  plan.verify_members = true;
  auto r = L_matrix(planted_graph(pop), planted_spending_vectors(pop), partition_of(pop), Subset::NonCash, plan);
  int in = 0, all = 0;
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j)
      if (!is_missing(r.ratio(i, j)) && !is_missing(r.sigma(i, j))) {
        ++all;
        in += std::abs(r.ratio(i, j) - 1) <= 3 * r.sigma(i, j);
      }
  ASSERT_GT(all, 60);
  EXPECT_GE(static_cast<double>(in) / all, 0.9);
  EXPECT_TRUE(r.ratio.symmetric());
}

TEST(LMatrix, PlantedHomophilyShowsDiagonal) {
  SynthSpec spec;
  spec.n_users = 6000;
  spec.homophily = 0.8;
  spec.pareto_alpha = 2.5;
  spec.seed = 5;
  auto pop = generate_population(spec);
  RewirePlan plan;
  plan.ensemble_size = 30;
  auto r = L_matrix(planted_graph(pop), planted_spending_vectors(pop), partition_of(pop), Subset::NonCash, plan);
  double remote = 0;
  int cnt = 0;
  for (int i = 1; i <= 9; ++i) {
    EXPECT_LT(r.ratio(i, i), 1.0) << i;
    for (int j = 1; j <= 9; ++j)
      if (std::abs(i - j) >= 6 && !is_missing(r.ratio(i, j))) {
        remote += r.ratio(i, j);
        ++cnt;
      }
  }
  ASSERT_GT(cnt, 0);
  EXPECT_GT(remote / cnt, 1.0);
}

TEST(LMatrix, SameSeedSameResult) {
  auto g = erdos_renyi(300, 900, 9);
  SpendingVectors sv;
  Rng rng(9);
  std::map<UserId, int, IdLess> a;
  for (Node n = 0; n < g.node_count(); ++n) {
    SpendingVector v;
    v.values[uniform_index(rng, 16)] = 1;
    sv.vectors[g.id(n)] = v;
    a[g.id(n)] = 1 + static_cast<int>(n % 3);
  }
  auto p = ClassPartition::from_assignment(a, 3);
  RewirePlan plan;
  plan.ensemble_size = 8;
  set_thread_cap(1);
  auto r1 = L_matrix(g, sv, p, Subset::NonCash, plan);
  set_thread_cap(4);
  auto r2 = L_matrix(g, sv, p, Subset::NonCash, plan);
  set_thread_cap(0);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) {
      EXPECT_EQ(r1.ratio(i, j), r2.ratio(i, j));
      EXPECT_EQ(r1.sigma(i, j), r2.sigma(i, j));
    }
}

TEST(Assortativity, PermutedValuesNearOne) {
  auto g = erdos_renyi(2000, 20000, 12);
  Rng rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  std::map<UserId, double> val;
  for (Node n = 0; n < g.node_count(); ++n) val[g.id(n)] = u(rng);
  auto a = edge_assortativity(g.edges(), scalar_data(g, [&](const UserId& id) { return val[id]; }), 0);
  EXPECT_NEAR(a.rho, 1.0, 0.02);
}

TEST(Assortativity, FourNodeHandExample) {
  // edges a-b (both 0.9) and c-d (both 0.1): sum of products 0.82 over 2 edges,
  // mean endpoint value 0.5, so rho = 0.41 / 0.25
  auto g = graph_of({{"a", "b"}, {"c", "d"}});
  auto nd = scalar_data(g, [](const UserId& id) { return id == "a" || id == "b" ? 0.9 : 0.1; });
  EXPECT_NEAR(edge_assortativity(g.edges(), nd, 0).rho, 1.64, 1e-12);
}

TEST(Assortativity, TooFewSpendersUndefined) {
  auto g = graph_of({{"a", "b"}, {"c", "d"}});
  auto nd = scalar_data(g, [](const UserId& id) { return id == "a" ? 1.0 : 0.0; });
  EXPECT_FALSE(edge_assortativity(g.edges(), nd, 0).defined());
}

TEST(Robustness, IdentityAndHomogeneous) {
  auto g = erdos_renyi(500, 2000, 13);
  Rng rng(13);
  std::uniform_real_distribution<double> u(0, 1);
  std::map<UserId, double> val;
  for (Node n = 0; n < g.node_count(); ++n) val[g.id(n)] = u(rng);
  auto nd = scalar_data(g, [&](const UserId& id) { return val[id]; });
  const std::vector<double> zero{0.0};
  auto t = robustness_by_removal(g, nd, zero, 2, 1);
  EXPECT_NEAR(t.rho[0][0], t.full[0], 1e-12);

  auto flat = scalar_data(g, [](const UserId&) { return 0.3; });
  const std::vector<double> fr{0.25, 0.5, 0.75};
  auto h = robustness_by_removal(g, flat, fr, 2, 1);
  for (const auto& row : h.rho) EXPECT_NEAR(row[0], 1.0, 1e-12);
}

TEST(Robustness, SmallRemainderSkipped) {
  auto g = erdos_renyi(100, 150, 2);
  auto nd = scalar_data(g, [](const UserId& id) { return std::stoi(id) % 2 ? 0.7 : 0.2; });
  const std::vector<double> fr{0.25, 0.5};
  auto t = robustness_by_removal(g, nd, fr, 1, 1);
  EXPECT_EQ(t.fractions, std::vector<double>{0.25});
  EXPECT_FALSE(t.diagnostics.empty());
}

TEST(Lambda, IdenticalWeeklyVectorsAreUndefinedNotFatal) {
  auto g = erdos_renyi(100, 300, 4);
  WeeklyVectors wv;
  std::map<UserId, int, IdLess> a;
  for (Node n = 0; n < g.node_count(); ++n) {
    WeeklyVector w;
    w.values.fill(1.0 / 7);
    wv[g.id(n)] = w;
    a[g.id(n)] = 1 + static_cast<int>(n % 2);
  }
  RewirePlan plan;
  plan.ensemble_size = 5;
  auto r = lambda_matrix(g, wv, ClassPartition::from_assignment(a, 2), plan);
  EXPECT_TRUE(is_missing(r.ratio(1, 1)));
  EXPECT_FALSE(r.diagnostics.empty());
}

TEST(Lambda, IndependentWeeklyVectorsNearOne) {
  auto g = erdos_renyi(2000, 10000, 6);
  Rng rng(6);
  WeeklyVectors wv;
  std::map<UserId, int, IdLess> a;
  for (Node n = 0; n < g.node_count(); ++n) {
    WeekArray mean;
    mean.fill(1.0 / 7);
    wv[g.id(n)] = WeeklyVector{sample_dirichlet(rng, mean, 10.0), 1.0};
    a[g.id(n)] = 1 + static_cast<int>(uniform_index(rng, 3));
  }
  RewirePlan plan;
  plan.ensemble_size = 20;
  auto r = lambda_matrix(g, wv, ClassPartition::from_assignment(a, 3), plan);
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) EXPECT_NEAR(r.ratio(i, j), 1.0, 0.05);
}
