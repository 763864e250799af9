#include <gtest/gtest.h>

#include <cmath>

#include "socioscope/catnet.hpp"
#include "socioscope/synth.hpp"

using namespace socioscope;

namespace {

CategorySpendTable table_of(std::vector<std::vector<double>> r) {
  CategorySpendTable t;
  const std::size_t C = r.front().size();
  for (std::size_t c = 0; c < C; ++c) t.categories.push_back(static_cast<int>(1000 + c));
  t.purchasers.assign(C, 0);
  t.purchases.assign(C, 0);
  for (std::size_t u = 0; u < r.size(); ++u) {
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t c = 0; c < C; ++c)
      if (r[u][c] > 0) {
        row.emplace_back(static_cast<std::uint32_t>(c), r[u][c]);
        ++t.purchasers[c];
        ++t.purchases[c];
      }
    t.users.push_back(std::to_string(u + 1));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// users with ages, all class 1, one category
struct AgeCase {
  CategorySpendTable table;
  Profiles profiles;
  ClassPartition partition;
};

AgeCase age_case(std::vector<int> ages, std::vector<double> r, std::vector<int> genders = {}) {
  AgeCase a;
  std::vector<std::vector<double>> rows;
  std::map<UserId, int, IdLess> cls;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    rows.push_back({r[i]});
    EgoProfile p;
    p.user_id = std::to_string(i + 1);
    p.age = ages[i];
    p.gender = genders.empty() ? 1 : genders[i];
    a.profiles.emplace(p.user_id, p);
    cls[p.user_id] = 1;
  }
  a.table = table_of(rows);
  a.partition = ClassPartition::from_assignment(cls, 1);
  return a;
}

CategoryCorrelation uniform_matrix(std::size_t k, double rho, std::size_t support) {
  CategoryCorrelation m;
  for (std::size_t i = 0; i < k; ++i) m.categories.push_back(static_cast<int>(i + 1));
  m.rho.assign(k * k, rho);
  m.co_purchasers.assign(k * k, support);
  return m;
}

WeightedGraph cliques(std::size_t count, std::size_t size, bool bridge) {
  WeightedGraph g;
  g.n = count * size;
  for (std::size_t b = 0; b < count; ++b)
    for (std::size_t i = 0; i < size; ++i)
      for (std::size_t j = i + 1; j < size; ++j)
        g.edges.push_back({static_cast<std::uint32_t>(b * size + i), static_cast<std::uint32_t>(b * size + j), 1.0});
  if (bridge && count > 1) g.edges.push_back({0, static_cast<std::uint32_t>(size), 0.1});
  return g;
}

}  // namespace

TEST(CategoryCorrelation, TwoUserHandExample) {
  auto m = category_correlation(table_of({{0.2, 0.8}, {0.0, 1.0}}));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_NEAR(m(0, 1), 0.2 / 0.1 * (0.8 / 0.9) / 2, 1e-12);
  EXPECT_NEAR(m(0, 1), 0.889, 5e-4);
  EXPECT_EQ(m(0, 1), m(1, 0));
  EXPECT_EQ(m.support(0, 1), 1u);
}

TEST(CategoryCorrelation, IndependentCategoriesNearOne) {
  auto m = category_correlation(independent_category_table(20000, 10, 20.0, 3));
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = i + 1; j < m.size(); ++j) EXPECT_NEAR(m(i, j), 1.0, 0.05) << i << "," << j;
}

TEST(CategoryCorrelation, PlantedBlockAboveOne) {
  // a third of users split spend between categories 0 and 1, the rest spread over 2..5
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.2, 0.8);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 3000; ++i) {
    std::vector<double> r(6, 0.0);
    if (i % 3 == 0) {
      r[0] = u(rng);
      r[1] = 1 - r[0];
    } else {
      r[2 + uniform_index(rng, 4)] = 1;
    }
    rows.push_back(r);
  }
  auto m = category_correlation(table_of(rows));
  EXPECT_GT(m(0, 1), 1.5);
  EXPECT_EQ(m(2, 3), 0.0);
}

TEST(CategoryCorrelation, SymmetricAndZeroMeanExcluded) {
  auto m = category_correlation(table_of({{0.5, 0.5, 0.0}, {0.1, 0.9, 0.0}, {1.0, 0.0, 0.0}}));
  EXPECT_EQ(m.size(), 2u);
  EXPECT_FALSE(m.diagnostics.empty());
  EXPECT_EQ(m(0, 1), m(1, 0));
  EXPECT_THROW(category_correlation(table_of({{1.0}})), Error);
}

TEST(ThresholdGraph, InfiniteThresholdEmptyAndLowThresholdComplete) {
  auto m = uniform_matrix(6, 2.0, 5000);
  auto none = threshold_graph(m, std::numeric_limits<double>::infinity(), 0);
  EXPECT_TRUE(none.graph.edges.empty());
  EXPECT_TRUE(none.nodes.empty());
  auto all = threshold_graph(m, 1.5, 1000);
  EXPECT_EQ(all.graph.edges.size(), 15u);
  EXPECT_EQ(all.nodes.size(), 6u);
  EXPECT_TRUE(threshold_graph(m, 1.5, 5001).graph.edges.empty());
}

TEST(Louvain, TwoCliquesSplit) {
  auto g = cliques(2, 6, true);
  auto c = louvain_communities(g, 1);
  EXPECT_EQ(c.count, 2);
  for (std::size_t i = 0; i < g.n; ++i) EXPECT_EQ(c.labels[i], c.labels[i / 6 * 6]);
  EXPECT_NE(c.labels[0], c.labels[6]);
}

TEST(Louvain, SingleCliqueStaysWhole) {
  auto c = louvain_communities(cliques(1, 8, false), 1);
  EXPECT_EQ(c.count, 1);
}

TEST(Louvain, EmptyGraph) {
  auto c = louvain_communities(WeightedGraph{}, 1);
  EXPECT_EQ(c.count, 0);
  EXPECT_TRUE(c.labels.empty());
}

TEST(Louvain, NeverWorseThanSingletons) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto pb = planted_block_graph(6, 15, 0.5, 0.1, 2.0, 1.0, s);
    auto c = louvain_communities(pb.graph, s);
    std::vector<int> single(pb.graph.n);
    std::iota(single.begin(), single.end(), 0);
    EXPECT_GE(c.modularity, modularity(pb.graph, single));
    EXPECT_NEAR(c.modularity, modularity(pb.graph, c.labels), 1e-9);
  }
}

TEST(Nmi, IdenticalAndRelabeled) {
  std::vector<int> a{0, 0, 1, 1, 2, 2}, b{5, 5, 3, 3, 4, 4};
  EXPECT_NEAR(normalized_mutual_information(a, b), 1.0, 1e-12);
}

TEST(Afs, SingleValueCategory) {
  auto a = age_case({30, 30}, {0.4, 0.9}, {0, 0});
  auto f = average_feature_set(a.table, a.profiles, a.partition);
  EXPECT_EQ(f[0].age(), 30.0);
  EXPECT_EQ(f[0].gender(), 0.0);
  EXPECT_EQ(f[0].seg(), 1.0);
}

TEST(Afs, TwoAges) {
  auto a = age_case({20, 40}, {0.5, 0.5});
  EXPECT_DOUBLE_EQ(average_feature_set(a.table, a.profiles, a.partition)[0].age(), 30.0);
}

TEST(Afs, PerValueAndPerUserDiffer) {
  auto a = age_case({20, 20, 40}, {0.1, 0.3, 0.2});
  EXPECT_NEAR(average_feature_set(a.table, a.profiles, a.partition, AfsMode::PerValue)[0].age(), 30.0, 1e-12);
  EXPECT_NEAR(average_feature_set(a.table, a.profiles, a.partition, AfsMode::PerUser)[0].age(), 80.0 / 3.0, 1e-12);
}

TEST(Afs, GenderInUnitInterval) {
  auto fp = feature_population(40, 50, 0.4, 9, 8);
  for (const auto& f : average_feature_set(fp.table, fp.profiles, fp.partition)) {
    EXPECT_GE(f.gender(), 0.0);
    EXPECT_LE(f.gender(), 1.0);
  }
}

TEST(Afs, CommunityPooling) {
  auto a = age_case({20, 40}, {0.5, 0.5});
  auto f = average_feature_set(a.table, a.profiles, a.partition);
  CommunityResult one{{0}, 1, 0};
  auto pooled = community_feature_sets(f, {f[0].mcc}, one);
  ASSERT_EQ(pooled.size(), 1u);
  EXPECT_EQ(pooled[0].value, f[0].value);

  // two categories with equal weight pool to the midpoint
  auto b = f;
  b[0].mcc = 2000;
  b[0].num[0] = 60 * b[0].den[0];
  b[0].value[0] = 60;
  std::vector<FeatureSet> both{f[0], b[0]};
  CommunityResult pair{{0, 0}, 1, 0};
  EXPECT_NEAR(community_feature_sets(both, {f[0].mcc, 2000}, pair)[0].age(), 45.0, 1e-12);
}

TEST(KMeans, ThreeTripletsRecovered) {
  std::vector<Point> pts{{0, 0, 0}, {0.1, 0, 0}, {0, 0.1, 0}, {10, 10, 10}, {10.1, 10, 10},
                         {10, 10.1, 10}, {-10, 10, 0}, {-10.1, 10, 0}, {-10, 10.1, 0}};
  KMeansOptions opt;
  opt.k_max = 5;
  auto s = kmeans_with_selection(pts, opt);
  ASSERT_TRUE(s.best_db && s.best_ch && s.best_gap);
  EXPECT_EQ(*s.best_db, 3);
  EXPECT_EQ(*s.best_ch, 3);
  EXPECT_EQ(*s.best_gap, 3);
  const auto& l = *s.labels_for(3);
  for (int b = 0; b < 3; ++b) {
    EXPECT_EQ(l[3 * b], l[3 * b + 1]);
    EXPECT_EQ(l[3 * b], l[3 * b + 2]);
  }
  EXPECT_NE(l[0], l[3]);
  EXPECT_NE(l[3], l[6]);
}

TEST(KMeans, IdenticalPointsLeaveCriteriaUndefined) {
  std::vector<Point> pts(10, Point{1, 2, 3});
  KMeansOptions opt;
  opt.k_max = 3;
  auto s = kmeans_with_selection(pts, opt);
  EXPECT_FALSE(s.best_db);
  EXPECT_FALSE(s.diagnostics.empty());
}

TEST(KMeans, RestartsNeverWorse) {
  auto pc = planted_clusters(5, 30, 3, 4.0, 1.0, 2);
  Rng a(1), b(1);
  auto one = kmeans(pc.points, 5, a, 1);
  auto ten = kmeans(pc.points, 5, b, 10);
  EXPECT_LE(ten.inertia, one.inertia + 1e-9);
}

TEST(Pearson, LinearAndIndependent) {
  std::vector<double> x, y, z;
  Rng rng(4);
  std::normal_distribution<double> g;
  for (int i = 0; i < 5000; ++i) {
    x.push_back(g(rng));
    y.push_back(3 * x.back() - 1);
    z.push_back(g(rng));
  }
  auto lin = pearson(x, y);
  EXPECT_NEAR(lin.r, 1.0, 1e-12);
  EXPECT_EQ(lin.p_value, 0.0);
  auto ind = pearson(x, z);
  EXPECT_LT(std::abs(ind.r), 0.1);
  EXPECT_GT(ind.p_value, 0.0);
  std::vector<double> flat(5000, 1.0);
  EXPECT_FALSE(pearson(x, flat).defined());
}

TEST(FeatureCorrelations, RecoversPlantedAgeSeg) {
  auto fp = feature_population(271, 200, 0.42, 9, 17);
  auto fc = feature_correlations(average_feature_set(fp.table, fp.profiles, fp.partition));
  ASSERT_EQ(fc[0].pair, "age,seg");
  EXPECT_NEAR(fc[0].result.r, 0.42, 0.05);
  EXPECT_LT(fc[0].result.p_value, 1e-6);
}
