#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "socioscope/spending.hpp"
#include "socioscope/synth.hpp"

using namespace socioscope;

namespace {

EgoProfile spender(const std::string& id, std::map<int, Cents> pcg) {
  auto p = empty_profile(id, CategoryDirectory::builtin());
  for (auto [k, c] : pcg) p.pcg_spend[static_cast<std::size_t>(k)] = c;
  p.monthly_spend[0] = 1;
  return p;
}

ClassPartition classes(const std::map<UserId, int, IdLess>& a, int n) { return ClassPartition::from_assignment(a, n); }

}  // namespace

TEST(SpendingVectors, SingleGroup) {
  const int restaurants = *CategoryDirectory::builtin().pcg_of(5812);
  Profiles ps{{"u", spender("u", {{restaurants, 500}})}};
  auto sv = spending_vectors(ps);
  const auto& v = sv.vectors.at("u");
  for (std::size_t k = 0; k < kNonCashPcgCount; ++k)
    EXPECT_EQ(v.values[k], static_cast<int>(k) + 1 == restaurants ? 1.0 : 0.0);
  EXPECT_EQ(v.cash_fraction, 0.0);
}

TEST(SpendingVectors, EvenSplitAndCashShare) {
  Profiles ps{{"a", spender("a", {{3, 100}, {7, 100}})}, {"b", spender("b", {{0, 700}, {2, 200}, {5, 100}})}};
  auto sv = spending_vectors(ps);
  EXPECT_DOUBLE_EQ(sv.vectors.at("a").values[2], 0.5);
  EXPECT_DOUBLE_EQ(sv.vectors.at("a").values[6], 0.5);
  const auto& b = sv.vectors.at("b");
  EXPECT_DOUBLE_EQ(b.cash_fraction, 0.7);
  EXPECT_DOUBLE_EQ(b.values[1], 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(b.values[4], 1.0 / 3.0);
  // the 17-group view sums to one
  auto full = subset_values(b, Subset::Full);
  double s = 0;
  for (double x : full) s += x;
  EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(SpendingVectors, CashOnlyUserHasNoVector) {
  Profiles ps{{"c", spender("c", {{0, 100}})}};
  auto sv = spending_vectors(ps);
  EXPECT_TRUE(sv.vectors.empty());
  EXPECT_EQ(sv.diagnostics.size(), 1u);
}

TEST(Subsets, NamesRoundTrip) {
  for (auto s : {Subset::NonCash, Subset::Cash, Subset::Full}) EXPECT_EQ(parse_subset(subset_name(s)), s);
  EXPECT_THROW(parse_subset("k3"), Error);
}

TEST(Shares, OneClassOwnsEverything) {
  Profiles ps{{"a", spender("a", {{1, 10}, {4, 20}})}, {"b", spender("b", {{1, 5}})}};
  auto t = class_share_distribution(ps, classes({{"a", 1}, {"b", 1}}, 1));
  ASSERT_EQ(t.pcgs.size(), 2u);  // zero-spend groups omitted
  for (const auto& row : t.shares) EXPECT_EQ(row[0], 1.0);
}

TEST(Shares, ThirtySeventy) {
  Profiles ps{{"a", spender("a", {{6, 30}})}, {"b", spender("b", {{6, 70}})}};
  auto t = class_share_distribution(ps, classes({{"a", 1}, {"b", 2}}, 2));
  ASSERT_EQ(t.pcgs, std::vector<int>{6});
  EXPECT_DOUBLE_EQ(t.shares[0][0], 0.3);
  EXPECT_DOUBLE_EQ(t.shares[0][1], 0.7);
}

TEST(Shares, PlantedFiveFoldAirlineSpend) {
  const auto airline_group = CategoryDirectory::builtin().pcg_of(4511);
  ASSERT_TRUE(airline_group);
  const int airlines = *airline_group;
  Rng rng(11);
  std::gamma_distribution<double> noise(20.0, 1.0 / 20.0);
  Profiles ps;
  std::map<UserId, int, IdLess> a;
  for (int i = 0; i < 4000; ++i) {
    const int cls = i % 2 ? 9 : 1;
    const double airline = (cls == 9 ? 500.0 : 100.0) * noise(rng);
    auto id = std::to_string(i);
    ps.emplace(id, spender(id, {{airlines, std::llround(airline * 100)}, {1, 100000}}));
    a[id] = cls;
  }
  auto t = class_share_distribution(ps, classes(a, 9), true);
  std::size_t row = 0;
  while (t.pcgs[row] != airlines) ++row;
  EXPECT_NEAR(t.shares[row][8] / t.shares[row][0], 5.0, 0.2);
}

TEST(Distance, IdentityAndOrthogonal) {
  Profiles ps{{"a", spender("a", {{1, 10}})}, {"b", spender("b", {{1, 99}})}, {"c", spender("c", {{2, 5}})}};
  auto sv = spending_vectors(ps);
  auto d = class_distance_matrix(sv, classes({{"a", 1}, {"b", 2}, {"c", 3}}, 3), Subset::NonCash);
  EXPECT_EQ(d(1, 2), 0.0);
  EXPECT_DOUBLE_EQ(d(1, 3), std::sqrt(2.0));
  EXPECT_TRUE(d.symmetric());
  EXPECT_THROW(class_distance_matrix(sv, classes({{"a", 1}, {"b", 1}}, 2), Subset::NonCash), Error);
}

TEST(Distance, SmoothGradientGrowsAwayFromDiagonal) {
  SynthSpec spec;
  spec.n_users = 100000;
  spec.homophily = 0;
  spec.mean_degree = 1;
  spec.pareto_alpha = 2.5;
  spec.seed = 21;
  auto pop = generate_population(spec);
  auto d = class_distance_matrix(planted_spending_vectors(pop), pop.partition, Subset::NonCash);
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      if (j > i + 1) {
        EXPECT_GT(d(i, j), d(i, j - 1)) << i << "," << j;
      }
      if (j < i - 1) {
        EXPECT_GT(d(i, j), d(i, j + 1)) << i << "," << j;
      }
    }
}

TEST(Dispersion, IdenticalUsersAndTwoPoints) {
  Profiles ps{{"a", spender("a", {{1, 10}})}, {"b", spender("b", {{1, 10}})},
              {"c", spender("c", {{1, 10}})}, {"d", spender("d", {{2, 10}})}};
  auto sv = spending_vectors(ps);
  auto s = class_dispersion(sv, classes({{"a", 1}, {"b", 1}, {"c", 2}, {"d", 2}}, 2), Subset::NonCash);
  EXPECT_EQ(s[0].sigma, 0.0);
  // (1,0) and (0,1) sit sqrt(0.5) from their mean
  EXPECT_DOUBLE_EQ(s[1].sigma, std::sqrt(0.5));
  auto single = class_dispersion(sv, classes({{"a", 1}, {"b", 2}, {"c", 2}}, 2), Subset::NonCash);
  EXPECT_TRUE(single[0].singleton);
  EXPECT_EQ(single[0].sigma, 0.0);
}

TEST(Entropy, KnownValues) {
  std::vector<double> one(16, 0.0), uniform(16, 1.0 / 16), half(16, 0.0);
  one[3] = 1;
  half[0] = half[1] = 0.5;
  EXPECT_EQ(shannon_entropy(one), 0.0);
  EXPECT_NEAR(shannon_entropy(uniform), std::log(16.0), 1e-12);
  EXPECT_NEAR(shannon_entropy(half), std::log(2.0), 1e-12);
}
