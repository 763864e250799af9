#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "socioscope/ingest.hpp"
#include "socioscope/socio.hpp"

using namespace socioscope;

namespace {

EgoProfile with_months(const std::string& id, std::map<int, Cents> months) {
  auto p = empty_profile(id, CategoryDirectory::builtin());
  p.monthly_spend = std::move(months);
  return p;
}

std::vector<double> pareto(std::size_t n, double a, std::uint64_t seed) {
  Rng rng(seed);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(1 - u(rng), -1 / a);
  return v;
}

// direct O(n^2) mean absolute difference
double gini_pairs(const std::vector<double>& x) {
  long double s = 0, t = 0;
  for (double a : x) {
    t += a;
    for (double b : x) s += std::abs(a - b);
  }
  const double n = static_cast<double>(x.size());
  return static_cast<double>(s / (2 * n * t));
}

}  // namespace

TEST(Amp, ActiveMonthsOnly) {
  Profiles ps;
  // months with zero spend are simply absent, so (100, 0, 50) has two active months
  ps.emplace("a", with_months("a", {{1, 10000}, {3, 5000}}));
  ps.emplace("b", with_months("b", {{5, 4000}}));
  std::map<int, Cents> eight;
  for (int m = 0; m < 8; ++m) eight[m] = 1000;
  ps.emplace("c", with_months("c", eight));
  ps.emplace("d", with_months("d", {}));
  auto amp = compute_amp(ps);
  ASSERT_EQ(amp.size(), 3u);
  std::map<std::string, double> got;
  for (const auto& r : amp.rows()) got[r.user_id] = r.amp;
  EXPECT_DOUBLE_EQ(got["a"], 75.0);
  EXPECT_DOUBLE_EQ(got["b"], 40.0);
  EXPECT_DOUBLE_EQ(got["c"], 10.0);
  EXPECT_EQ(amp.diagnostics.size(), 1u);
}

TEST(Gini, EqualAndSingleOwner) {
  std::vector<double> eq(37, 4.2);
  EXPECT_EQ(gini_sorted(eq), 0.0);
  for (std::size_t n : {2u, 3u, 10u, 1000u}) {
    std::vector<double> one(n, 0.0);
    one.back() = 5;
    EXPECT_DOUBLE_EQ(gini_sorted(one), static_cast<double>(n - 1) / n) << n;
  }
}

TEST(Gini, MatchesPairwiseFormula) {
  for (std::uint64_t s = 0; s < 5; ++s) {
    auto x = pareto(300, 1.3 + 0.2 * s, s);
    auto sum = lorenz_and_gini(AmpTable::from_values(x));
    EXPECT_NEAR(sum.gini, gini_pairs(x), 1e-12);
  }
}

TEST(Gini, ScaleInvariant) {
  auto x = pareto(2000, 1.7, 4);
  auto y = x;
  for (auto& v : y) v *= 37.5;
  EXPECT_NEAR(lorenz_and_gini(AmpTable::from_values(x)).gini, lorenz_and_gini(AmpTable::from_values(y)).gini, 1e-12);
}

TEST(Gini, ParetoOnePointFiveIsAboutHalf) {
  auto x = pareto(10000, 1.5, 99);
  EXPECT_NEAR(lorenz_and_gini(AmpTable::from_values(x)).gini, 0.5, 0.02);
}

TEST(Lorenz, EndpointsAndMonotone) {
  auto x = pareto(500, 2.0, 3);
  auto s = lorenz_and_gini(AmpTable::from_values(x));
  ASSERT_EQ(s.lorenz.size(), 501u);
  EXPECT_EQ(s.lorenz.front(), std::make_pair(0.0, 0.0));
  EXPECT_DOUBLE_EQ(s.lorenz.back().first, 1.0);
  EXPECT_NEAR(s.lorenz.back().second, 1.0, 1e-12);
  for (std::size_t i = 1; i < s.lorenz.size(); ++i) {
    EXPECT_GE(s.lorenz[i].second, s.lorenz[i - 1].second);
    EXPECT_LE(s.lorenz[i].second, s.lorenz[i].first + 1e-12);  // below the diagonal
  }
}

TEST(Hill, RecoversExponentFromFullSample) {
  auto x = pareto(100000, 2.0, 5);
  EXPECT_NEAR(hill_estimator(x, 1.0), 2.0, 0.05);
}

TEST(Hill, DegenerateTailsThrow) {
  std::vector<double> constant(1000, 3.0);
  EXPECT_THROW(hill_estimator(constant, 0.1), Error);
  auto x = pareto(50, 1.5, 1);
  EXPECT_THROW(hill_estimator(x, 0.1), Error);  // 5 tail samples
}

TEST(Partition, ExactSplit) {
  auto p = partition_classes(AmpTable::from_values(std::vector<double>{1, 1, 2}), 2);
  EXPECT_EQ(p.size(1), 2u);
  EXPECT_EQ(p.size(2), 1u);
  EXPECT_DOUBLE_EQ(p.class_sum(1), 2.0);
  EXPECT_DOUBLE_EQ(p.class_sum(2), 2.0);
  EXPECT_EQ(*p.class_of("2"), 2);
}

TEST(Partition, EqualValuesSplitEvenly) {
  auto p = partition_classes(AmpTable::from_values(std::vector<double>(8, 5.0)), 4);
  for (int j = 1; j <= 4; ++j) EXPECT_EQ(p.size(j), 2u);
  EXPECT_EQ(p.boundaries().size(), 5u);
}

TEST(Partition, HeavyTailProperties) {
  auto x = pareto(20000, 1.4, 8);
  auto amp = AmpTable::from_values(x);
  auto p = partition_classes(amp, 9);
  const double pmax = *std::max_element(x.begin(), x.end());
  std::size_t total = 0;
  for (int j = 1; j <= 9; ++j) {
    EXPECT_LE(std::abs(p.class_sum(j) - amp.total() / 9), pmax);
    if (j > 1) {
      EXPECT_LE(p.size(j), p.size(j - 1));
      EXPECT_GT(p.mean_amp(j), p.mean_amp(j - 1));
    }
    total += p.size(j);
  }
  EXPECT_EQ(total, x.size());
}

TEST(Partition, MoreClassesThanUsersThrows) {
  EXPECT_THROW(partition_classes(AmpTable::from_values(std::vector<double>{1, 2}), 3), Error);
}

TEST(Partition, CsvRoundTrip) {
  auto p = partition_classes(AmpTable::from_values(std::vector<double>{3, 1, 4, 1, 5, 9}), 3);
  std::stringstream s;
  write_partition(s, p);
  auto q = read_partition(s, 3);
  EXPECT_EQ(q.n_classes(), 3);
  EXPECT_EQ(q.assignment(), p.assignment());
  for (int j = 1; j <= 3; ++j) EXPECT_DOUBLE_EQ(q.class_sum(j), p.class_sum(j));
}

TEST(Pyramid, SingleCell) {
  Profiles ps;
  std::map<UserId, int, IdLess> cls;
  for (int i = 0; i < 5; ++i) {
    auto p = with_months(std::to_string(i), {{1, 100}});
    p.age = 27;
    p.gender = 1;
    ps.emplace(p.user_id, p);
    cls[p.user_id] = 1;
  }
  auto t = demographics_pyramid(ps, ClassPartition::from_assignment(cls, 1));
  ASSERT_EQ(t.cells.size(), 1u);
  EXPECT_EQ(t.cells.begin()->first, std::make_tuple(25, 1, 1));
  EXPECT_EQ(t.cells.begin()->second, 5u);
  EXPECT_TRUE(demographics_pyramid({}, ClassPartition::from_assignment({}, 1)).cells.empty());
}
