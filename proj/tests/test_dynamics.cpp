#include <gtest/gtest.h>

#include <numeric>
#include <sstream>

#include "socioscope/dynamics.hpp"
#include "socioscope/synth.hpp"

using namespace socioscope;

namespace {

EgoProfile shopper(const std::string& id, std::size_t pcg, std::array<Cents, 7> days) {
  auto p = empty_profile(id, CategoryDirectory::builtin());
  for (std::size_t d = 0; d < 7; ++d) {
    p.weekly_spend[pcg][d] = days[d];
    p.pcg_spend[pcg] += days[d];
  }
  return p;
}

double total(const WeekArray& w) { return std::accumulate(w.begin(), w.end(), 0.0); }

ClassPartition one_class(const Profiles& ps) {
  std::map<UserId, int, IdLess> a;
  for (const auto& [id, p] : ps) a[id] = 1;
  return ClassPartition::from_assignment(a, 1);
}

}  // namespace

TEST(WeeklyVectors, AllFriday) {
  Profiles ps{{"u", shopper("u", 3, {0, 0, 0, 0, 900, 0, 0})}};
  auto w = weekly_vectors(ps, WeeklyScope::global()).at("u");
  EXPECT_EQ(w.values[4], 1.0);
  EXPECT_EQ(total(w.values), 1.0);
  EXPECT_DOUBLE_EQ(w.weight, 9.0);
}

TEST(WeeklyVectors, UniformWeek) {
  Profiles ps{{"u", shopper("u", 3, {5, 5, 5, 5, 5, 5, 5})}};
  for (double v : weekly_vectors(ps, WeeklyScope::global()).at("u").values) EXPECT_DOUBLE_EQ(v, 1.0 / 7);
}

TEST(WeeklyVectors, FridayAndSunday) {
  Profiles ps{{"u", shopper("u", 3, {0, 0, 0, 0, 1000, 0, 3000})}};
  auto w = weekly_vectors(ps, WeeklyScope::global()).at("u");
  EXPECT_DOUBLE_EQ(w.values[4], 0.25);
  EXPECT_DOUBLE_EQ(w.values[6], 0.75);
}

TEST(WeeklyVectors, ScopeFiltersGroups) {
  Profiles ps{{"u", shopper("u", 0, {0, 100, 0, 0, 0, 0, 0})}};
  EXPECT_TRUE(weekly_vectors(ps, WeeklyScope::noncash()).empty());
  EXPECT_EQ(weekly_vectors(ps, WeeklyScope::cash()).at("u").values[1], 1.0);
}

TEST(GroupProfiles, SingleMemberEqualsUser) {
  Profiles ps{{"u", shopper("u", 2, {1, 2, 3, 4, 5, 6, 7})}};
  auto wv = weekly_vectors(ps, WeeklyScope::global());
  auto g = group_profiles(wv, ps, one_class(ps), Grouping::Class);
  ASSERT_EQ(g.groups.size(), 1u);
  EXPECT_EQ(g.groups[0].values, wv.at("u").values);
  EXPECT_EQ(g.groups[0].label, "s1");
}

TEST(GroupProfiles, TwoMembersAverage) {
  Profiles ps{{"a", shopper("a", 2, {100, 0, 0, 0, 0, 0, 0})}, {"b", shopper("b", 2, {0, 0, 0, 0, 0, 0, 9999})}};
  auto g = group_profiles(weekly_vectors(ps, WeeklyScope::global()), ps, one_class(ps), Grouping::Class);
  EXPECT_DOUBLE_EQ(g.groups[0].values[0], 0.5);
  EXPECT_DOUBLE_EQ(g.groups[0].values[6], 0.5);
  EXPECT_EQ(g.groups[0].members, 2u);
}

TEST(GroupProfiles, IdenticalMembersGiveTheirProfile) {
  Profiles ps;
  for (int i = 0; i < 5; ++i) {
    auto id = std::to_string(i);
    ps.emplace(id, shopper(id, 4, {10, 20, 30, 0, 40, 0, 0}));
  }
  auto wv = weekly_vectors(ps, WeeklyScope::global());
  auto g = group_profiles(wv, ps, one_class(ps), Grouping::Class);
  for (std::size_t d = 0; d < 7; ++d) EXPECT_NEAR(g.groups[0].values[d], wv.at("0").values[d], 1e-15);
}

TEST(GroupProfiles, InvariantUnderOrderAndScale) {
  Rng rng(5);
  Profiles a, b;
  std::vector<std::pair<std::string, std::array<Cents, 7>>> users;
  for (int i = 0; i < 50; ++i) {
    std::array<Cents, 7> days{};
    for (auto& d : days) d = static_cast<Cents>(uniform_index(rng, 1000));
    days[0] += 1;
    users.emplace_back("u" + std::to_string(i), days);
  }
  for (const auto& [id, days] : users) a.emplace(id, shopper(id, 1, days));
  // reversed ids and every amount scaled by 7
  for (std::size_t i = 0; i < users.size(); ++i) {
    auto days = users[i].second;
    for (auto& d : days) d *= 7;
    auto id = "v" + std::to_string(users.size() - i);
    b.emplace(id, shopper(id, 1, days));
  }
  auto ga = group_profiles(weekly_vectors(a, WeeklyScope::global()), a, one_class(a), Grouping::Class);
  auto gb = group_profiles(weekly_vectors(b, WeeklyScope::global()), b, one_class(b), Grouping::Class);
  for (std::size_t d = 0; d < 7; ++d) EXPECT_NEAR(ga.groups[0].values[d], gb.groups[0].values[d], 1e-12);
  EXPECT_NEAR(total(ga.groups[0].values), 1.0, 1e-12);
}

TEST(GroupProfiles, AgeAndGenderGroupings) {
  auto p = shopper("u", 2, {1, 0, 0, 0, 0, 0, 0});
  p.age = 33;
  p.gender = 0;
  auto q = shopper("v", 2, {0, 1, 0, 0, 0, 0, 0});
  q.age = 71;
  q.gender = 1;
  Profiles ps{{"u", p}, {"v", q}};
  auto wv = weekly_vectors(ps, WeeklyScope::global());
  auto g = group_profiles(wv, ps, one_class(ps), Grouping::Gender);
  ASSERT_EQ(g.groups.size(), 2u);
  EXPECT_EQ(g.groups[0].label, "female");
  EXPECT_EQ(g.groups[0].values[0], 1.0);
  auto ages = group_profiles(wv, ps, one_class(ps), Grouping::Age);
  EXPECT_FALSE(ages.diagnostics.empty());  // empty brackets reported
  EXPECT_THROW(parse_grouping("height"), Error);
}

TEST(GroupProfiles, CsvHasSevenDayColumns) {
  Profiles ps{{"u", shopper("u", 2, {1, 2, 3, 4, 5, 6, 7})}};
  auto g = group_profiles(weekly_vectors(ps, WeeklyScope::global()), ps, one_class(ps), Grouping::Class);
  std::ostringstream out;
  write_group_profiles(out, g);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')), "group,d0,d1,d2,d3,d4,d5,d6");
}

TEST(PerPcg, WeekendGroupSeparatesFromWeekday) {
  Profiles ps;
  for (int i = 0; i < 10; ++i) {
    auto id = std::to_string(i);
    auto p = shopper(id, 5, {0, 0, 0, 0, 0, 300, 300});
    p.weekly_spend[8] = {100, 100, 100, 100, 100, 0, 0};
    p.pcg_spend[8] = 500;
    ps.emplace(id, p);
  }
  auto rows = per_pcg_profiles(ps, one_class(ps));
  ASSERT_EQ(rows.size(), 2u);  // groups without spend are absent
  EXPECT_EQ(rows[0].pcg, 5);
  EXPECT_DOUBLE_EQ(rows[0].values[5] + rows[0].values[6], 1.0);
  EXPECT_EQ(rows[1].pcg, 8);
  EXPECT_EQ(rows[1].values[5] + rows[1].values[6], 0.0);
}

TEST(WeeklyCalibration, PlantedFridayGradientRecovered) {
  auto planted = friday_gradient_profiles(9);
  auto wp = weekly_population(planted, 2000, 60, 3);
  auto g = group_profiles(weekly_vectors(wp.profiles, WeeklyScope::noncash()), wp.profiles, wp.partition, Grouping::Class);
  ASSERT_EQ(g.groups.size(), 9u);
  for (std::size_t j = 0; j < 9; ++j) {
    EXPECT_NEAR(total(g.groups[j].values), 1.0, 1e-12);
    EXPECT_NEAR(g.groups[j].values[4], planted[j][4], 0.01) << "class " << j + 1;
  }
}
