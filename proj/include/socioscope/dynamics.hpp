#pragma once

#include <array>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/socio.hpp"

namespace socioscope {

using WeekArray = std::array<double, kDaysPerWeek>;

/// Share of a user's in-scope spending per weekday (Monday = 0); sums to one.
struct WeeklyVector {
  WeekArray values{};
  double weight = 0;  // in-scope spend, currency units
};

using WeeklyVectors = std::map<UserId, WeeklyVector, IdLess>;

/// Set of PCGs a weekly vector is computed over. An empty list means every PCG.
struct WeeklyScope {
  std::string name;
  std::vector<int> pcgs;

  static WeeklyScope global() { return {"global", {}}; }
  static WeeklyScope single(int pcg, std::string name) { return {std::move(name), {pcg}}; }
  static WeeklyScope noncash() {
    WeeklyScope s{"k2-17", {}};
    for (int k = 1; k < static_cast<int>(kActivePcgCount); ++k) s.pcgs.push_back(k);
    return s;
  }
  static WeeklyScope cash() { return {"k1", {CategoryDirectory::cash_pcg()}}; }
};

/// w_u(d) per user; users with no spend in scope are left out.
inline WeeklyVectors weekly_vectors(const Profiles& profiles, const WeeklyScope& scope) {
  WeeklyVectors out;
  for (const auto& [id, p] : profiles) {
    std::array<Cents, kDaysPerWeek> sums{};
    auto add = [&](std::size_t k) {
      for (int d = 0; d < kDaysPerWeek; ++d) sums[static_cast<std::size_t>(d)] += p.weekly_spend[k][static_cast<std::size_t>(d)];
    };
    if (scope.pcgs.empty()) {
      for (std::size_t k = 0; k < p.weekly_spend.size(); ++k) add(k);
    } else {
      for (int k : scope.pcgs) add(static_cast<std::size_t>(k));
    }
    Cents total = 0;
    for (Cents c : sums) total += c;
    if (total <= 0) continue;
    WeeklyVector w;
    for (std::size_t d = 0; d < sums.size(); ++d) w.values[d] = static_cast<double>(sums[d]) / static_cast<double>(total);
    w.weight = to_units(total);
    out.emplace(id, w);
  }
  return out;
}

enum class Grouping { Class, Age, Gender };

inline Grouping parse_grouping(std::string_view s) {
  if (s == "class") return Grouping::Class;
  if (s == "age") return Grouping::Age;
  if (s == "gender") return Grouping::Gender;
  throw Error("unknown grouping '" + std::string(s) + "' (want class, age or gender)");
}

struct GroupWeeklyProfile {
  int key = 0;  // class index, bracket lower age, or gender code
  std::string label;
  WeekArray values{};
  std::size_t members = 0;
};

struct GroupProfiles {
  std::vector<GroupWeeklyProfile> groups;
  std::vector<std::string> diagnostics;
};

namespace detail {
inline std::optional<int> group_key(const UserId& id, const Profiles& profiles, const ClassPartition& partition,
                                    Grouping g) {
  if (g == Grouping::Class) return partition.class_of(id);
  auto it = profiles.find(id);
  if (it == profiles.end()) return std::nullopt;
  const auto& p = it->second;
  if (g == Grouping::Gender) return p.gender;
  if (!p.age || *p.age < kPyramidMinAge || *p.age >= kPyramidMaxAge) return std::nullopt;
  return kPyramidMinAge + (*p.age - kPyramidMinAge) / kBracketYears * kBracketYears;
}

inline std::vector<std::pair<int, std::string>> group_keys(Grouping g, const ClassPartition& partition) {
  std::vector<std::pair<int, std::string>> keys;
  switch (g) {
    case Grouping::Class:
      for (int j = 1; j <= partition.n_classes(); ++j) keys.emplace_back(j, "s" + std::to_string(j));
      break;
    case Grouping::Gender:
      keys = {{0, "female"}, {1, "male"}};
      break;
    case Grouping::Age:
      for (int a = kPyramidMinAge; a < kPyramidMaxAge; a += kBracketYears)
        keys.emplace_back(a, std::to_string(a) + "-" + std::to_string(a + kBracketYears - 1));
      break;
  }
  return keys;
}
}  // namespace detail

/// Mean weekly vector per group. Each user counts once unless spend_weighted is set.
inline GroupProfiles group_profiles(const WeeklyVectors& vectors, const Profiles& profiles,
                                    const ClassPartition& partition, Grouping grouping, bool spend_weighted = false) {
  std::map<int, std::pair<std::array<long double, kDaysPerWeek>, long double>> acc;
  std::map<int, std::size_t> counts;
  for (const auto& [id, w] : vectors) {
    auto key = detail::group_key(id, profiles, partition, grouping);
    if (!key) continue;
    auto& [sum, weight] = acc[*key];
    const long double wt = spend_weighted ? w.weight : 1.0L;
    for (std::size_t d = 0; d < kDaysPerWeek; ++d) sum[d] += wt * w.values[d];
    weight += wt;
    ++counts[*key];
  }
  GroupProfiles out;
  for (const auto& [key, label] : detail::group_keys(grouping, partition)) {
    auto it = acc.find(key);
    if (it == acc.end() || it->second.second <= 0) {
      out.diagnostics.push_back("group " + label + " is empty, omitted");
      continue;
    }
    GroupWeeklyProfile g;
    g.key = key;
    g.label = label;
    g.members = counts[key];
    for (std::size_t d = 0; d < kDaysPerWeek; ++d) g.values[d] = static_cast<double>(it->second.first[d] / it->second.second);
    out.groups.push_back(g);
  }
  return out;
}

struct PcgClassProfile {
  int pcg = 0;
  int cls = 0;
  WeekArray values{};
  std::size_t members = 0;
};

/// Class-averaged weekly vectors for every retained PCG; empty (PCG, class) cells are omitted.
inline std::vector<PcgClassProfile> per_pcg_profiles(const Profiles& profiles, const ClassPartition& partition,
                                                     bool spend_weighted = false) {
  std::vector<PcgClassProfile> out;
  for (int k = 0; k < static_cast<int>(kActivePcgCount); ++k) {
    auto vectors = weekly_vectors(profiles, WeeklyScope::single(k, std::to_string(k)));
    if (vectors.empty()) continue;
    auto groups = group_profiles(vectors, profiles, partition, Grouping::Class, spend_weighted);
    for (const auto& g : groups.groups) out.push_back({k, g.key, g.values, g.members});
  }
  return out;
}

/// Rows `group,d0..d6`.
inline void write_group_profiles(std::ostream& out, const GroupProfiles& g) {
  out << "group,d0,d1,d2,d3,d4,d5,d6\n";
  for (const auto& p : g.groups) {
    out << csv::escape(p.label);
    for (double v : p.values) out << ',' << csv::format(v);
    out << '\n';
  }
}

/// One block per PCG: rows `pcg,group,d0..d6`.
inline void write_pcg_profiles(std::ostream& out, const std::vector<PcgClassProfile>& rows,
                               const CategoryDirectory& directory) {
  out << "pcg,group,d0,d1,d2,d3,d4,d5,d6\n";
  for (const auto& r : rows) {
    out << csv::escape(directory.pcg_name(r.pcg)) << ",s" << r.cls;
    for (double v : r.values) out << ',' << csv::format(v);
    out << '\n';
  }
}

}  // namespace socioscope
