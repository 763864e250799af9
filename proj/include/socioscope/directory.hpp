#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/detail/mcc_table.hpp"

namespace socioscope {

/// Number of retained purchase category groups; slot 0 is cash and transfers.
inline constexpr std::size_t kActivePcgCount = 17;
/// Length of a spending vector (retained groups minus cash).
inline constexpr std::size_t kNonCashPcgCount = kActivePcgCount - 1;

inline std::vector<std::string> default_active_pcgs() {
  return {"Service Providers",    "Retail Stores",     "High Risk Personal Retail",
          "Restaurants",          "Gas Stations",      "Telecom",
          "Mail Phone Order",     "Automobiles",       "Professional Services",
          "Wholesale Trade",      "Clothing Stores",   "Hotels and Motels",
          "Airlines",             "Education",         "Miscellaneous Stores",
          "Entertainment",        "Business Services"};
}

/// Merchant category codes, their names, and their purchase category groups (PCGs).
///
/// PCG indices are stable: the 17 retained groups come first in the order given at
/// construction (index 0 is cash/transfers), the dropped groups follow in name order.
class CategoryDirectory {
 public:
  struct Entry {
    std::string name;
    int pcg;
  };

  CategoryDirectory() = default;

  /// rows: (mcc, name, pcg label).
  static CategoryDirectory from_rows(const std::vector<std::tuple<int, std::string, std::string>>& rows,
                                     const std::vector<std::string>& active = default_active_pcgs()) {
    if (active.size() != kActivePcgCount) {
      throw Error("active PCG list must name exactly " + std::to_string(kActivePcgCount) + " groups");
    }
    CategoryDirectory d;
    d.pcg_names_ = active;
    std::set<std::string> seen(active.begin(), active.end());
    if (seen.size() != active.size()) throw Error("duplicate active PCG");
    std::set<std::string> extra;
    for (const auto& [mcc, name, pcg] : rows) {
      if (!seen.count(pcg)) extra.insert(pcg);
    }
    d.pcg_names_.insert(d.pcg_names_.end(), extra.begin(), extra.end());
    for (const auto& [mcc, name, pcg] : rows) {
      auto idx = d.pcg_index(pcg);
      if (!d.entries_.emplace(mcc, Entry{name, *idx}).second) {
        throw Error("MCC " + std::to_string(mcc) + " listed twice");
      }
    }
    for (std::size_t k = 0; k < kActivePcgCount; ++k) {
      bool used = std::any_of(d.entries_.begin(), d.entries_.end(),
                              [&](const auto& e) { return e.second.pcg == static_cast<int>(k); });
      if (!used) throw Error("active PCG '" + active[k] + "' has no MCC");
    }
    return d;
  }

  /// The shipped directory (data/mcc_directory.csv).
  static const CategoryDirectory& builtin() {
    static const CategoryDirectory d = [] {
      std::vector<std::tuple<int, std::string, std::string>> rows;
      for (const auto& r : detail::kMccTable) rows.emplace_back(r.mcc, std::string(r.name), std::string(r.pcg));
      return from_rows(rows);
    }();
    return d;
  }

  /// Reads `mcc,name,pcg`.
  static CategoryDirectory from_csv(std::istream& in, const std::vector<std::string>& active = default_active_pcgs()) {
    csv::Reader reader(in, {"mcc", "name", "pcg"});
    std::vector<std::tuple<int, std::string, std::string>> rows;
    std::vector<std::string> f;
    while (reader.next(f)) {
      int mcc = 0;
      if (!csv::parse_number(f[0], mcc)) throw ParseError(reader.line(), "bad mcc '" + f[0] + "'");
      rows.emplace_back(mcc, std::string(csv::trim(f[1])), std::string(csv::trim(f[2])));
    }
    return from_rows(rows, active);
  }

  static CategoryDirectory from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open MCC directory '" + path + "'");
    return from_csv(in);
  }

  bool contains(int mcc) const { return entries_.count(mcc) > 0; }

  std::optional<int> pcg_of(int mcc) const {
    auto it = entries_.find(mcc);
    if (it == entries_.end()) return std::nullopt;
    return it->second.pcg;
  }

  const std::string& mcc_name(int mcc) const {
    auto it = entries_.find(mcc);
    if (it == entries_.end()) throw Error("unknown MCC " + std::to_string(mcc));
    return it->second.name;
  }

  std::size_t pcg_count() const { return pcg_names_.size(); }
  const std::string& pcg_name(int pcg) const { return pcg_names_.at(static_cast<std::size_t>(pcg)); }

  std::optional<int> pcg_index(std::string_view name) const {
    auto it = std::find(pcg_names_.begin(), pcg_names_.end(), name);
    if (it == pcg_names_.end()) return std::nullopt;
    return static_cast<int>(it - pcg_names_.begin());
  }

  static constexpr int cash_pcg() { return 0; }
  static bool is_active(int pcg) { return pcg >= 0 && pcg < static_cast<int>(kActivePcgCount); }
  bool is_cash(int mcc) const {
    auto p = pcg_of(mcc);
    return p && *p == cash_pcg();
  }

  /// Position of a retained non-cash PCG inside a spending vector, or -1.
  static int noncash_slot(int pcg) {
    return (pcg >= 1 && pcg < static_cast<int>(kActivePcgCount)) ? pcg - 1 : -1;
  }

  std::vector<int> mccs() const {
    std::vector<int> out;
    out.reserve(entries_.size());
    for (const auto& [mcc, e] : entries_) out.push_back(mcc);
    return out;
  }

  std::vector<int> mccs_in(int pcg) const {
    std::vector<int> out;
    for (const auto& [mcc, e] : entries_)
      if (e.pcg == pcg) out.push_back(mcc);
    return out;
  }

 private:
  std::vector<std::string> pcg_names_;
  std::map<int, Entry> entries_;
};

}  // namespace socioscope
