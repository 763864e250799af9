#pragma once

#include <array>
#include <chrono>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "json.hpp"

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/graph.hpp"

namespace socioscope {

struct TransactionRecord {
  UserId user_id;
  std::int64_t timestamp = 0;  // seconds since epoch, UTC
  Cents amount = 0;
  int mcc = 0;
  bool valid_mcc = true;
};

enum class CommKind { Call, Sms };

struct CommEvent {
  UserId caller;
  UserId callee;
  std::int64_t timestamp = 0;
  CommKind kind = CommKind::Call;
  std::int64_t duration = 0;
};

struct TransactionLog {
  std::vector<TransactionRecord> records;
  std::size_t invalid_mcc_rows = 0;
  std::size_t rejected_rows = 0;
  std::vector<std::string> diagnostics;
};

struct Demographic {
  std::optional<int> age;
  std::optional<int> gender;  // 0 = female, 1 = male
};

using Demographics = std::map<UserId, Demographic, IdLess>;

inline constexpr int kDaysPerWeek = 7;

/// Everything known about one user after aggregation.
struct EgoProfile {
  UserId user_id;
  std::optional<int> age;
  std::optional<int> gender;
  std::map<int, Cents> monthly_spend;      // month index -> m_u(t), all purchases
  std::map<int, Cents> category_spend;     // valid MCC -> m_u^c
  std::map<int, std::int64_t> category_count;
  std::vector<Cents> pcg_spend;            // PCG index -> m_u^k
  std::vector<std::array<Cents, kDaysPerWeek>> weekly_spend;  // PCG index x weekday (Monday = 0)
  Cents invalid_spend = 0;

  /// Months with at least one purchase (|T|_u).
  int active_months() const { return static_cast<int>(monthly_spend.size()); }
  Cents total_spend() const {
    Cents t = 0;
    for (const auto& [m, c] : monthly_spend) t += c;
    return t;
  }
  bool has_demographics() const { return age.has_value() && gender.has_value(); }
};

using Profiles = std::map<UserId, EgoProfile, IdLess>;

// ---------------------------------------------------------------------------
// Calendar helpers

/// Calendar month of a UTC timestamp as year * 12 + (month - 1).
inline int month_index(std::int64_t timestamp) {
  using namespace std::chrono;
  auto days_since = static_cast<long>(timestamp >= 0 ? timestamp / 86400 : (timestamp - 86399) / 86400);
  year_month_day ymd{sys_days{days{days_since}}};
  return static_cast<int>(ymd.year()) * 12 + static_cast<int>(static_cast<unsigned>(ymd.month())) - 1;
}

/// Weekday with Monday = 0 ... Sunday = 6, after shifting by a UTC offset.
inline int weekday_index(std::int64_t timestamp, std::int64_t utc_offset_seconds = 0) {
  using namespace std::chrono;
  std::int64_t t = timestamp + utc_offset_seconds;
  auto days_since = static_cast<long>(t >= 0 ? t / 86400 : (t - 86399) / 86400);
  return static_cast<int>(weekday{sys_days{days{days_since}}}.iso_encoding()) - 1;
}

// ---------------------------------------------------------------------------
// Parsing

/// Parses a non-negative decimal string into cents; extra fraction digits round half up.
/// Returns nullopt for a well-formed negative amount and throws for malformed text.
inline std::optional<Cents> parse_amount(std::string_view s, std::size_t line) {
  s = csv::trim(s);
  if (s.empty()) throw ParseError(line, "empty amount");
  if (s.front() == '-') {
    auto rest = s.substr(1);
    if (rest.empty() || !std::all_of(rest.begin(), rest.end(), [](char c) { return (c >= '0' && c <= '9') || c == '.'; }))
      throw ParseError(line, "malformed amount '" + std::string(s) + "'");
    return std::nullopt;
  }
  auto dot = s.find('.');
  std::string_view whole = s.substr(0, dot);
  std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
  auto digits = [](std::string_view v) {
    return std::all_of(v.begin(), v.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if ((whole.empty() && frac.empty()) || !digits(whole) || !digits(frac) || whole.size() > 15)
    throw ParseError(line, "malformed amount '" + std::string(s) + "'");
  Cents units = 0;
  if (!whole.empty()) csv::parse_number(whole, units);
  Cents cents = 0;
  for (std::size_t i = 0; i < 2; ++i) cents = cents * 10 + (i < frac.size() ? frac[i] - '0' : 0);
  if (frac.size() > 2 && frac[2] >= '5') ++cents;
  return units * 100 + cents;
}

/// Reads `user_id,timestamp,amount,mcc`. Rows with unknown MCCs are kept and flagged;
/// rows with negative amounts are rejected with a diagnostic.
inline TransactionLog parse_transactions(std::istream& in, const CategoryDirectory& directory) {
  csv::Reader reader(in, {"user_id", "timestamp", "amount", "mcc"});
  TransactionLog log;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto line = reader.line();
    TransactionRecord r;
    r.user_id = std::string(csv::trim(f[0]));
    if (r.user_id.empty()) throw ParseError(line, "empty user_id");
    if (!csv::parse_number(f[1], r.timestamp)) throw ParseError(line, "bad timestamp '" + f[1] + "'");
    auto amount = parse_amount(f[2], line);
    if (!csv::parse_number(f[3], r.mcc)) throw ParseError(line, "bad mcc '" + f[3] + "'");
    if (!amount) {
      ++log.rejected_rows;
      log.diagnostics.push_back("line " + std::to_string(line) + ": negative amount, row rejected");
      continue;
    }
    r.amount = *amount;
    r.valid_mcc = directory.contains(r.mcc);
    if (!r.valid_mcc) ++log.invalid_mcc_rows;
    log.records.push_back(std::move(r));
  }
  return log;
}

inline TransactionLog parse_transactions(const std::string& path, const CategoryDirectory& directory) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transactions file '" + path + "'");
  return parse_transactions(in, directory);
}

/// Reads `caller,callee,timestamp,kind,duration`.
inline std::vector<CommEvent> parse_events(std::istream& in) {
  csv::Reader reader(in, {"caller", "callee", "timestamp", "kind", "duration"});
  std::vector<CommEvent> out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto line = reader.line();
    CommEvent e;
    e.caller = std::string(csv::trim(f[0]));
    e.callee = std::string(csv::trim(f[1]));
    if (e.caller.empty() || e.callee.empty()) throw ParseError(line, "empty caller or callee");
    if (!csv::parse_number(f[2], e.timestamp)) throw ParseError(line, "bad timestamp '" + f[2] + "'");
    auto kind = csv::trim(f[3]);
    if (kind == "call") {
      e.kind = CommKind::Call;
    } else if (kind == "sms") {
      e.kind = CommKind::Sms;
    } else {
      throw ParseError(line, "kind must be call or sms, got '" + std::string(kind) + "'");
    }
    if (!csv::parse_number(f[4], e.duration) || e.duration < 0) throw ParseError(line, "bad duration '" + f[4] + "'");
    out.push_back(std::move(e));
  }
  return out;
}

inline std::vector<CommEvent> parse_events(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open events file '" + path + "'");
  return parse_events(in);
}

/// Reads `user_id,age,gender`; empty or NA cells mean unknown.
inline Demographics parse_demographics(std::istream& in) {
  csv::Reader reader(in, {"user_id", "age", "gender"});
  Demographics out;
  std::vector<std::string> f;
  while (reader.next(f)) {
    const auto line = reader.line();
    Demographic d;
    auto cell = [&](const std::string& s, const char* what) -> std::optional<int> {
      auto t = csv::trim(s);
      if (t.empty() || t == "NA") return std::nullopt;
      int v = 0;
      if (!csv::parse_number(t, v)) throw ParseError(line, std::string("bad ") + what + " '" + s + "'");
      return v;
    };
    d.age = cell(f[1], "age");
    d.gender = cell(f[2], "gender");
    if (d.gender && *d.gender != 0 && *d.gender != 1) throw ParseError(line, "gender must be 0 or 1");
    out[std::string(csv::trim(f[0]))] = d;
  }
  return out;
}

inline Demographics parse_demographics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open demographics file '" + path + "'");
  return parse_demographics(in);
}

// ---------------------------------------------------------------------------
// Graph construction

/// Undirected simple graph of everyone who interacted; repeats collapse, self-interactions drop.
inline SocialGraph build_graph(const std::vector<CommEvent>& events) {
  std::vector<std::pair<UserId, UserId>> pairs;
  pairs.reserve(events.size());
  for (const auto& e : events) pairs.emplace_back(e.caller, e.callee);
  return SocialGraph::from_id_pairs(pairs);
}

/// Recursively removes users without at least one outgoing and one incoming event
/// among the survivors, then returns the undirected graph on who is left.
inline SocialGraph filter_active_core(const std::vector<CommEvent>& events) {
  std::unordered_map<std::string_view, std::uint32_t> index;
  std::vector<std::string_view> names;
  auto intern = [&](const std::string& s) {
    auto [it, fresh] = index.emplace(s, static_cast<std::uint32_t>(names.size()));
    if (fresh) names.push_back(s);
    return it->second;
  };
  std::vector<std::pair<std::uint32_t, std::uint32_t>> arcs;
  for (const auto& e : events) {
    if (e.caller == e.callee) continue;
    arcs.emplace_back(intern(e.caller), intern(e.callee));
  }
  std::sort(arcs.begin(), arcs.end());
  arcs.erase(std::unique(arcs.begin(), arcs.end()), arcs.end());

  const std::size_t n = names.size();
  std::vector<std::vector<std::uint32_t>> out_nb(n), in_nb(n);
  for (auto [a, b] : arcs) {
    out_nb[a].push_back(b);
    in_nb[b].push_back(a);
  }
  std::vector<std::size_t> out_deg(n), in_deg(n);
  std::vector<char> alive(n, 1);
  std::vector<std::uint32_t> queue;
  for (std::uint32_t i = 0; i < n; ++i) {
    out_deg[i] = out_nb[i].size();
    in_deg[i] = in_nb[i].size();
    if (out_deg[i] == 0 || in_deg[i] == 0) {
      alive[i] = 0;
      queue.push_back(i);
    }
  }
  for (std::size_t q = 0; q < queue.size(); ++q) {
    std::uint32_t x = queue[q];
    for (auto y : out_nb[x]) {
      if (alive[y] && --in_deg[y] == 0) {
        alive[y] = 0;
        queue.push_back(y);
      }
    }
    for (auto y : in_nb[x]) {
      if (alive[y] && --out_deg[y] == 0) {
        alive[y] = 0;
        queue.push_back(y);
      }
    }
  }
  std::vector<std::pair<UserId, UserId>> pairs;
  for (auto [a, b] : arcs) {
    if (alive[a] && alive[b]) pairs.emplace_back(std::string(names[a]), std::string(names[b]));
  }
  return SocialGraph::from_id_pairs(pairs);
}

// ---------------------------------------------------------------------------
// Profiles

struct ProfileOptions {
  int min_active_months = 2;
  std::int64_t utc_offset_seconds = 0;  // affects weekday only; months are UTC
};

struct ProfileSet {
  Profiles profiles;
  std::size_t excluded_inactive = 0;
  std::size_t unknown_demographics = 0;
  std::vector<std::string> diagnostics;
};

inline EgoProfile empty_profile(const UserId& id, const CategoryDirectory& directory) {
  EgoProfile p;
  p.user_id = id;
  p.pcg_spend.assign(directory.pcg_count(), 0);
  p.weekly_spend.assign(directory.pcg_count(), std::array<Cents, kDaysPerWeek>{});
  return p;
}

/// Aggregates transactions per user and attaches demographics. Users active in fewer
/// than `min_active_months` calendar months are dropped.
inline ProfileSet assemble_profiles(const std::vector<TransactionRecord>& tx, const Demographics& demo,
                                    const CategoryDirectory& directory, const ProfileOptions& opt = {}) {
  if (opt.min_active_months < 1) throw Error("min_active_months must be >= 1");
  Profiles all;
  for (const auto& r : tx) {
    auto it = all.find(r.user_id);
    if (it == all.end()) it = all.emplace(r.user_id, empty_profile(r.user_id, directory)).first;
    EgoProfile& p = it->second;
    p.monthly_spend[month_index(r.timestamp)] += r.amount;
    auto pcg = r.valid_mcc ? directory.pcg_of(r.mcc) : std::nullopt;
    if (!pcg) {
      p.invalid_spend += r.amount;
      continue;
    }
    p.category_spend[r.mcc] += r.amount;
    p.category_count[r.mcc] += 1;
    p.pcg_spend[static_cast<std::size_t>(*pcg)] += r.amount;
    p.weekly_spend[static_cast<std::size_t>(*pcg)][static_cast<std::size_t>(weekday_index(r.timestamp, opt.utc_offset_seconds))] +=
        r.amount;
  }
  ProfileSet out;
  for (auto& [id, p] : all) {
    // Zero-amount purchases still mark a month as active.
    if (p.active_months() < opt.min_active_months) {
      ++out.excluded_inactive;
      continue;
    }
    if (auto d = demo.find(id); d != demo.end()) {
      p.age = d->second.age;
      p.gender = d->second.gender;
    }
    if (!p.has_demographics()) ++out.unknown_demographics;
    out.profiles.emplace(id, std::move(p));
  }
  if (out.excluded_inactive > 0) {
    out.diagnostics.push_back(std::to_string(out.excluded_inactive) + " users active in fewer than " +
                              std::to_string(opt.min_active_months) + " months excluded");
  }
  if (out.unknown_demographics > 0) {
    out.diagnostics.push_back(std::to_string(out.unknown_demographics) +
                              " users without age/gender (kept for economic analyses)");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

/// Edge list CSV `u,v`, one row per undirected edge.
inline void write_graph(std::ostream& out, const SocialGraph& g) {
  out << "u,v\n";
  for (const Edge& e : g.edges()) out << csv::escape(g.id(e.u)) << ',' << csv::escape(g.id(e.v)) << '\n';
}

inline SocialGraph read_graph(std::istream& in) {
  csv::Reader reader(in, {"u", "v"});
  std::vector<std::pair<UserId, UserId>> pairs;
  std::vector<std::string> f;
  while (reader.next(f)) pairs.emplace_back(std::string(csv::trim(f[0])), std::string(csv::trim(f[1])));
  return SocialGraph::from_id_pairs(pairs);
}

/// One JSON object per line:
///   {"user_id", "age", "gender", "monthly": {month: cents}, "categories": {mcc: cents},
///    "counts": {mcc: n}, "pcg": {name: cents}, "weekly": {name: [7 x cents]}, "invalid": cents}
/// "age"/"gender" are null when unknown; month keys are year*12 + month-1.
inline void write_profiles(std::ostream& out, const Profiles& profiles, const CategoryDirectory& directory) {
  for (const auto& [id, p] : profiles) {
    nlohmann::json j;
    j["user_id"] = id;
    j["age"] = p.age ? nlohmann::json(*p.age) : nlohmann::json(nullptr);
    j["gender"] = p.gender ? nlohmann::json(*p.gender) : nlohmann::json(nullptr);
    auto& monthly = j["monthly"] = nlohmann::json::object();
    for (const auto& [m, c] : p.monthly_spend) monthly[std::to_string(m)] = c;
    auto& cats = j["categories"] = nlohmann::json::object();
    for (const auto& [mcc, c] : p.category_spend) cats[std::to_string(mcc)] = c;
    auto& counts = j["counts"] = nlohmann::json::object();
    for (const auto& [mcc, c] : p.category_count) counts[std::to_string(mcc)] = c;
    auto& pcg = j["pcg"] = nlohmann::json::object();
    auto& weekly = j["weekly"] = nlohmann::json::object();
    for (std::size_t k = 0; k < p.pcg_spend.size(); ++k) {
      if (p.pcg_spend[k] == 0) continue;
      const auto& name = directory.pcg_name(static_cast<int>(k));
      pcg[name] = p.pcg_spend[k];
      weekly[name] = p.weekly_spend[k];
    }
    j["invalid"] = p.invalid_spend;
    out << j.dump() << '\n';
  }
}

inline Profiles read_profiles(std::istream& in, const CategoryDirectory& directory) {
  Profiles out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
      EgoProfile p = empty_profile(j.at("user_id").get<std::string>(), directory);
      if (!j.at("age").is_null()) p.age = j["age"].get<int>();
      if (!j.at("gender").is_null()) p.gender = j["gender"].get<int>();
      for (const auto& [k, v] : j.at("monthly").items()) p.monthly_spend[std::stoi(k)] = v.get<Cents>();
      for (const auto& [k, v] : j.at("categories").items()) p.category_spend[std::stoi(k)] = v.get<Cents>();
      for (const auto& [k, v] : j.at("counts").items()) p.category_count[std::stoi(k)] = v.get<std::int64_t>();
      for (const auto& [k, v] : j.at("pcg").items()) {
        auto idx = directory.pcg_index(k);
        if (!idx) throw Error("unknown PCG '" + k + "'");
        p.pcg_spend[static_cast<std::size_t>(*idx)] = v.get<Cents>();
        p.weekly_spend[static_cast<std::size_t>(*idx)] = j.at("weekly").at(k).get<std::array<Cents, kDaysPerWeek>>();
      }
      p.invalid_spend = j.value("invalid", Cents{0});
      auto id = p.user_id;
      out.emplace(std::move(id), std::move(p));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(lineno, e.what());
    } catch (const std::invalid_argument& e) {
      throw ParseError(lineno, "bad numeric key");
    }
  }
  return out;
}

}  // namespace socioscope
