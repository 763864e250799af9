#pragma once

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/ingest.hpp"

namespace socioscope {

/// Average monthly purchase per user, sorted ascending (ties by user id).
class AmpTable {
 public:
  struct Row {
    UserId user_id;
    double amp;  // currency units per active month
  };

  AmpTable() = default;

  /// Rejects non-positive or non-finite values.
  static AmpTable from_values(std::vector<Row> rows) {
    for (const auto& r : rows) {
      if (!(r.amp > 0) || !std::isfinite(r.amp)) throw Error("AMP of '" + r.user_id + "' must be positive");
    }
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
      if (a.amp != b.amp) return a.amp < b.amp;
      return id_less(a.user_id, b.user_id);
    });
    AmpTable t;
    t.rows_ = std::move(rows);
    return t;
  }

  /// Convenience for tests and generators: ids are "0", "1", ... in input order.
  static AmpTable from_values(std::span<const double> values) {
    std::vector<Row> rows;
    rows.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) rows.push_back({std::to_string(i), values[i]});
    return from_values(std::move(rows));
  }

  std::size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }
  const std::vector<Row>& rows() const { return rows_; }

  std::vector<double> sorted_values() const {
    std::vector<double> v;
    v.reserve(rows_.size());
    for (const auto& r : rows_) v.push_back(r.amp);
    return v;
  }

  double total() const {
    long double s = 0;
    for (const auto& r : rows_) s += r.amp;
    return static_cast<double>(s);
  }

  std::vector<std::string> diagnostics;

 private:
  std::vector<Row> rows_;
};

/// P_u = (sum over months of spend) / (number of months with a purchase).
/// Users without any purchase or with zero total spend are excluded with a diagnostic.
inline AmpTable compute_amp(const Profiles& profiles) {
  std::vector<AmpTable::Row> rows;
  std::vector<std::string> diag;
  for (const auto& [id, p] : profiles) {
    const int months = p.active_months();
    const Cents total = p.total_spend();
    if (months == 0 || total <= 0) {
      diag.push_back("user '" + id + "' has no purchases, excluded from AMP");
      continue;
    }
    rows.push_back({id, to_units(total) / months});
  }
  auto t = AmpTable::from_values(std::move(rows));
  t.diagnostics = std::move(diag);
  return t;
}

struct InequalitySummary {
  double gini = 0;
  std::vector<std::pair<double, double>> lorenz;  // (f, C(f)), f = 0, 1/n, ..., 1
  std::optional<double> pareto_alpha;
};

/// Gini of ascending-sorted, non-negative values with positive sum, as 1 - 2 * (trapezoidal
/// area under the Lorenz curve). With C_0 = 0 and C_n = 1 the trapezoid sum reduces to
/// sum_i (2i - n - 1) x_i / (n S), evaluated here over symmetric rank pairs so that equal
/// values give exactly zero.
inline double gini_sorted(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n == 0) throw Error("Gini of an empty sample");
  long double sum = 0;
  for (double v : x) sum += v;
  if (!(sum > 0)) throw Error("Gini needs a positive total");
  long double num = 0;
  for (std::size_t i = 1; i <= n / 2; ++i) {
    num += static_cast<long double>(n + 1 - 2 * i) * (static_cast<long double>(x[n - i]) - x[i - 1]);
  }
  return static_cast<double>(num / (static_cast<long double>(n) * sum));
}

inline InequalitySummary lorenz_and_gini(const AmpTable& amp) {
  if (amp.empty()) throw Error("Lorenz curve needs at least one user");
  const auto x = amp.sorted_values();
  const double n = static_cast<double>(x.size());
  const long double total = amp.total();
  InequalitySummary s;
  s.lorenz.reserve(x.size() + 1);
  s.lorenz.emplace_back(0.0, 0.0);
  long double cum = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cum += x[i];
    s.lorenz.emplace_back(static_cast<double>(i + 1) / n, static_cast<double>(cum / total));
  }
  s.lorenz.back().second = 1.0;
  s.gini = gini_sorted(x);
  return s;
}

/// Hill (maximum-likelihood) tail exponent over the largest `tail_fraction` of values:
/// with the m largest values, alpha = (m - 1) / sum_{i<m} ln(x_(i) / x_(m)).
inline double hill_estimator(std::span<const double> values, double tail_fraction) {
  if (!(tail_fraction > 0 && tail_fraction <= 1)) throw Error("tail fraction must be in (0, 1]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end(), std::greater<>());
  const auto m = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(v.size())));
  if (m < 10) throw Error("Hill estimator needs at least 10 tail samples, got " + std::to_string(m));
  const double threshold = v[m - 1];
  if (!(threshold > 0)) throw Error("Hill estimator needs positive values");
  long double s = 0;
  for (std::size_t i = 0; i + 1 < m; ++i) s += std::log(v[i] / threshold);
  if (!(s > 0)) throw Error("degenerate tail: all tail values equal, exponent diverges");
  return static_cast<double>((m - 1) / s);
}

inline double estimate_pareto_alpha(const AmpTable& amp, double tail_fraction = 0.1) {
  return hill_estimator(amp.sorted_values(), tail_fraction);
}

/// Users split into n classes of equal cumulative AMP; class 1 is the poorest.
class ClassPartition {
 public:
  ClassPartition() = default;

  /// Explicit assignment (class indices 1..n); sums are left at zero when unknown.
  static ClassPartition from_assignment(const std::map<UserId, int, IdLess>& assignment, int n_classes,
                                        const std::map<UserId, double, IdLess>& amp = {}) {
    if (n_classes < 1) throw Error("need at least one class");
    ClassPartition p;
    p.n_ = n_classes;
    p.members_.assign(static_cast<std::size_t>(n_classes), {});
    p.sums_.assign(static_cast<std::size_t>(n_classes), 0.0);
    for (const auto& [id, c] : assignment) {
      if (c < 1 || c > n_classes) throw Error("class index out of range for '" + id + "'");
      p.members_[static_cast<std::size_t>(c - 1)].push_back(id);
      if (auto it = amp.find(id); it != amp.end()) p.sums_[static_cast<std::size_t>(c - 1)] += it->second;
    }
    p.assignment_ = assignment;
    p.amp_ = amp;
    return p;
  }

  int n_classes() const { return n_; }
  std::size_t user_count() const { return assignment_.size(); }

  std::optional<int> class_of(std::string_view user) const {
    auto it = assignment_.find(user);
    if (it == assignment_.end()) return std::nullopt;
    return it->second;
  }

  const std::vector<UserId>& members(int j) const { return members_.at(static_cast<std::size_t>(j - 1)); }
  std::size_t size(int j) const { return members(j).size(); }
  double class_sum(int j) const { return sums_.at(static_cast<std::size_t>(j - 1)); }
  double mean_amp(int j) const { return size(j) ? class_sum(j) / static_cast<double>(size(j)) : kMissing; }

  /// Cut positions in the AMP-sorted order (n + 1 entries) when built by partition_classes.
  const std::vector<std::size_t>& boundaries() const { return boundaries_; }
  const std::map<UserId, int, IdLess>& assignment() const { return assignment_; }
  std::optional<double> amp_of(std::string_view user) const {
    auto it = amp_.find(user);
    if (it == amp_.end()) return std::nullopt;
    return it->second;
  }

 private:
  friend ClassPartition partition_classes(const AmpTable&, int);

  int n_ = 0;
  std::map<UserId, int, IdLess> assignment_;
  std::map<UserId, double, IdLess> amp_;
  std::vector<std::vector<UserId>> members_;
  std::vector<double> sums_;
  std::vector<std::size_t> boundaries_;
};

/// Boundary j sits at the first rank whose cumulative AMP reaches j * total / n, so a
/// user straddling a threshold lands in the lower class.
inline ClassPartition partition_classes(const AmpTable& amp, int n) {
  if (n < 1) throw Error("number of classes must be >= 1");
  if (static_cast<std::size_t>(n) > amp.size()) {
    throw Error("cannot split " + std::to_string(amp.size()) + " users into " + std::to_string(n) + " classes");
  }
  const auto& rows = amp.rows();
  const long double total = amp.total();
  ClassPartition p;
  p.n_ = n;
  p.members_.assign(static_cast<std::size_t>(n), {});
  p.sums_.assign(static_cast<std::size_t>(n), 0.0);
  p.boundaries_.assign(static_cast<std::size_t>(n) + 1, 0);
  long double cum = 0;
  int cls = 1;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    cum += rows[r].amp;
    p.assignment_[rows[r].user_id] = cls;
    p.amp_[rows[r].user_id] = rows[r].amp;
    p.members_[static_cast<std::size_t>(cls - 1)].push_back(rows[r].user_id);
    p.sums_[static_cast<std::size_t>(cls - 1)] += rows[r].amp;
    while (cls < n && cum >= total * cls / n) {
      p.boundaries_[static_cast<std::size_t>(cls)] = r + 1;
      ++cls;
    }
  }
  for (int j = cls; j <= n; ++j) p.boundaries_[static_cast<std::size_t>(j)] = rows.size();
  return p;
}

/// `user_id,class,amp`
inline void write_partition(std::ostream& out, const ClassPartition& p) {
  out << "user_id,class,amp\n";
  for (int j = 1; j <= p.n_classes(); ++j) {
    for (const auto& id : p.members(j)) {
      out << csv::escape(id) << ',' << j << ',' << csv::format(p.amp_of(id).value_or(kMissing)) << '\n';
    }
  }
}

/// n_classes keeps trailing empty classes; 0 takes the largest class seen.
inline ClassPartition read_partition(std::istream& in, int n_classes = 0) {
  csv::Reader reader(in, {"user_id", "class", "amp"});
  std::map<UserId, int, IdLess> assignment;
  std::map<UserId, double, IdLess> amp;
  std::vector<std::string> f;
  int n = 0;
  while (reader.next(f)) {
    int c = 0;
    if (!csv::parse_number(f[1], c)) throw ParseError(reader.line(), "bad class '" + f[1] + "'");
    auto id = std::string(csv::trim(f[0]));
    assignment[id] = c;
    if (double a = csv::parse_cell(f[2]); !is_missing(a)) amp[id] = a;
    n = std::max(n, c);
  }
  if (n == 0) throw Error("partition file is empty");
  if (n_classes && n > n_classes) throw ParseError(reader.line(), "class " + std::to_string(n) + " out of range");
  return ClassPartition::from_assignment(assignment, std::max(n, n_classes), amp);
}

// ---------------------------------------------------------------------------
// Population pyramid

inline constexpr int kPyramidMinAge = 15;
inline constexpr int kPyramidMaxAge = 70;  // exclusive
inline constexpr int kBracketYears = 5;

struct PyramidTable {
  /// (bracket lower age, gender, class) -> count
  std::map<std::tuple<int, int, int>, std::size_t> cells;
  std::size_t skipped = 0;  // unknown or out-of-range demographics, or unclassified users
};

inline PyramidTable demographics_pyramid(const Profiles& profiles, const ClassPartition& partition) {
  PyramidTable t;
  for (const auto& [id, p] : profiles) {
    auto cls = partition.class_of(id);
    if (!p.has_demographics() || !cls || *p.age < kPyramidMinAge || *p.age >= kPyramidMaxAge) {
      ++t.skipped;
      continue;
    }
    int bracket = kPyramidMinAge + (*p.age - kPyramidMinAge) / kBracketYears * kBracketYears;
    ++t.cells[{bracket, *p.gender, *cls}];
  }
  return t;
}

inline void write_pyramid(std::ostream& out, const PyramidTable& t) {
  out << "age_bracket,gender,class,count\n";
  for (const auto& [key, n] : t.cells) {
    const auto& [b, g, c] = key;
    out << b << '-' << (b + kBracketYears - 1) << ',' << g << ',' << c << ',' << n << '\n';
  }
}

}  // namespace socioscope
