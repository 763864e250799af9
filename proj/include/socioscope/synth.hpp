#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <ostream>
#include <map>
#include <random>
#include <set>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "json.hpp"

#include "socioscope/catnet.hpp"
#include "socioscope/common.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/dynamics.hpp"
#include "socioscope/graph.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/louvain.hpp"
#include "socioscope/nullmodel.hpp"
#include "socioscope/socio.hpp"
#include "socioscope/spending.hpp"

namespace socioscope {

using Vec17 = std::array<double, kActivePcgCount>;
using Vec16 = std::array<double, kNonCashPcgCount>;

/// Co-purchased merchant categories: members pick these codes within their PCGs with
/// probability `coupling`.
struct CategoryBlock {
  std::vector<int> mccs;
  double coupling = 0.8;
  double member_fraction = 0.1;
};

struct SynthSpec {
  std::size_t n_users = 10000;
  std::uint64_t seed = 42;
  int n_classes = 9;

  // money
  double pareto_alpha = 1.5;
  double amp_min = 50.0;  // Pareto scale, currency units per month
  int months = 8;
  double tx_per_user = 10.0;
  std::int64_t start_time = 1451606400;  // 2016-01-01 00:00 UTC
  double invalid_mcc_fraction = 0.0;

  // graph
  double mean_degree = 4.0;
  double homophily = 0.8;  // share of edges drawn inside same-class circles
  double embedded_fraction = 0.5;
  std::size_t circle_size = 20;
  std::size_t noise_nodes = 0;  // callers with outgoing events only

  // spending
  std::vector<Vec16> class_spending_means;  // empty: poor-to-rich gradient
  std::vector<double> class_cash_means;     // empty: 0.35 down to 0.15
  std::vector<double> concentration;        // per class, members of circles; empty: 100 + 20 (j - 1)
  double circle_concentration = 50.0;
  double peripheral_concentration = 5.0;
  std::vector<CategoryBlock> category_blocks;

  // weekly
  std::vector<WeekArray> weekday_profiles;  // per class; empty: Friday share 21.7% down to 16.5%
  double circle_weekday_shift = 0.5;        // circle perturbation, as a fraction of the smallest day share
  double weekday_concentration = 200.0;
  std::map<int, WeekArray> pcg_weekday_profiles;  // PCG index -> day profile overriding the user's

  // demographics
  double male_fraction = 0.5;
  double gender_class_slope = 0.0;
  double age_mean = 40.0;
  double age_sd = 12.0;
  double age_class_slope = 0.0;
  int age_min = 18;
  int age_max = 80;
  double unknown_demographics = 0.0;

  void validate() const;
};

inline void to_json(nlohmann::json& j, const CategoryBlock& b) {
  j = {{"mccs", b.mccs}, {"coupling", b.coupling}, {"member_fraction", b.member_fraction}};
}
inline void from_json(const nlohmann::json& j, CategoryBlock& b) {
  b.mccs = j.at("mccs").get<std::vector<int>>();
  b.coupling = j.value("coupling", b.coupling);
  b.member_fraction = j.value("member_fraction", b.member_fraction);
}

inline void to_json(nlohmann::json& j, const SynthSpec& s) {
  nlohmann::json pcg_profiles = nlohmann::json::object();
  for (const auto& [k, v] : s.pcg_weekday_profiles) pcg_profiles[std::to_string(k)] = v;
  j = {{"n_users", s.n_users},
       {"seed", s.seed},
       {"n_classes", s.n_classes},
       {"pareto_alpha", s.pareto_alpha},
       {"amp_min", s.amp_min},
       {"months", s.months},
       {"tx_per_user", s.tx_per_user},
       {"start_time", s.start_time},
       {"invalid_mcc_fraction", s.invalid_mcc_fraction},
       {"mean_degree", s.mean_degree},
       {"homophily", s.homophily},
       {"embedded_fraction", s.embedded_fraction},
       {"circle_size", s.circle_size},
       {"noise_nodes", s.noise_nodes},
       {"class_spending_means", s.class_spending_means},
       {"class_cash_means", s.class_cash_means},
       {"concentration", s.concentration},
       {"circle_concentration", s.circle_concentration},
       {"peripheral_concentration", s.peripheral_concentration},
       {"category_blocks", s.category_blocks},
       {"weekday_profiles", s.weekday_profiles},
       {"circle_weekday_shift", s.circle_weekday_shift},
       {"weekday_concentration", s.weekday_concentration},
       {"pcg_weekday_profiles", pcg_profiles},
       {"male_fraction", s.male_fraction},
       {"gender_class_slope", s.gender_class_slope},
       {"age_mean", s.age_mean},
       {"age_sd", s.age_sd},
       {"age_class_slope", s.age_class_slope},
       {"age_min", s.age_min},
       {"age_max", s.age_max},
       {"unknown_demographics", s.unknown_demographics}};
}

inline void from_json(const nlohmann::json& j, SynthSpec& s) {
  static const std::set<std::string> known = {
      "n_users", "seed", "n_classes", "pareto_alpha", "amp_min", "months", "tx_per_user", "start_time",
      "invalid_mcc_fraction", "mean_degree", "homophily", "embedded_fraction", "circle_size", "noise_nodes",
      "class_spending_means", "class_cash_means", "concentration", "circle_concentration",
      "peripheral_concentration", "category_blocks", "weekday_profiles", "circle_weekday_shift",
      "weekday_concentration", "pcg_weekday_profiles", "male_fraction", "gender_class_slope", "age_mean", "age_sd",
      "age_class_slope", "age_min", "age_max", "unknown_demographics"};
  for (const auto& [k, v] : j.items())
    if (!known.count(k)) throw Error("unknown synth spec key '" + k + "'");
  SynthSpec d;
  s.n_users = j.value("n_users", d.n_users);
  s.seed = j.value("seed", d.seed);
  s.n_classes = j.value("n_classes", d.n_classes);
  s.pareto_alpha = j.value("pareto_alpha", d.pareto_alpha);
  s.amp_min = j.value("amp_min", d.amp_min);
  s.months = j.value("months", d.months);
  s.tx_per_user = j.value("tx_per_user", d.tx_per_user);
  s.start_time = j.value("start_time", d.start_time);
  s.invalid_mcc_fraction = j.value("invalid_mcc_fraction", d.invalid_mcc_fraction);
  s.mean_degree = j.value("mean_degree", d.mean_degree);
  s.homophily = j.value("homophily", d.homophily);
  s.embedded_fraction = j.value("embedded_fraction", d.embedded_fraction);
  s.circle_size = j.value("circle_size", d.circle_size);
  s.noise_nodes = j.value("noise_nodes", d.noise_nodes);
  s.class_spending_means = j.value("class_spending_means", d.class_spending_means);
  s.class_cash_means = j.value("class_cash_means", d.class_cash_means);
  s.concentration = j.value("concentration", d.concentration);
  s.circle_concentration = j.value("circle_concentration", d.circle_concentration);
  s.peripheral_concentration = j.value("peripheral_concentration", d.peripheral_concentration);
  s.category_blocks = j.value("category_blocks", d.category_blocks);
  s.weekday_profiles = j.value("weekday_profiles", d.weekday_profiles);
  s.circle_weekday_shift = j.value("circle_weekday_shift", d.circle_weekday_shift);
  s.weekday_concentration = j.value("weekday_concentration", d.weekday_concentration);
  s.pcg_weekday_profiles.clear();
  if (j.contains("pcg_weekday_profiles"))
    for (const auto& [k, v] : j.at("pcg_weekday_profiles").items())
      s.pcg_weekday_profiles[std::stoi(k)] = v.get<WeekArray>();
  s.male_fraction = j.value("male_fraction", d.male_fraction);
  s.gender_class_slope = j.value("gender_class_slope", d.gender_class_slope);
  s.age_mean = j.value("age_mean", d.age_mean);
  s.age_sd = j.value("age_sd", d.age_sd);
  s.age_class_slope = j.value("age_class_slope", d.age_class_slope);
  s.age_min = j.value("age_min", d.age_min);
  s.age_max = j.value("age_max", d.age_max);
  s.unknown_demographics = j.value("unknown_demographics", d.unknown_demographics);
}

inline void SynthSpec::validate() const {
  auto prob = [](double p, const char* what) {
    if (!(p >= 0 && p <= 1)) throw Error(std::string(what) + " must lie in [0, 1]");
  };
  prob(homophily, "homophily");
  prob(embedded_fraction, "embedded_fraction");
  prob(male_fraction, "male_fraction");
  prob(unknown_demographics, "unknown_demographics");
  prob(invalid_mcc_fraction, "invalid_mcc_fraction");
  if (n_classes < 1) throw Error("n_classes must be >= 1");
  if (!(pareto_alpha > 0)) throw Error("pareto_alpha must be positive");
  if (!(amp_min > 0)) throw Error("amp_min must be positive");
  if (months < 2) throw Error("months must be >= 2 (users need two active months)");
  if (!(mean_degree >= 0)) throw Error("mean_degree must be non-negative");
  if (circle_size < 2) throw Error("circle_size must be >= 2");
  if (age_min > age_max) throw Error("age_min exceeds age_max");
  auto simplex = [](std::span<const double> v, const char* what) {
    double s = 0;
    for (double x : v) {
      if (x < 0) throw Error(std::string(what) + " has a negative entry");
      s += x;
    }
    if (std::abs(s - 1.0) > 1e-6) throw Error(std::string(what) + " must sum to 1");
  };
  if (!class_spending_means.empty()) {
    if (class_spending_means.size() != static_cast<std::size_t>(n_classes))
      throw Error("class_spending_means needs one vector per class");
    for (const auto& v : class_spending_means) simplex(v, "class spending mean");
  }
  if (!weekday_profiles.empty()) {
    if (weekday_profiles.size() != static_cast<std::size_t>(n_classes))
      throw Error("weekday_profiles needs one vector per class");
    for (const auto& v : weekday_profiles) simplex(v, "weekday profile");
  }
  for (const auto& [k, v] : pcg_weekday_profiles) {
    if (!CategoryDirectory::is_active(k)) throw Error("pcg_weekday_profiles key is not a retained PCG");
    simplex(v, "PCG weekday profile");
  }
  if (!class_cash_means.empty()) {
    if (class_cash_means.size() != static_cast<std::size_t>(n_classes))
      throw Error("class_cash_means needs one value per class");
    for (double c : class_cash_means) prob(c, "class cash mean");
  }
  if (!concentration.empty() && concentration.size() != static_cast<std::size_t>(n_classes))
    throw Error("concentration needs one value per class");
  for (const auto& b : category_blocks) {
    prob(b.coupling, "block coupling");
    prob(b.member_fraction, "block member_fraction");
  }
  if (!(circle_weekday_shift >= 0 && circle_weekday_shift < 1)) throw Error("circle_weekday_shift must lie in [0, 1)");
}

// ---------------------------------------------------------------------------
// Defaults

inline Vec16 default_poor_profile() {
  return {0.25, 0.04, 0.08, 0.12, 0.10, 0.03, 0.04, 0.04, 0.03, 0.05, 0.01, 0.01, 0.02, 0.10, 0.05, 0.03};
}
inline Vec16 default_rich_profile() {
  return {0.15, 0.03, 0.12, 0.06, 0.04, 0.06, 0.07, 0.07, 0.04, 0.07, 0.06, 0.07, 0.04, 0.07, 0.03, 0.02};
}

/// Friday share falling linearly from 21.7% (class 1) to 16.5% (class n); the other days
/// share the rest in a fixed shape.
inline std::vector<WeekArray> friday_gradient_profiles(int n, double first = 0.217, double last = 0.165) {
  const std::array<double, 6> rest = {0.14, 0.14, 0.145, 0.155, 0.25, 0.17};  // Mon..Thu, Sat, Sun
  const double rest_sum = std::accumulate(rest.begin(), rest.end(), 0.0);
  std::vector<WeekArray> out;
  for (int j = 1; j <= n; ++j) {
    const double t = n > 1 ? static_cast<double>(j - 1) / (n - 1) : 0.0;
    const double fri = first + t * (last - first);
    WeekArray w{};
    for (int d = 0, r = 0; d < kDaysPerWeek; ++d) {
      if (d == 4) {
        w[4] = fri;
      } else {
        w[static_cast<std::size_t>(d)] = (1 - fri) * rest[static_cast<std::size_t>(r++)] / rest_sum;
      }
    }
    out.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sampling helpers

template <std::size_t N>
std::array<double, N> sample_dirichlet(Rng& rng, const std::array<double, N>& mean, double concentration) {
  std::array<double, N> out{};
  double sum = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double a = concentration * mean[i];
    out[i] = a > 0 ? std::gamma_distribution<double>(a, 1.0)(rng) : 0.0;
    sum += out[i];
  }
  if (sum <= 0) return mean;
  for (double& x : out) x /= sum;
  return out;
}

inline double sample_beta(Rng& rng, double mean, double concentration) {
  if (mean <= 0) return 0;
  if (mean >= 1) return 1;
  const double a = std::gamma_distribution<double>(concentration * mean, 1.0)(rng);
  const double b = std::gamma_distribution<double>(concentration * (1 - mean), 1.0)(rng);
  return a + b > 0 ? a / (a + b) : mean;
}

template <class Weights>
std::size_t sample_index(Rng& rng, const Weights& w) {
  double total = 0;
  for (double x : w) total += x;
  double u = std::uniform_real_distribution<double>(0, total)(rng);
  std::size_t last = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0) continue;
    last = i;
    u -= w[i];
    if (u < 0) return i;
  }
  return last;
}

/// Splits `total` into integer parts proportional to `weights` (largest remainder).
inline std::vector<Cents> split_cents(Cents total, std::span<const double> weights) {
  std::vector<Cents> out(weights.size(), 0);
  if (weights.empty()) return out;
  const double wsum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::pair<double, std::size_t>> rem;
  Cents used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = wsum > 0 ? static_cast<double>(total) * weights[i] / wsum : static_cast<double>(total) / weights.size();
    out[i] = static_cast<Cents>(std::floor(exact));
    used += out[i];
    rem.emplace_back(exact - static_cast<double>(out[i]), i);
  }
  std::sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  for (std::size_t r = 0; used < total; r = (r + 1) % rem.size(), ++used) ++out[rem[r].second];
  return out;
}

// ---------------------------------------------------------------------------
// Population

struct SynthPopulation {
  SynthSpec spec;
  std::vector<UserId> ids;              // "1".."n"
  std::vector<double> amp;              // realized AMP (total cents / active months)
  std::vector<Cents> total_cents;
  std::vector<std::vector<int>> active_months;  // month offsets in [0, months)
  std::vector<int> cls;                 // 1-based
  std::vector<int> circle;              // circle index or -1 for peripheral users
  std::vector<Vec17> spending;          // planted K17 shares, cash first
  std::vector<WeekArray> weekly;        // planted day probabilities
  std::vector<std::optional<int>> age, gender;
  std::vector<std::vector<std::size_t>> block_members;
  std::vector<Edge> edges;              // over user indices, largest component only
  std::size_t edges_before_lcc = 0;
  double same_class_fraction = kMissing;
  double expected_same_class_fraction = kMissing;
  std::vector<Vec16> class_means;
  std::vector<double> cash_means;
  std::vector<WeekArray> class_weekday;
  ClassPartition partition;
};

/// Builds users, classes, the social graph and all planted vectors (no files).
inline SynthPopulation generate_population(const SynthSpec& spec) {
  spec.validate();
  SynthPopulation pop;
  pop.spec = spec;
  const std::size_t n = spec.n_users;
  const int nc = spec.n_classes;
  if (n > 0 && n < static_cast<std::size_t>(nc)) throw Error("infeasible spec: fewer users than classes");

  // class-level parameters
  pop.class_means = spec.class_spending_means;
  pop.cash_means = spec.class_cash_means;
  pop.class_weekday = spec.weekday_profiles.empty() ? friday_gradient_profiles(nc) : spec.weekday_profiles;
  for (int j = 1; j <= nc; ++j) {
    const double t = nc > 1 ? static_cast<double>(j - 1) / (nc - 1) : 0.0;
    if (spec.class_spending_means.empty()) {
      Vec16 v{};
      auto poor = default_poor_profile(), rich = default_rich_profile();
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = (1 - t) * poor[k] + t * rich[k];
      pop.class_means.push_back(v);
    }
    if (spec.class_cash_means.empty()) pop.cash_means.push_back(0.35 - 0.20 * t);
  }
  auto conc = [&](int j) {
    return spec.concentration.empty() ? 100.0 + 20.0 * (j - 1) : spec.concentration[static_cast<std::size_t>(j - 1)];
  };

  // money: AMP, active months, exact cents
  Rng money(derive_seed(spec.seed, "synth.amp"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<AmpTable::Row> rows;
  for (std::size_t i = 0; i < n; ++i) {
    pop.ids.push_back(std::to_string(i + 1));
    const double p = spec.amp_min * std::pow(1.0 - unit(money), -1.0 / spec.pareto_alpha);
    const int t = std::uniform_int_distribution<int>(2, spec.months)(money);
    std::vector<int> all(static_cast<std::size_t>(spec.months));
    std::iota(all.begin(), all.end(), 0);
    std::shuffle(all.begin(), all.end(), money);
    all.resize(static_cast<std::size_t>(t));
    std::sort(all.begin(), all.end());
    const Cents total = std::max<Cents>(1, static_cast<Cents>(std::llround(p * t * 100.0)));
    pop.total_cents.push_back(total);
    pop.active_months.push_back(std::move(all));
    pop.amp.push_back(to_units(total) / t);
    rows.push_back({pop.ids.back(), pop.amp.back()});
  }
  pop.cls.assign(n, 0);
  if (n > 0) {
    pop.partition = partition_classes(AmpTable::from_values(rows), nc);
    for (std::size_t i = 0; i < n; ++i) pop.cls[i] = *pop.partition.class_of(pop.ids[i]);
  } else {
    pop.partition = ClassPartition::from_assignment({}, nc);
  }

  // circles of embedded users inside each class
  Rng shape(derive_seed(spec.seed, "synth.circles"));
  pop.circle.assign(n, -1);
  std::vector<std::vector<std::size_t>> circles;
  std::vector<int> circle_class, circle_sign;
  for (int j = 1; j <= nc; ++j) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i)
      if (pop.cls[i] == j) members.push_back(i);
    std::shuffle(members.begin(), members.end(), shape);
    members.resize(static_cast<std::size_t>(std::llround(spec.embedded_fraction * static_cast<double>(members.size()))));
    const std::size_t first = circles.size();
    for (std::size_t s = 0; s < members.size(); s += spec.circle_size) {
      std::vector<std::size_t> c(members.begin() + static_cast<std::ptrdiff_t>(s),
                                 members.begin() + static_cast<std::ptrdiff_t>(std::min(members.size(), s + spec.circle_size)));
      if (c.size() < 2 && !circles.empty() && circle_class.back() == j) {
        circles.back().push_back(c.front());
        continue;
      }
      circles.push_back(std::move(c));
      circle_class.push_back(j);
    }
    // antithetic pairs share a weekday perturbation with opposite signs
    const std::size_t count = circles.size() - first;
    for (std::size_t c = 0; c < count; ++c) circle_sign.push_back(c + 1 == count && count % 2 == 1 ? 0 : (c % 2 ? -1 : 1));
  }
  for (std::size_t c = 0; c < circles.size(); ++c)
    for (std::size_t i : circles[c]) pop.circle[i] = static_cast<int>(c);

  // spending and weekday vectors
  Rng taste(derive_seed(spec.seed, "synth.spending"));
  std::vector<Vec16> circle_dir;
  std::vector<double> circle_cash;
  std::vector<WeekArray> circle_week;
  WeekArray delta{};
  for (std::size_t c = 0; c < circles.size(); ++c) {
    const int j = circle_class[c];
    circle_dir.push_back(sample_dirichlet(taste, pop.class_means[static_cast<std::size_t>(j - 1)], spec.circle_concentration));
    circle_cash.push_back(sample_beta(taste, pop.cash_means[static_cast<std::size_t>(j - 1)], spec.circle_concentration));
    const auto& base = pop.class_weekday[static_cast<std::size_t>(j - 1)];
    if (circle_sign[c] >= 0) {
      // fresh zero-sum direction for a pair (or a lone circle)
      std::normal_distribution<double> g;
      double mean = 0, peak = 0;
      for (double& x : delta) mean += (x = g(taste));
      mean /= kDaysPerWeek;
      for (double& x : delta) peak = std::max(peak, std::abs(x -= mean));
      const double floor = *std::min_element(base.begin(), base.end());
      for (double& x : delta) x = circle_sign[c] == 0 || peak == 0 ? 0.0 : x / peak * spec.circle_weekday_shift * floor;
    }
    WeekArray w{};
    for (std::size_t d = 0; d < w.size(); ++d) w[d] = base[d] + (circle_sign[c] < 0 ? -delta[d] : delta[d]);
    circle_week.push_back(w);
  }
  pop.spending.resize(n);
  pop.weekly.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int j = pop.cls[i];
    const int c = pop.circle[i];
    Vec16 sv;
    double cash;
    WeekArray week;
    if (c >= 0) {
      sv = sample_dirichlet(taste, circle_dir[static_cast<std::size_t>(c)], conc(j));
      cash = sample_beta(taste, circle_cash[static_cast<std::size_t>(c)], conc(j));
      week = sample_dirichlet(taste, circle_week[static_cast<std::size_t>(c)], spec.weekday_concentration);
    } else {
      sv = sample_dirichlet(taste, pop.class_means[static_cast<std::size_t>(j - 1)], spec.peripheral_concentration);
      cash = sample_beta(taste, pop.cash_means[static_cast<std::size_t>(j - 1)], spec.peripheral_concentration);
      week = sample_dirichlet(taste, pop.class_weekday[static_cast<std::size_t>(j - 1)], spec.weekday_concentration);
    }
    Vec17 full{};
    full[0] = cash;
    for (std::size_t k = 0; k < sv.size(); ++k) full[k + 1] = (1 - cash) * sv[k];
    pop.spending[i] = full;
    pop.weekly[i] = week;
  }

  // demographics
  Rng demo(derive_seed(spec.seed, "synth.demographics"));
  const double mid = (nc + 1) / 2.0;
  for (std::size_t i = 0; i < n; ++i) {
    const int j = pop.cls[i];
    const double a = std::normal_distribution<double>(spec.age_mean + spec.age_class_slope * (j - mid), spec.age_sd)(demo);
    const int age = std::clamp(static_cast<int>(std::lround(a)), spec.age_min, spec.age_max);
    const double pm = std::clamp(spec.male_fraction + spec.gender_class_slope * (j - mid), 0.0, 1.0);
    const int g = unit(demo) < pm ? 1 : 0;
    const bool unknown = unit(demo) < spec.unknown_demographics;
    pop.age.push_back(unknown ? std::nullopt : std::optional<int>(age));
    pop.gender.push_back(unknown ? std::nullopt : std::optional<int>(g));
  }

  // category block membership
  Rng blocks(derive_seed(spec.seed, "synth.blocks"));
  for (const auto& b : spec.category_blocks) {
    std::vector<std::size_t> m;
    for (std::size_t i = 0; i < n; ++i)
      if (unit(blocks) < b.member_fraction) m.push_back(i);
    pop.block_members.push_back(std::move(m));
  }

  // social graph: same-class circle edges with probability h, otherwise uniform pairs
  Rng wire(derive_seed(spec.seed, "synth.graph"));
  const auto target = static_cast<std::size_t>(std::llround(spec.mean_degree * static_cast<double>(n) / 2.0));
  std::vector<std::size_t> embedded;
  double circle_capacity = 0;
  for (const auto& c : circles) {
    embedded.insert(embedded.end(), c.begin(), c.end());
    circle_capacity += static_cast<double>(c.size()) * static_cast<double>(c.size() - 1) / 2.0;
  }
  const double pairs = static_cast<double>(n) * static_cast<double>(n > 0 ? n - 1 : 0) / 2.0;
  if (target > 0 && (static_cast<double>(target) > 0.5 * pairs ||
                     spec.homophily * static_cast<double>(target) > 0.9 * circle_capacity)) {
    throw Error("infeasible spec: degree demands exceed what a simple graph on the circles can hold");
  }
  std::unordered_set<std::uint64_t> present;
  std::vector<Edge> edges;
  std::size_t same = 0;
  for (std::size_t attempts = 0; edges.size() < target; ++attempts) {
    if (attempts > 100 * target) throw Error("infeasible spec: could not place the requested edges");
    std::size_t a, b;
    if (unit(wire) < spec.homophily) {
      a = embedded[uniform_index(wire, embedded.size())];
      const auto& c = circles[static_cast<std::size_t>(pop.circle[a])];
      b = c[uniform_index(wire, c.size())];
    } else {
      a = uniform_index(wire, n);
      b = uniform_index(wire, n);
    }
    if (a == b) continue;
    auto e = make_edge(static_cast<Node>(a), static_cast<Node>(b));
    if (!present.insert(edge_key(e.u, e.v)).second) continue;
    edges.push_back(e);
  }
  pop.edges_before_lcc = edges.size();
  if (!edges.empty()) {
    // keep the largest component
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& e : edges) parent[find(e.u)] = find(e.v);
    std::vector<std::size_t> size(n, 0), smallest(n, n);
    for (const auto& e : edges)
      for (Node x : {e.u, e.v}) smallest[find(x)] = std::min<std::size_t>(smallest[find(x)], x);
    std::vector<char> seen(n, 0);
    for (const auto& e : edges)
      for (Node x : {e.u, e.v})
        if (!seen[x]) {
          seen[x] = 1;
          ++size[find(x)];
        }
    std::size_t best = n;
    for (std::size_t r = 0; r < n; ++r) {
      if (!size[r]) continue;
      if (best == n || size[r] > size[best] || (size[r] == size[best] && smallest[r] < smallest[best])) best = r;
    }
    for (const auto& e : edges)
      if (find(e.u) == best) pop.edges.push_back(e);
    std::sort(pop.edges.begin(), pop.edges.end());
    for (const auto& e : pop.edges) same += pop.cls[e.u] == pop.cls[e.v];
    pop.same_class_fraction = static_cast<double>(same) / static_cast<double>(pop.edges.size());
  }
  double sq = 0;
  for (int j = 1; j <= nc; ++j) {
    const double p = n ? static_cast<double>(pop.partition.size(j)) / static_cast<double>(n) : 0.0;
    sq += p * p;
  }
  pop.expected_same_class_fraction = spec.homophily + (1 - spec.homophily) * sq;
  return pop;
}

// ---------------------------------------------------------------------------
// In-memory views used by tests and the oracle

inline SocialGraph planted_graph(const SynthPopulation& pop) {
  std::vector<std::pair<UserId, UserId>> pairs;
  pairs.reserve(pop.edges.size());
  for (const auto& e : pop.edges) pairs.emplace_back(pop.ids[e.u], pop.ids[e.v]);
  return SocialGraph::from_id_pairs(pairs);
}

inline SpendingVectors planted_spending_vectors(const SynthPopulation& pop) {
  SpendingVectors out;
  for (std::size_t i = 0; i < pop.ids.size(); ++i) {
    SpendingVector sv;
    sv.user_id = pop.ids[i];
    sv.cash_fraction = pop.spending[i][0];
    const double rest = 1 - sv.cash_fraction;
    for (std::size_t k = 0; k < kNonCashPcgCount; ++k) sv.values[k] = rest > 0 ? pop.spending[i][k + 1] / rest : 0.0;
    out.vectors.emplace(sv.user_id, sv);
  }
  return out;
}

inline WeeklyVectors planted_weekly_vectors(const SynthPopulation& pop) {
  WeeklyVectors out;
  for (std::size_t i = 0; i < pop.ids.size(); ++i) out.emplace(pop.ids[i], WeeklyVector{pop.weekly[i], 1.0});
  return out;
}

// ---------------------------------------------------------------------------
// File output

namespace detail {

/// Seconds since epoch of 00:00 UTC on the first day of month `offset` after `start`.
inline std::int64_t month_start(std::int64_t start, int offset) {
  using namespace std::chrono;
  const auto day = sys_days{days{start / 86400}};
  year_month_day ymd{day};
  auto ym = year_month{ymd.year(), ymd.month()} + months{offset};
  return sys_days{ym / 1}.time_since_epoch().count() * std::int64_t{86400};
}

inline int days_in_month(std::int64_t month_begin) {
  using namespace std::chrono;
  year_month_day ymd{sys_days{days{month_begin / 86400}}};
  return static_cast<int>(static_cast<unsigned>((ymd.year() / ymd.month() / last).day()));
}

}  // namespace detail

/// Streams `user_id,timestamp,amount,mcc`. Each user's cents add up exactly to the planted
/// AMP times active months, with at least one purchase in every active month.
inline void write_transactions(std::ostream& out, const SynthPopulation& pop, const CategoryDirectory& directory) {
  const auto& spec = pop.spec;
  out << "user_id,timestamp,amount,mcc\n";
  Rng rng(derive_seed(spec.seed, "synth.transactions"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<int>> pcg_mccs(kActivePcgCount);
  for (std::size_t k = 0; k < kActivePcgCount; ++k) pcg_mccs[k] = directory.mccs_in(static_cast<int>(k));
  // user -> blocks they belong to
  std::vector<std::vector<std::size_t>> member_of(pop.ids.size());
  for (std::size_t b = 0; b < pop.block_members.size(); ++b)
    for (std::size_t i : pop.block_members[b]) member_of[i].push_back(b);
  std::vector<std::vector<std::vector<int>>> block_pcg(spec.category_blocks.size(), std::vector<std::vector<int>>(kActivePcgCount));
  for (std::size_t b = 0; b < spec.category_blocks.size(); ++b)
    for (int mcc : spec.category_blocks[b].mccs) {
      auto pcg = directory.pcg_of(mcc);
      if (!pcg || !CategoryDirectory::is_active(*pcg)) throw Error("block MCC " + std::to_string(mcc) + " is not in a retained PCG");
      block_pcg[b][static_cast<std::size_t>(*pcg)].push_back(mcc);
    }

  std::string line;
  for (std::size_t i = 0; i < pop.ids.size(); ++i) {
    const auto& months = pop.active_months[i];
    const auto t = months.size();
    const std::size_t count = std::max<std::size_t>(t, std::poisson_distribution<std::size_t>(spec.tx_per_user)(rng));
    std::vector<double> w(count);
    for (double& x : w) x = std::exponential_distribution<double>(1.0)(rng);
    const auto amounts = split_cents(pop.total_cents[i], w);
    for (std::size_t x = 0; x < count; ++x) {
      const int month = months[x < t ? x : uniform_index(rng, t)];
      const std::size_t pcg = sample_index(rng, pop.spending[i]);
      int mcc;
      if (unit(rng) < spec.invalid_mcc_fraction) {
        mcc = 9999999;
      } else {
        mcc = 0;
        for (std::size_t b : member_of[i]) {
          const auto& choice = block_pcg[b][pcg];
          if (!choice.empty() && unit(rng) < spec.category_blocks[b].coupling) {
            mcc = choice[uniform_index(rng, choice.size())];
            break;
          }
        }
        if (!mcc) mcc = pcg_mccs[pcg][uniform_index(rng, pcg_mccs[pcg].size())];
      }
      auto prof = spec.pcg_weekday_profiles.find(static_cast<int>(pcg));
      const int weekday = static_cast<int>(
          sample_index(rng, prof == spec.pcg_weekday_profiles.end() ? pop.weekly[i] : prof->second));
      const std::int64_t begin = detail::month_start(spec.start_time, month);
      const int first = weekday_index(begin);
      const int ndays = detail::days_in_month(begin);
      std::vector<int> dates;
      for (int d = (weekday - first + 7) % 7; d < ndays; d += 7) dates.push_back(d);
      const int day = dates[uniform_index(rng, dates.size())];
      const std::int64_t ts = begin + std::int64_t{day} * 86400 + static_cast<std::int64_t>(uniform_index(rng, 86400));
      const Cents a = amounts[x];
      line = pop.ids[i];
      line += ',' + std::to_string(ts) + ',' + std::to_string(a / 100) + '.';
      const Cents c = a % 100;
      line += static_cast<char>('0' + c / 10);
      line += static_cast<char>('0' + c % 10);
      line += ',' + std::to_string(mcc) + '\n';
      out << line;
    }
  }
}

/// Both directions of every planted edge, plus callers that only ever dial out.
inline void write_events(std::ostream& out, const SynthPopulation& pop) {
  const auto& spec = pop.spec;
  out << "caller,callee,timestamp,kind,duration\n";
  Rng rng(derive_seed(spec.seed, "synth.events"));
  const std::int64_t begin = spec.start_time;
  const std::int64_t span = detail::month_start(spec.start_time, spec.months) - begin;
  auto emit = [&](const UserId& a, const UserId& b) {
    const std::int64_t ts = begin + static_cast<std::int64_t>(uniform_index(rng, static_cast<std::size_t>(span)));
    const bool call = rng() & 1;
    out << a << ',' << b << ',' << ts << ',' << (call ? "call" : "sms") << ','
        << (call ? 10 + static_cast<std::int64_t>(uniform_index(rng, 600)) : 0) << '\n';
  };
  for (const auto& e : pop.edges) {
    emit(pop.ids[e.u], pop.ids[e.v]);
    emit(pop.ids[e.v], pop.ids[e.u]);
  }
  for (std::size_t k = 0; k < spec.noise_nodes && !pop.ids.empty(); ++k) {
    const std::string caller = "x" + std::to_string(k + 1);
    emit(caller, pop.ids[uniform_index(rng, pop.ids.size())]);
  }
}

inline void write_demographics(std::ostream& out, const SynthPopulation& pop) {
  out << "user_id,age,gender\n";
  for (std::size_t i = 0; i < pop.ids.size(); ++i) {
    out << pop.ids[i] << ',' << (pop.age[i] ? std::to_string(*pop.age[i]) : "NA") << ','
        << (pop.gender[i] ? std::to_string(*pop.gender[i]) : "NA") << '\n';
  }
}

inline nlohmann::json ground_truth(const SynthPopulation& pop) {
  nlohmann::json j;
  j["seed"] = pop.spec.seed;
  j["spec"] = pop.spec;
  j["n_classes"] = pop.spec.n_classes;
  nlohmann::json classes = nlohmann::json::object();
  for (std::size_t i = 0; i < pop.ids.size(); ++i) classes[pop.ids[i]] = pop.cls[i];
  j["classes"] = classes;
  std::vector<std::size_t> sizes;
  for (int c = 1; c <= pop.spec.n_classes; ++c) sizes.push_back(pop.partition.size(c));
  j["class_sizes"] = sizes;
  j["amp_gini"] = pop.amp.empty() ? nlohmann::json(nullptr) : nlohmann::json(lorenz_and_gini(AmpTable::from_values(pop.amp)).gini);
  j["class_spending_means"] = pop.class_means;
  j["class_cash_means"] = pop.cash_means;
  j["class_weekday_profiles"] = pop.class_weekday;
  std::size_t embedded = 0;
  int circles = 0;
  for (int c : pop.circle) {
    embedded += c >= 0;
    circles = std::max(circles, c + 1);
  }
  j["circles"] = circles;
  j["embedded_users"] = embedded;
  nlohmann::json blocks = nlohmann::json::array();
  for (std::size_t b = 0; b < pop.block_members.size(); ++b) {
    blocks.push_back({{"mccs", pop.spec.category_blocks[b].mccs},
                      {"coupling", pop.spec.category_blocks[b].coupling},
                      {"members", pop.block_members[b].size()}});
  }
  j["category_blocks"] = blocks;
  std::size_t nodes = 0;
  {
    std::vector<char> seen(pop.ids.size(), 0);
    for (const auto& e : pop.edges)
      for (Node x : {e.u, e.v}) nodes += !seen[x]++;
  }
  j["graph"] = {{"nodes", nodes},
                {"edges", pop.edges.size()},
                {"edges_before_lcc", pop.edges_before_lcc},
                {"same_class_fraction", is_missing(pop.same_class_fraction) ? nlohmann::json(nullptr) : nlohmann::json(pop.same_class_fraction)},
                {"expected_same_class_fraction", pop.expected_same_class_fraction},
                {"noise_nodes", pop.spec.noise_nodes}};
  return j;
}

struct SynthFiles {
  std::string events, transactions, demographics, ground_truth;
};

/// Writes events.csv, transactions.csv, demographics.csv and ground_truth.json into `dir`.
inline SynthFiles generate(const SynthSpec& spec, const std::string& dir,
                           const CategoryDirectory& directory = CategoryDirectory::builtin()) {
  namespace fs = std::filesystem;
  auto pop = generate_population(spec);
  fs::create_directories(dir);
  SynthFiles f{(fs::path(dir) / "events.csv").string(), (fs::path(dir) / "transactions.csv").string(),
               (fs::path(dir) / "demographics.csv").string(), (fs::path(dir) / "ground_truth.json").string()};
  auto open = [](const std::string& p) {
    std::ofstream o(p, std::ios::binary);
    if (!o) throw Error("cannot write '" + p + "'");
    return o;
  };
  {
    auto o = open(f.events);
    write_events(o, pop);
  }
  {
    auto o = open(f.transactions);
    write_transactions(o, pop, directory);
  }
  {
    auto o = open(f.demographics);
    write_demographics(o, pop);
  }
  {
    auto o = open(f.ground_truth);
    o << ground_truth(pop).dump(1) << '\n';
  }
  return f;
}

// ---------------------------------------------------------------------------
// Targeted generators for single measures

/// r(c, u) with independent Gamma(shape) amounts per category: no correlation between categories.
inline CategorySpendTable independent_category_table(std::size_t users, std::size_t categories, double shape,
                                                     std::uint64_t seed) {
  CategorySpendTable t;
  Rng rng(derive_seed(seed, "synth.independent"));
  for (std::size_t c = 0; c < categories; ++c) {
    t.categories.push_back(static_cast<int>(1000 + c));
    t.purchases.push_back(users);
    t.purchasers.push_back(users);
  }
  std::gamma_distribution<double> g(shape, 1.0);
  for (std::size_t u = 0; u < users; ++u) {
    std::vector<std::pair<std::uint32_t, double>> row;
    double sum = 0;
    for (std::size_t c = 0; c < categories; ++c) {
      row.emplace_back(static_cast<std::uint32_t>(c), g(rng));
      sum += row.back().second;
    }
    for (auto& [c, v] : row) v /= sum;
    t.users.push_back(std::to_string(u + 1));
    t.rows.push_back(std::move(row));
  }
  return t;
}

struct PlantedBlocks {
  WeightedGraph graph;
  std::vector<int> truth;
};

/// Planted partition: `blocks` groups of `size` nodes, edge probabilities p_in / p_out and
/// weights w_in / w_out.
inline PlantedBlocks planted_block_graph(std::size_t blocks, std::size_t size, double p_in, double p_out,
                                         double w_in, double w_out, std::uint64_t seed) {
  PlantedBlocks out;
  Rng rng(derive_seed(seed, "synth.blocks_graph"));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = blocks * size;
  out.graph.n = n;
  for (std::size_t i = 0; i < n; ++i) out.truth.push_back(static_cast<int>(i / size));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool inside = out.truth[i] == out.truth[j];
      if (unit(rng) < (inside ? p_in : p_out))
        out.graph.edges.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), inside ? w_in : w_out});
    }
  return out;
}

struct PlantedClusters {
  std::vector<Point> points;
  std::vector<int> truth;
  std::vector<Point> centers;
};

/// `k` spherical Gaussian clusters with standard deviation sigma whose centers are at least
/// `separation` sigmas apart.
inline PlantedClusters planted_clusters(int k, std::size_t per_cluster, std::size_t dim, double separation,
                                        double sigma, std::uint64_t seed) {
  PlantedClusters out;
  Rng rng(derive_seed(seed, "synth.clusters"));
  const double side = separation * sigma * std::cbrt(static_cast<double>(k)) * 2.0;
  std::uniform_real_distribution<double> box(0.0, side);
  for (int attempts = 0; static_cast<int>(out.centers.size()) < k; ++attempts) {
    if (attempts > 100000) throw Error("could not place separated cluster centers");
    Point c(dim);
    for (double& x : c) x = box(rng);
    bool ok = true;
    for (const auto& o : out.centers)
      if (std::sqrt(squared_distance(c, o)) < separation * sigma) ok = false;
    if (ok) out.centers.push_back(std::move(c));
  }
  std::normal_distribution<double> g(0.0, sigma);
  for (int c = 0; c < k; ++c)
    for (std::size_t p = 0; p < per_cluster; ++p) {
      Point x = out.centers[static_cast<std::size_t>(c)];
      for (double& v : x) v += g(rng);
      out.points.push_back(std::move(x));
      out.truth.push_back(c);
    }
  return out;
}

/// Two samples with exactly the requested sample Pearson correlation.
inline std::pair<std::vector<double>, std::vector<double>> correlated_normals(std::size_t n, double rho, Rng& rng) {
  std::normal_distribution<double> g;
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = g(rng);
  for (auto& v : y) v = g(rng);
  auto center_scale = [](std::vector<double>& v) {
    double m = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0;
    for (double& a : v) {
      a -= m;
      ss += a * a;
    }
    const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
    for (double& a : v) a /= sd;
  };
  center_scale(x);
  center_scale(y);
  // remove the component of y along x, then mix
  double dot = 0, xx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    dot += x[i] * y[i];
    xx += x[i] * x[i];
  }
  for (std::size_t i = 0; i < n; ++i) y[i] -= dot / xx * x[i];
  center_scale(y);
  for (std::size_t i = 0; i < n; ++i) y[i] = rho * x[i] + std::sqrt(1 - rho * rho) * y[i];
  return {x, y};
}

/// Profiles, partition and spend table for categories whose purchasers have planted age
/// and SEG levels with the given correlation across categories. Every purchaser spends on
/// exactly one category.
struct FeaturePopulation {
  Profiles profiles;
  ClassPartition partition;
  CategorySpendTable table;
};

inline FeaturePopulation feature_population(std::size_t categories, std::size_t purchasers, double age_seg_rho,
                                            int n_classes, std::uint64_t seed) {
  FeaturePopulation out;
  Rng rng(derive_seed(seed, "synth.features"));
  auto [za, zs] = correlated_normals(categories, age_seg_rho, rng);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::map<UserId, int, IdLess> assignment;
  const double mid = (n_classes + 1) / 2.0;
  std::size_t next = 1;
  for (std::size_t c = 0; c < categories; ++c) {
    out.table.categories.push_back(static_cast<int>(1000 + c));
    out.table.purchases.push_back(purchasers);
    out.table.purchasers.push_back(purchasers);
    const double male = 0.2 + 0.6 * unit(rng);
    for (std::size_t p = 0; p < purchasers; ++p) {
      const UserId id = std::to_string(next++);
      EgoProfile prof;
      prof.user_id = id;
      prof.age = static_cast<int>(std::lround(40 + 10 * za[c] + 5 * g(rng)));
      prof.gender = unit(rng) < male ? 1 : 0;
      const double s = mid + 1.5 * zs[c] + 1.0 * g(rng);
      assignment[id] = std::clamp(static_cast<int>(std::lround(s)), 1, n_classes);
      out.profiles.emplace(id, std::move(prof));
      out.table.users.push_back(id);
      out.table.rows.push_back({{static_cast<std::uint32_t>(c), 1.0}});
    }
  }
  out.partition = ClassPartition::from_assignment(assignment, n_classes);
  return out;
}

/// `per_class` users in each class with purchases on days drawn from that class's profile.
struct WeeklyPopulation {
  Profiles profiles;
  ClassPartition partition;
};

inline WeeklyPopulation weekly_population(const std::vector<WeekArray>& class_profiles, std::size_t per_class,
                                          std::size_t tx_per_user, std::uint64_t seed,
                                          const CategoryDirectory& directory = CategoryDirectory::builtin()) {
  WeeklyPopulation out;
  Rng rng(derive_seed(seed, "synth.weekly"));
  std::map<UserId, int, IdLess> assignment;
  std::size_t next = 1;
  const int n = static_cast<int>(class_profiles.size());
  for (int j = 1; j <= n; ++j)
    for (std::size_t u = 0; u < per_class; ++u) {
      const UserId id = std::to_string(next++);
      EgoProfile p = empty_profile(id, directory);
      for (std::size_t t = 0; t < tx_per_user; ++t) {
        const auto day = sample_index(rng, class_profiles[static_cast<std::size_t>(j - 1)]);
        const auto pcg = 1 + uniform_index(rng, kNonCashPcgCount);
        const Cents a = 100 + static_cast<Cents>(std::exponential_distribution<double>(1.0 / 3000.0)(rng));
        p.weekly_spend[pcg][day] += a;
        p.pcg_spend[pcg] += a;
        p.monthly_spend[static_cast<int>(t % 2)] += a;
      }
      assignment[id] = j;
      out.profiles.emplace(id, std::move(p));
    }
  out.partition = ClassPartition::from_assignment(assignment, n);
  return out;
}

}  // namespace socioscope
