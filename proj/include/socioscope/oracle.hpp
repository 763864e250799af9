#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "socioscope/class_matrix.hpp"
#include "socioscope/common.hpp"
#include "socioscope/csv.hpp"
#include "socioscope/louvain.hpp"
#include "socioscope/socio.hpp"

namespace socioscope {

enum class Verdict { Pass, Fail, MissingInput, NotApplicable };

inline std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::MissingInput: return "missing-input";
    case Verdict::NotApplicable: return "not-applicable";
  }
  return "?";
}

struct OracleCheck {
  std::string criterion;
  Verdict verdict = Verdict::MissingInput;
  double value = kMissing;
  std::string target;
  std::string detail;
};

struct OracleReport {
  std::uint64_t seed = 0;
  std::vector<OracleCheck> checks;

  bool all_pass() const {
    for (const auto& c : checks)
      if (c.verdict == Verdict::Fail || c.verdict == Verdict::MissingInput) return false;
    return true;
  }
  nlohmann::json to_json() const {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : checks) {
      rows.push_back({{"criterion", c.criterion},
                      {"verdict", verdict_name(c.verdict)},
                      {"value", is_missing(c.value) ? nlohmann::json(nullptr) : nlohmann::json(c.value)},
                      {"target", c.target},
                      {"detail", c.detail}});
    }
    return {{"seed", seed}, {"checks", rows}, {"all_pass", all_pass()}};
  }
};

namespace detail {

inline std::optional<std::string> find_output(const std::filesystem::path& root, const std::string& stage,
                                              const std::string& file) {
  for (auto p : {root / stage / file, root / file})
    if (std::filesystem::exists(p)) return p.string();
  return std::nullopt;
}

inline ClassMatrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  return ClassMatrix::read_csv(in);
}

inline std::string fmt(double v) { return csv::format(v); }

/// X.csv -> X_sigma.csv next to it, when present.
inline std::optional<ClassMatrix> sigma_for(const std::string& path) {
  auto p = std::filesystem::path(path);
  p.replace_filename(p.stem().string() + "_sigma" + p.extension().string());
  if (!std::filesystem::exists(p)) return std::nullopt;
  return read_matrix_file(p.string());
}

inline constexpr const char* kDiagonalTarget = "mean < 1, none > 1 + 3 sigma";

// Small top classes give noisy diagonal cells, so a single entry above 1 only fails the
// check when it sits more than 3 sigma above the null.
inline OracleCheck diagonal_check(const std::string& name, const ClassMatrix& L, const std::optional<ClassMatrix>& sigma) {
  double sum = 0, worst_z = -1e300;
  int defined = 0, high = 0;
  for (int i = 1; i <= L.size(); ++i) {
    if (is_missing(L(i, i))) continue;
    sum += L(i, i);
    ++defined;
    const double s = sigma && i <= sigma->size() ? (*sigma)(i, i) : kMissing;
    if (L(i, i) >= 1) {
      if (is_missing(s) || s <= 0 || L(i, i) - 1 > 3 * s) ++high;
      if (!is_missing(s) && s > 0) worst_z = std::max(worst_z, (L(i, i) - 1) / s);
    }
  }
  if (!defined) return {name, Verdict::Fail, kMissing, kDiagonalTarget, "no defined diagonal entries"};
  const double mean = sum / defined;
  std::string d = std::to_string(defined) + " defined diagonal entries, mean shown";
  if (worst_z > -1e300) d += ", largest entry >= 1 sits " + fmt(worst_z) + " sigma above";
  return {name, mean < 1 && high == 0 ? Verdict::Pass : Verdict::Fail, mean, kDiagonalTarget, d};
}

}  // namespace detail

/// Compares pipeline outputs under `outputs` (stage subdirectories or a flat directory)
/// with a synth ground-truth document. `outputs_seed` is the seed the pipeline ran with;
/// a mismatch is an error.
inline OracleReport oracle_report(const nlohmann::json& truth, const std::string& outputs,
                                  std::optional<std::uint64_t> outputs_seed = std::nullopt) {
  namespace fs = std::filesystem;
  OracleReport rep;
  if (!truth.contains("seed")) throw Error("ground truth has no seed");
  rep.seed = truth.at("seed").get<std::uint64_t>();
  const fs::path root(outputs);
  if (!outputs_seed && fs::exists(root / "manifest.json")) {
    std::ifstream in(root / "manifest.json");
    auto m = nlohmann::json::parse(in, nullptr, false);
    if (!m.is_discarded() && m.contains("seed")) outputs_seed = m["seed"].get<std::uint64_t>();
  }
  if (outputs_seed && *outputs_seed != rep.seed) {
    throw Error("seed mismatch: ground truth " + std::to_string(rep.seed) + ", outputs " +
                std::to_string(*outputs_seed));
  }
  const double h = truth.contains("spec") ? truth["spec"].value("homophily", 0.0) : 0.0;

  auto missing = [&](const std::string& name, const std::string& target, const std::string& what) {
    rep.checks.push_back({name, Verdict::MissingInput, kMissing, target, what + " not found"});
  };

  // class recovery
  {
    const std::string name = "partition_nmi", target = ">= 0.99";
    auto path = detail::find_output(root, "socio", "partition.csv");
    if (!path || !truth.contains("classes")) {
      missing(name, target, "partition.csv");
    } else {
      std::ifstream in(*path);
      auto p = read_partition(in);
      std::vector<int> a, b;
      for (const auto& [id, cls] : truth["classes"].items()) {
        auto got = p.class_of(id);
        if (!got) continue;
        a.push_back(cls.get<int>());
        b.push_back(*got);
      }
      if (a.empty()) {
        rep.checks.push_back({name, Verdict::Fail, kMissing, target, "no user in common"});
      } else {
        const double nmi = normalized_mutual_information(a, b);
        rep.checks.push_back({name, nmi >= 0.99 ? Verdict::Pass : Verdict::Fail, nmi, target,
                              std::to_string(a.size()) + " users compared"});
      }
    }
  }

  // inequality
  {
    const std::string name = "amp_gini", target = "planted +- 0.01";
    auto path = detail::find_output(root, "socio", "socio.json");
    if (!path || truth.value("amp_gini", nlohmann::json()).is_null()) {
      missing(name, target, "socio.json");
    } else {
      std::ifstream in(*path);
      auto j = nlohmann::json::parse(in);
      const double g = j.at("gini").get<double>(), want = truth["amp_gini"].get<double>();
      rep.checks.push_back({name, std::abs(g - want) <= 0.01 ? Verdict::Pass : Verdict::Fail, g, target,
                            "planted " + detail::fmt(want)});
    }
  }

  // homophily in spending vectors
  {
    const std::string name_d = "L_SV_diagonal", name_r = "L_SV_remote";
    auto path = detail::find_output(root, "nullmodel", "L_SV.csv");
    if (!path) {
      missing(name_d, detail::kDiagonalTarget, "L_SV.csv");
      missing(name_r, "mean > 1", "L_SV.csv");
    } else if (h <= 0) {
      rep.checks.push_back({name_d, Verdict::NotApplicable, kMissing, detail::kDiagonalTarget, "no planted homophily"});
      rep.checks.push_back({name_r, Verdict::NotApplicable, kMissing, "mean > 1", "no planted homophily"});
    } else {
      auto L = detail::read_matrix_file(*path);
      rep.checks.push_back(detail::diagonal_check(name_d, L, detail::sigma_for(*path)));
      double sum = 0;
      int cnt = 0;
      for (int i = 1; i <= L.size(); ++i)
        for (int j = 1; j <= L.size(); ++j)
          if (std::abs(i - j) >= 6 && !is_missing(L(i, j))) {
            sum += L(i, j);
            ++cnt;
          }
      if (!cnt) {
        rep.checks.push_back({name_r, Verdict::NotApplicable, kMissing, "mean > 1", "no entries with |i-j| >= 6"});
      } else {
        const double m = sum / cnt;
        rep.checks.push_back({name_r, m > 1 ? Verdict::Pass : Verdict::Fail, m, "mean > 1",
                              std::to_string(cnt) + " entries with |i-j| >= 6"});
      }
    }
  }

  // homophily in weekly profiles
  {
    const std::string name = "Lambda_diagonal";
    auto path = detail::find_output(root, "nullmodel", "Lambda_k2-17.csv");
    const bool planted = h > 0 && truth.contains("spec") && truth["spec"].value("circle_weekday_shift", 0.0) > 0;
    if (!path) {
      missing(name, detail::kDiagonalTarget, "Lambda_k2-17.csv");
    } else if (!planted) {
      rep.checks.push_back({name, Verdict::NotApplicable, kMissing, detail::kDiagonalTarget, "no planted weekday homophily"});
    } else {
      auto L = detail::read_matrix_file(*path);
      rep.checks.push_back(detail::diagonal_check(name, L, detail::sigma_for(*path)));
    }
  }

  // weekly class profiles
  {
    // small classes get a wider allowance, about 0.5 / sqrt(class size)
    const std::string name = "weekly_class_profiles", target = "max |w - planted| <= max(0.02, 0.5/sqrt(n_j))";
    auto path = detail::find_output(root, "dynamics", "weekly_class.csv");
    if (!path || !truth.contains("class_weekday_profiles")) {
      missing(name, target, "weekly_class.csv");
    } else {
      std::ifstream in(*path);
      csv::Reader r(in, {"group", "d0", "d1", "d2", "d3", "d4", "d5", "d6"});
      std::vector<std::string> f;
      double worst = 0;
      int rows = 0, over = 0;
      const auto& planted = truth["class_weekday_profiles"];
      const auto sizes = truth.value("class_sizes", std::vector<std::size_t>{});
      while (r.next(f)) {
        if (f[0].size() < 2 || f[0][0] != 's') continue;
        const int j = std::stoi(f[0].substr(1));
        if (j < 1 || j > static_cast<int>(planted.size())) continue;
        const auto idx = static_cast<std::size_t>(j - 1);
        const double tol = idx < sizes.size() && sizes[idx] > 0
                               ? std::max(0.02, 0.5 / std::sqrt(static_cast<double>(sizes[idx])))
                               : 0.02;
        double dev = 0;
        for (int d = 0; d < 7; ++d)
          dev = std::max(dev, std::abs(csv::parse_cell(f[static_cast<std::size_t>(d + 1)]) -
                                       planted[idx][static_cast<std::size_t>(d)].get<double>()));
        worst = std::max(worst, dev);
        over += dev > tol;
        ++rows;
      }
      if (!rows) {
        rep.checks.push_back({name, Verdict::Fail, kMissing, target, "no class rows"});
      } else {
        rep.checks.push_back({name, over == 0 ? Verdict::Pass : Verdict::Fail, worst, target,
                              std::to_string(rows) + " classes compared, " + std::to_string(over) + " outside"});
      }
    }
  }

  // co-purchased category blocks
  {
    const std::string name = "category_blocks", target = "mean within-block rho > 1";
    const auto blocks = truth.value("category_blocks", nlohmann::json::array());
    auto path = detail::find_output(root, "catnet", "category_matrix.csv");
    if (blocks.empty()) {
      rep.checks.push_back({name, Verdict::NotApplicable, kMissing, target, "no planted blocks"});
    } else if (!path) {
      missing(name, target, "category_matrix.csv");
    } else {
      std::ifstream in(*path);
      std::string line;
      std::getline(in, line);
      auto header = csv::split(line);
      std::map<int, std::size_t> col;
      for (std::size_t i = 1; i < header.size(); ++i) col[std::stoi(header[i])] = i - 1;
      std::vector<std::vector<double>> rho;
      std::map<int, std::size_t> row;
      while (std::getline(in, line)) {
        if (csv::trim(line).empty()) continue;
        auto f = csv::split(line);
        row[std::stoi(f[0])] = rho.size();
        std::vector<double> v;
        for (std::size_t i = 1; i < f.size(); ++i) v.push_back(csv::parse_cell(f[i]));
        rho.push_back(std::move(v));
      }
      double worst = kMissing;
      int scored = 0;
      std::string detail;
      for (const auto& b : blocks) {
        std::vector<int> mccs;
        for (int m : b.at("mccs").get<std::vector<int>>())
          if (row.count(m) && col.count(m)) mccs.push_back(m);
        double sum = 0;
        int cnt = 0;
        for (std::size_t x = 0; x < mccs.size(); ++x)
          for (std::size_t y = x + 1; y < mccs.size(); ++y) {
            const double v = rho[row[mccs[x]]][col[mccs[y]]];
            if (!is_missing(v)) {
              sum += v;
              ++cnt;
            }
          }
        if (!cnt) continue;
        const double m = sum / cnt;
        worst = is_missing(worst) ? m : std::min(worst, m);
        ++scored;
      }
      if (!scored) {
        rep.checks.push_back({name, Verdict::Fail, kMissing, target, "no block has two retained categories"});
      } else {
        rep.checks.push_back({name, worst > 1 ? Verdict::Pass : Verdict::Fail, worst, target,
                              std::to_string(scored) + " blocks scored, weakest shown"});
      }
    }
  }
  return rep;
}

inline OracleReport oracle_report(const std::string& ground_truth_path, const std::string& outputs,
                                  std::optional<std::uint64_t> outputs_seed = std::nullopt) {
  std::ifstream in(ground_truth_path);
  if (!in) throw Error("cannot open ground truth '" + ground_truth_path + "'");
  return oracle_report(nlohmann::json::parse(in), outputs, outputs_seed);
}

inline void write_oracle_table(std::ostream& out, const OracleReport& r) {
  for (const auto& c : r.checks) {
    std::string v = verdict_name(c.verdict), n = c.criterion;
    v.resize(std::max<std::size_t>(v.size(), 15), ' ');
    n.resize(std::max<std::size_t>(n.size(), 22), ' ');
    out << v << ' ' << n << ' ' << detail::fmt(c.value) << "  (target " << c.target << ")";
    if (!c.detail.empty()) out << "  " << c.detail;
    out << '\n';
  }
}

}  // namespace socioscope
