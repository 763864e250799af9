#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "socioscope/catnet.hpp"
#include "socioscope/common.hpp"
#include "socioscope/directory.hpp"
#include "socioscope/dynamics.hpp"
#include "socioscope/ingest.hpp"
#include "socioscope/kmeans.hpp"
#include "socioscope/louvain.hpp"
#include "socioscope/nullmodel.hpp"
#include "socioscope/oracle.hpp"
#include "socioscope/socio.hpp"
#include "socioscope/spending.hpp"

namespace socioscope {

struct RunConfig {
  // inputs
  std::string events;
  std::string transactions;
  std::string demographics;  // optional
  std::string directory;     // optional MCC directory CSV; built-in table otherwise
  std::string ground_truth;  // optional synth ground truth for an oracle run
  std::string out = "socioscope_out";

  // parameters
  int n_classes = 9;
  double swaps_factor = 5.0;
  std::size_t ensemble = 100;
  double rho_min = 1.5;
  std::size_t support_min = 1000;
  std::size_t min_purchases = 100;
  int min_active_months = 2;
  std::uint64_t seed = 42;
  std::int64_t utc_offset = 0;
  double tail_fraction = 0.1;
  int kmeans_min = 2;
  int kmeans_max = 25;
  int kmeans_restarts = 10;
  int gap_references = 20;
  std::string afs_mode = "per-user";         // per-user | per-value
  std::string correlation_mean = "all-users";  // all-users | purchasers
  bool standardize = true;                      // z-score AFS triplets before k-means
  std::vector<double> removal_fractions = {0.25, 0.5, 0.75};
  std::size_t removal_repeats = 5;
  bool spend_weighted = false;

  // execution only; not part of any hash
  unsigned threads = 0;
  std::set<std::string> skip;
  bool force = false;

  void validate() const {
    if (n_classes < 2) throw Error("n_classes must be >= 2");
    if (!(swaps_factor > 0)) throw Error("swaps_factor must be positive");
    if (ensemble < 1) throw Error("ensemble must be >= 1");
    if (!(rho_min > 0)) throw Error("rho_min must be positive");
    if (min_active_months < 1) throw Error("min_active_months must be >= 1");
    if (kmeans_min < 1 || kmeans_max < kmeans_min) throw Error("bad k-means range");
    if (afs_mode != "per-user" && afs_mode != "per-value") throw Error("afs_mode must be per-user or per-value");
    if (correlation_mean != "all-users" && correlation_mean != "purchasers")
      throw Error("correlation_mean must be all-users or purchasers");
    for (double f : removal_fractions)
      if (!(f >= 0 && f < 1)) throw Error("removal fractions must lie in [0, 1)");
    for (const auto& s : skip)
      if (s != "ingest" && s != "socio" && s != "spending" && s != "nullmodel" && s != "catnet" && s != "dynamics")
        throw Error("unknown stage '" + s + "'");
  }
};

inline const std::vector<std::string>& stage_names() {
  static const std::vector<std::string> names = {"ingest", "socio", "spending", "nullmodel", "catnet", "dynamics"};
  return names;
}

inline std::vector<std::string> stage_dependencies(const std::string& stage) {
  if (stage == "ingest") return {};
  if (stage == "socio") return {"ingest"};
  return {"ingest", "socio"};
}

namespace detail {

inline std::string fixed_double(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

/// Semantically meaningful parameters per stage, as canonical key=value text.
inline std::map<std::string, std::string> stage_parameters(const RunConfig& c, const std::string& stage) {
  std::map<std::string, std::string> p;
  if (stage == "ingest") {
    p["min_active_months"] = std::to_string(c.min_active_months);
    p["utc_offset"] = std::to_string(c.utc_offset);
  } else if (stage == "socio") {
    p["n_classes"] = std::to_string(c.n_classes);
    p["tail_fraction"] = fixed_double(c.tail_fraction);
  } else if (stage == "nullmodel") {
    p["swaps_factor"] = fixed_double(c.swaps_factor);
    p["ensemble"] = std::to_string(c.ensemble);
    p["seed"] = std::to_string(c.seed);
    std::string f;
    for (double x : c.removal_fractions) f += fixed_double(x) + ";";
    p["removal_fractions"] = f;
    p["removal_repeats"] = std::to_string(c.removal_repeats);
  } else if (stage == "catnet") {
    p["rho_min"] = fixed_double(c.rho_min);
    p["support_min"] = std::to_string(c.support_min);
    p["min_purchases"] = std::to_string(c.min_purchases);
    p["seed"] = std::to_string(c.seed);
    p["kmeans"] = std::to_string(c.kmeans_min) + ".." + std::to_string(c.kmeans_max);
    p["kmeans_restarts"] = std::to_string(c.kmeans_restarts);
    p["gap_references"] = std::to_string(c.gap_references);
    p["afs_mode"] = c.afs_mode;
    p["correlation_mean"] = c.correlation_mean;
    p["standardize"] = c.standardize ? "1" : "0";
  } else if (stage == "dynamics") {
    p["spend_weighted"] = c.spend_weighted ? "1" : "0";
  }
  return p;
}

inline std::uint64_t hash_text(const std::map<std::string, std::string>& p, std::uint64_t h = fnv1a("")) {
  for (const auto& [k, v] : p) {
    h = fnv1a(k, h);
    h = fnv1a("=", h);
    h = fnv1a(v, h);
    h = fnv1a("\n", h);
  }
  return h;
}

/// FNV-1a over the file bytes.
inline std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::uint64_t h = fnv1a("");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    h = fnv1a(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())), h);
  }
  return h;
}

inline std::string hex(std::uint64_t h) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

inline std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write '" + p.string() + "'");
  return o;
}

inline std::ifstream open_in(const std::filesystem::path& p) {
  std::ifstream i(p, std::ios::binary);
  if (!i) throw Error("cannot read '" + p.string() + "'");
  return i;
}

}  // namespace detail

/// Hash of every parameter that changes results (inputs paths, output dir and thread
/// count excluded).
inline std::string config_hash(const RunConfig& c) {
  std::uint64_t h = fnv1a("socioscope-config");
  for (const auto& s : stage_names()) {
    h = fnv1a(s, h);
    h = detail::hash_text(detail::stage_parameters(c, s), h);
  }
  return detail::hex(h);
}

// ---------------------------------------------------------------------------
// Stage implementations, shared by the CLI subcommands

struct IngestResult {
  SocialGraph graph;
  Profiles profiles;
  nlohmann::json summary;
};

inline IngestResult run_ingest(const std::string& events, const std::string& transactions,
                               const std::string& demographics, const CategoryDirectory& directory,
                               const ProfileOptions& opt) {
  IngestResult r;
  auto ev = parse_events(events);
  r.graph = filter_active_core(ev);
  auto tx = parse_transactions(transactions, directory);
  Demographics demo;
  if (!demographics.empty()) demo = parse_demographics(demographics);
  auto ps = assemble_profiles(tx.records, demo, directory, opt);
  r.profiles = std::move(ps.profiles);
  auto diag = tx.diagnostics;
  diag.insert(diag.end(), ps.diagnostics.begin(), ps.diagnostics.end());
  r.summary = {{"events", ev.size()},
               {"nodes", r.graph.node_count()},
               {"edges", r.graph.edge_count()},
               {"transactions", tx.records.size()},
               {"invalid_mcc_rows", tx.invalid_mcc_rows},
               {"rejected_rows", tx.rejected_rows},
               {"users", r.profiles.size()},
               {"excluded_inactive", ps.excluded_inactive},
               {"unknown_demographics", ps.unknown_demographics},
               {"diagnostics", diag}};
  return r;
}

inline void write_ingest(const std::filesystem::path& dir, const IngestResult& r, const CategoryDirectory& directory) {
  std::filesystem::create_directories(dir);
  {
    auto o = detail::open_out(dir / "graph.csv");
    write_graph(o, r.graph);
  }
  {
    auto o = detail::open_out(dir / "profiles.jsonl");
    write_profiles(o, r.profiles, directory);
  }
  auto o = detail::open_out(dir / "ingest.json");
  o << r.summary.dump(1) << '\n';
}

struct SocioResult {
  AmpTable amp;
  InequalitySummary inequality;
  ClassPartition partition;
  PyramidTable pyramid;
  nlohmann::json summary;
};

inline SocioResult run_socio(const Profiles& profiles, int n_classes, double tail_fraction) {
  SocioResult r;
  r.amp = compute_amp(profiles);
  r.inequality = lorenz_and_gini(r.amp);
  std::vector<std::string> diag = r.amp.diagnostics;
  try {
    r.inequality.pareto_alpha = estimate_pareto_alpha(r.amp, tail_fraction);
  } catch (const Error& e) {
    diag.push_back(std::string("Pareto exponent not estimated: ") + e.what());
  }
  r.partition = partition_classes(r.amp, n_classes);
  r.pyramid = demographics_pyramid(profiles, r.partition);
  std::vector<std::size_t> sizes;
  std::vector<double> means;
  for (int j = 1; j <= n_classes; ++j) {
    sizes.push_back(r.partition.size(j));
    means.push_back(r.partition.mean_amp(j));
  }
  r.summary = {{"users", r.amp.size()},
               {"gini", r.inequality.gini},
               {"pareto_alpha", r.inequality.pareto_alpha ? nlohmann::json(*r.inequality.pareto_alpha) : nlohmann::json(nullptr)},
               {"tail_fraction", tail_fraction},
               {"n_classes", n_classes},
               {"class_sizes", sizes},
               {"class_mean_amp", means},
               {"pyramid_skipped", r.pyramid.skipped},
               {"diagnostics", diag}};
  return r;
}

inline void write_lorenz(std::ostream& out, const InequalitySummary& s) {
  out << "f,C\n";
  for (const auto& [f, c] : s.lorenz) out << csv::format(f) << ',' << csv::format(c) << '\n';
}

inline void write_amp(std::ostream& out, const AmpTable& amp) {
  out << "user_id,amp\n";
  for (const auto& r : amp.rows()) out << csv::escape(r.user_id) << ',' << csv::format(r.amp) << '\n';
}

inline void write_socio(const std::filesystem::path& dir, const SocioResult& r) {
  std::filesystem::create_directories(dir);
  {
    auto o = detail::open_out(dir / "amp.csv");
    write_amp(o, r.amp);
  }
  {
    auto o = detail::open_out(dir / "lorenz.csv");
    write_lorenz(o, r.inequality);
  }
  {
    auto o = detail::open_out(dir / "partition.csv");
    write_partition(o, r.partition);
  }
  {
    auto o = detail::open_out(dir / "pyramid.csv");
    write_pyramid(o, r.pyramid);
  }
  auto o = detail::open_out(dir / "socio.json");
  o << r.summary.dump(1) << '\n';
}

inline void write_share_table(std::ostream& out, const ShareTable& t, const CategoryDirectory& directory, int n) {
  out << "pcg";
  for (int j = 1; j <= n; ++j) out << ",s" << j;
  out << ",total\n";
  for (std::size_t r = 0; r < t.pcgs.size(); ++r) {
    out << csv::escape(directory.pcg_name(t.pcgs[r]));
    for (double v : t.shares[r]) out << ',' << csv::format(v);
    out << ',' << csv::format(t.totals[r]) << '\n';
  }
}

/// Shares, class distances, dispersion and entropy into `dir`; returns a summary.
inline nlohmann::json run_spending(const Profiles& profiles, const ClassPartition& partition,
                                   const CategoryDirectory& directory, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const int n = partition.n_classes();
  auto sv = spending_vectors(profiles);
  {
    auto o = detail::open_out(dir / "shares.csv");
    write_share_table(o, class_share_distribution(profiles, partition, false), directory, n);
  }
  {
    auto o = detail::open_out(dir / "shares_per_capita.csv");
    write_share_table(o, class_share_distribution(profiles, partition, true), directory, n);
  }
  auto d_sv = class_distance_matrix(sv, partition, Subset::NonCash);
  auto d_k1 = class_distance_matrix(sv, partition, Subset::Cash);
  {
    auto o = detail::open_out(dir / "d_SV.csv");
    d_sv.write_csv(o);
  }
  {
    auto o = detail::open_out(dir / "d_k1.csv");
    d_k1.write_csv(o);
  }
  auto disp = class_dispersion(sv, partition, Subset::NonCash);
  {
    auto o = detail::open_out(dir / "dispersion.csv");
    o << "class,sigma,stddev,members\n";
    for (int j = 1; j <= n; ++j) {
      const auto& s = disp[static_cast<std::size_t>(j - 1)];
      o << j << ',' << csv::format(s.sigma) << ',' << csv::format(s.stddev) << ',' << s.members << '\n';
    }
  }
  auto ent = class_entropy(sv, partition, false);
  auto ent_cash = class_entropy(sv, partition, true);
  {
    auto o = detail::open_out(dir / "entropy.csv");
    o << "class,S_SV,S_SV_with_cash\n";
    for (int j = 1; j <= n; ++j)
      o << j << ',' << csv::format(ent[static_cast<std::size_t>(j - 1)]) << ','
        << csv::format(ent_cash[static_cast<std::size_t>(j - 1)]) << '\n';
  }
  std::vector<double> sigma;
  for (const auto& s : disp) sigma.push_back(s.sigma);
  return {{"vectors", sv.vectors.size()},
          {"d_SV_max", d_sv(1, n)},
          {"dispersion", sigma},
          {"entropy", ent},
          {"diagnostics", sv.diagnostics}};
}

struct NullModelOptions {
  RewirePlan plan;
  std::vector<double> removal_fractions = {0.25, 0.5, 0.75};
  std::size_t removal_repeats = 5;
};

namespace detail {
inline nlohmann::json matrix_summary(const ClassMatrix& m) {
  double diag = 0, off = 0;
  int nd = 0, no = 0;
  for (int i = 1; i <= m.size(); ++i)
    for (int j = 1; j <= m.size(); ++j) {
      if (is_missing(m(i, j))) continue;
      if (i == j) {
        diag += m(i, j);
        ++nd;
      } else {
        off += m(i, j);
        ++no;
      }
    }
  return {{"diagonal_mean", nd ? nlohmann::json(diag / nd) : nlohmann::json(nullptr)},
          {"off_diagonal_mean", no ? nlohmann::json(off / no) : nlohmann::json(nullptr)}};
}
}  // namespace detail

/// L_SV, L_k1, Lambda for k2-17 and k1 from one shared ensemble, edge assortativity per
/// PCG (observed and on one rewired copy) and its robustness to link removal.
inline nlohmann::json run_nullmodel(const SocialGraph& g, const Profiles& profiles, const ClassPartition& partition,
                                    const CategoryDirectory& directory, const NullModelOptions& opt,
                                    const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto sv = spending_vectors(profiles);
  auto wk_noncash = weekly_vectors(profiles, WeeklyScope::noncash());
  auto wk_cash = weekly_vectors(profiles, WeeklyScope::cash());
  auto nd_sv = node_data(g, sv, &partition, Subset::NonCash);
  auto nd_k1 = node_data(g, sv, &partition, Subset::Cash);
  auto nd_wn = node_data(g, wk_noncash, &partition);
  auto nd_wc = node_data(g, wk_cash, &partition);
  std::vector<NullMeasure> measures = {{&nd_sv, EdgeMetric::ComponentAbsDiff, "L_SV"},
                                       {&nd_k1, EdgeMetric::ComponentAbsDiff, "L_k1"},
                                       {&nd_wn, EdgeMetric::Euclidean, "Lambda_k2-17"},
                                       {&nd_wc, EdgeMetric::Euclidean, "Lambda_k1"}};
  auto results = null_ratios(g, measures, opt.plan);
  nlohmann::json summary = nlohmann::json::object();
  for (std::size_t q = 0; q < measures.size(); ++q) {
    const auto& r = results[q];
    const auto& label = measures[q].label;
    {
      auto o = detail::open_out(dir / (label + ".csv"));
      r.ratio.write_csv(o);
    }
    {
      auto o = detail::open_out(dir / (label + "_sigma.csv"));
      r.sigma.write_csv(o);
    }
    auto s = detail::matrix_summary(r.ratio);
    s["diagnostics"] = r.diagnostics;
    summary[label] = s;
  }

  // assortativity over the 17 PCG fractions
  auto nd_full = node_data(g, sv, nullptr, Subset::Full);
  RewirePlan one = opt.plan;
  one.seed = derive_seed(opt.plan.seed, "assortativity");
  auto rewired = rewire(g, one);
  {
    auto o = detail::open_out(dir / "assortativity.csv");
    o << "pcg,name,rho,rho_rewired,edges,spenders\n";
    for (std::size_t c = 0; c < nd_full.dim; ++c) {
      auto a = edge_assortativity(g.edges(), nd_full, c);
      auto b = edge_assortativity(rewired.edges(), nd_full, c);
      o << c << ',' << csv::escape(directory.pcg_name(static_cast<int>(c))) << ',' << csv::format(a.rho) << ','
        << csv::format(b.rho) << ',' << a.edges << ',' << a.spenders << '\n';
    }
  }
  auto rob = robustness_by_removal(g, nd_full, opt.removal_fractions, opt.removal_repeats,
                                   derive_seed(opt.plan.seed, "robustness"));
  {
    auto o = detail::open_out(dir / "robustness.csv");
    o << "pcg,name,full";
    for (double f : rob.fractions) o << ",removed_" << csv::format(f);
    o << '\n';
    for (std::size_t c : rob.order) {
      o << c << ',' << csv::escape(directory.pcg_name(static_cast<int>(c))) << ',' << csv::format(rob.full[c]);
      for (std::size_t fi = 0; fi < rob.fractions.size(); ++fi) o << ',' << csv::format(rob.rho[fi][c]);
      o << '\n';
    }
  }
  summary["ensemble"] = opt.plan.ensemble_size;
  summary["swap_attempts"] = opt.plan.attempts_for(g.edge_count());
  summary["robustness_diagnostics"] = rob.diagnostics;
  return summary;
}

struct CatnetOptions {
  double rho_min = 1.5;
  std::size_t support_min = 1000;
  std::size_t min_purchases = 100;
  CorrelationMean mean = CorrelationMean::AllUsers;
  AfsMode afs = AfsMode::PerUser;
  KMeansOptions kmeans;
  bool standardize = true;
  std::uint64_t seed = 42;
};

inline nlohmann::json run_catnet(const Profiles& profiles, const ClassPartition& partition,
                                 const CategoryDirectory& directory, const CatnetOptions& opt,
                                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto table = category_spend_table(profiles, directory, opt.min_purchases);
  nlohmann::json summary = {{"categories", table.categories.size()}, {"users", table.users.size()}};
  std::vector<std::string> diag = table.diagnostics;
  auto features = average_feature_set(table, profiles, partition, opt.afs);

  if (table.categories.size() >= 2) {
    auto corr = category_correlation(table, opt.mean);
    diag.insert(diag.end(), corr.diagnostics.begin(), corr.diagnostics.end());
    {
      auto o = detail::open_out(dir / "category_matrix.csv");
      write_correlation_matrix(o, corr);
    }
    auto graph = threshold_graph(corr, opt.rho_min, opt.support_min);
    {
      auto o = detail::open_out(dir / "category_edges.csv");
      write_category_edges(o, graph);
    }
    auto comm = louvain_communities(graph.graph, opt.seed);
    {
      auto o = detail::open_out(dir / "communities.csv");
      write_communities(o, graph, comm, directory);
    }
    auto pooled = community_feature_sets(features, graph.nodes, comm);
    {
      auto o = detail::open_out(dir / "community_afs.csv");
      o << "community,size,age,gender,seg\n";
      std::vector<std::size_t> sizes(static_cast<std::size_t>(comm.count), 0);
      for (int l : comm.labels) ++sizes[static_cast<std::size_t>(l)];
      for (std::size_t c = 0; c < pooled.size(); ++c)
        o << c << ',' << sizes[c] << ',' << csv::format(pooled[c].age()) << ',' << csv::format(pooled[c].gender())
          << ',' << csv::format(pooled[c].seg()) << '\n';
    }
    summary["graph_nodes"] = graph.nodes.size();
    summary["graph_edges"] = graph.graph.edges.size();
    summary["communities"] = comm.count;
    summary["modularity"] = comm.modularity;
  } else {
    diag.push_back("fewer than two categories retained; correlation network not built");
  }

  std::vector<std::size_t> index;
  auto pts = feature_points(features, &index);
  if (opt.standardize) pts = standardize(std::move(pts));
  if (pts.size() >= 2) {
    auto kopt = opt.kmeans;
    kopt.k_max = std::min<int>(kopt.k_max, static_cast<int>(pts.size()) - 1);
    auto sel = kmeans_with_selection(pts, kopt);
    diag.insert(diag.end(), sel.diagnostics.begin(), sel.diagnostics.end());
    {
      auto o = detail::open_out(dir / "kmeans_criteria.csv");
      write_cluster_criteria(o, sel);
    }
    std::optional<int> chosen = sel.best_gap ? sel.best_gap : sel.best_ch;
    if (chosen)
      if (const auto* labels = sel.labels_for(*chosen))
        for (std::size_t i = 0; i < index.size(); ++i) features[index[i]].cluster = (*labels)[i];
    summary["best_k"] = {{"davies_bouldin", sel.best_db ? nlohmann::json(*sel.best_db) : nlohmann::json(nullptr)},
                         {"calinski_harabasz", sel.best_ch ? nlohmann::json(*sel.best_ch) : nlohmann::json(nullptr)},
                         {"gap", sel.best_gap ? nlohmann::json(*sel.best_gap) : nlohmann::json(nullptr)}};
  } else {
    diag.push_back("fewer than two complete feature sets; clustering skipped");
  }
  {
    auto o = detail::open_out(dir / "afs.csv");
    write_feature_sets(o, features, directory);
  }
  auto fc = feature_correlations(features);
  {
    auto o = detail::open_out(dir / "feature_correlations.csv");
    o << "pair,r,p_value,n\n";
    for (const auto& c : fc)
      o << csv::escape(c.pair) << ',' << csv::format(c.result.r) << ',' << csv::format(c.result.p_value) << ','
        << c.result.n << '\n';
  }
  nlohmann::json corr = nlohmann::json::object();
  for (const auto& c : fc) corr[c.pair] = c.result.defined() ? nlohmann::json(c.result.r) : nlohmann::json(nullptr);
  summary["feature_correlations"] = corr;
  summary["diagnostics"] = diag;
  return summary;
}

inline nlohmann::json run_dynamics(const Profiles& profiles, const ClassPartition& partition,
                                   const CategoryDirectory& directory, bool spend_weighted,
                                   const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto wv = weekly_vectors(profiles, WeeklyScope::global());
  nlohmann::json summary = {{"users", wv.size()}};
  std::vector<std::string> diag;
  for (auto [g, name] : {std::pair{Grouping::Class, "class"}, {Grouping::Age, "age"}, {Grouping::Gender, "gender"}}) {
    auto gp = group_profiles(wv, profiles, partition, g, spend_weighted);
    auto o = detail::open_out(dir / (std::string("weekly_") + name + ".csv"));
    write_group_profiles(o, gp);
    diag.insert(diag.end(), gp.diagnostics.begin(), gp.diagnostics.end());
    if (g == Grouping::Class) {
      std::vector<double> friday;
      for (const auto& p : gp.groups) friday.push_back(p.values[4]);
      summary["friday_share_by_class"] = friday;
    }
    summary[std::string("groups_") + name] = gp.groups.size();
  }
  auto o = detail::open_out(dir / "weekly_pcg.csv");
  write_pcg_profiles(o, per_pcg_profiles(profiles, partition, spend_weighted), directory);
  summary["diagnostics"] = diag;
  return summary;
}

// ---------------------------------------------------------------------------
// Orchestration

struct PipelineResult {
  int status = 0;
  nlohmann::json manifest;
};

namespace detail {

inline std::vector<std::string> list_files(const std::filesystem::path& root, const std::filesystem::path& dir) {
  std::vector<std::string> out;
  if (!std::filesystem::exists(dir)) return out;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(std::filesystem::relative(e.path(), root).generic_string());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

/// Runs the stages in order under cfg.out. A stage is reused when its key (inputs,
/// parameters, upstream keys) matches the previous manifest and its files still exist.
inline PipelineResult run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr) {
  namespace fs = std::filesystem;
  cfg.validate();
  for (auto [path, what] : {std::pair{&cfg.events, "events"}, {&cfg.transactions, "transactions"}}) {
    if (path->empty()) throw Error(std::string("no ") + what + " file given");
    if (!fs::exists(*path)) throw Error(std::string(what) + " file '" + *path + "' does not exist");
  }
  for (auto [path, what] : {std::pair{&cfg.demographics, "demographics"}, {&cfg.directory, "directory"},
                            {&cfg.ground_truth, "ground truth"}})
    if (!path->empty() && !fs::exists(*path)) throw Error(std::string(what) + " file '" + *path + "' does not exist");
  if (cfg.threads) set_thread_cap(cfg.threads);

  const fs::path root(cfg.out);
  fs::create_directories(root);
  nlohmann::json previous;
  if (fs::exists(root / "manifest.json") && !cfg.force) {
    std::ifstream in(root / "manifest.json");
    previous = nlohmann::json::parse(in, nullptr, false);
    if (previous.is_discarded()) previous = nlohmann::json();
  }
  const auto directory = cfg.directory.empty() ? CategoryDirectory::builtin() : CategoryDirectory::from_file(cfg.directory);

  // stage keys
  std::map<std::string, std::string> keys;
  {
    std::map<std::string, std::string> inputs = detail::stage_parameters(cfg, "ingest");
    inputs["events"] = detail::hex(detail::hash_file(cfg.events));
    inputs["transactions"] = detail::hex(detail::hash_file(cfg.transactions));
    inputs["demographics"] = cfg.demographics.empty() ? "-" : detail::hex(detail::hash_file(cfg.demographics));
    inputs["directory"] = cfg.directory.empty() ? "builtin" : detail::hex(detail::hash_file(cfg.directory));
    keys["ingest"] = detail::hex(detail::hash_text(inputs, fnv1a("ingest")));
  }
  for (const auto& s : stage_names()) {
    if (s == "ingest") continue;
    auto p = detail::stage_parameters(cfg, s);
    for (const auto& d : stage_dependencies(s)) p["upstream." + d] = keys[d];
    keys[s] = detail::hex(detail::hash_text(p, fnv1a(s)));
  }

  nlohmann::json manifest = {{"seed", cfg.seed},
                             {"config_hash", config_hash(cfg)},
                             {"complete", false},
                             {"stages", nlohmann::json::object()},
                             {"files", nlohmann::json::array()}};
  manifest["config"] = {{"events", cfg.events}, {"transactions", cfg.transactions}, {"demographics", cfg.demographics},
                        {"directory", cfg.directory}, {"ground_truth", cfg.ground_truth}};
  for (const auto& s : stage_names())
    for (const auto& [k, v] : detail::stage_parameters(cfg, s)) manifest["config"][k] = v;

  auto save = [&] {
    auto o = detail::open_out(root / "manifest.json");
    o << manifest.dump(1) << '\n';
  };

  // lazily loaded intermediate data
  std::optional<SocialGraph> graph;
  std::optional<Profiles> profiles;
  std::optional<ClassPartition> partition;
  auto get_graph = [&]() -> const SocialGraph& {
    if (!graph) {
      auto in = detail::open_in(root / "ingest" / "graph.csv");
      graph = read_graph(in);
    }
    return *graph;
  };
  auto get_profiles = [&]() -> const Profiles& {
    if (!profiles) {
      auto in = detail::open_in(root / "ingest" / "profiles.jsonl");
      profiles = read_profiles(in, directory);
    }
    return *profiles;
  };
  auto get_partition = [&]() -> const ClassPartition& {
    if (!partition) {
      auto in = detail::open_in(root / "socio" / "partition.csv");
      partition = read_partition(in, cfg.n_classes);
    }
    return *partition;
  };

  std::set<std::string> available;  // stages whose outputs are current
  int status = 0;
  for (const auto& s : stage_names()) {
    nlohmann::json entry = {{"key", keys[s]}, {"depends_on", stage_dependencies(s)}};
    const fs::path dir = root / s;
    if (cfg.skip.count(s)) {
      entry["status"] = "skipped";
      manifest["stages"][s] = entry;
      continue;
    }
    bool deps_ok = true;
    for (const auto& d : stage_dependencies(s)) deps_ok = deps_ok && available.count(d);
    if (!deps_ok) {
      entry["status"] = "blocked";
      entry["error"] = "an upstream stage was skipped or failed";
      manifest["stages"][s] = entry;
      continue;
    }
    // cache check
    if (previous.is_object() && previous["stages"].contains(s)) {
      const auto& old = previous["stages"][s];
      bool ok = old.value("key", "") == keys[s] &&
                (old.value("status", "") == "ran" || old.value("status", "") == "cached");
      if (ok && old.contains("outputs"))
        for (const auto& f : old["outputs"]) ok = ok && fs::exists(root / f.get<std::string>());
      if (ok) {
        entry["status"] = "cached";
        entry["outputs"] = old["outputs"];
        entry["summary"] = old.value("summary", nlohmann::json::object());
        entry["seconds"] = 0.0;
        manifest["stages"][s] = entry;
        available.insert(s);
        if (log) *log << "[" << s << "] cached\n";
        continue;
      }
    }
    if (log) *log << "[" << s << "] running\n" << std::flush;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if (fs::exists(dir)) fs::remove_all(dir);
      nlohmann::json summary;
      if (s == "ingest") {
        ProfileOptions po;
        po.min_active_months = cfg.min_active_months;
        po.utc_offset_seconds = cfg.utc_offset;
        auto r = run_ingest(cfg.events, cfg.transactions, cfg.demographics, directory, po);
        write_ingest(dir, r, directory);
        summary = r.summary;
        graph = std::move(r.graph);
        profiles = std::move(r.profiles);
      } else if (s == "socio") {
        auto r = run_socio(get_profiles(), cfg.n_classes, cfg.tail_fraction);
        write_socio(dir, r);
        summary = r.summary;
        partition = std::move(r.partition);
      } else if (s == "spending") {
        summary = run_spending(get_profiles(), get_partition(), directory, dir);
      } else if (s == "nullmodel") {
        NullModelOptions opt;
        opt.plan.swaps_factor = cfg.swaps_factor;
        opt.plan.ensemble_size = cfg.ensemble;
        opt.plan.seed = cfg.seed;
        opt.removal_fractions = cfg.removal_fractions;
        opt.removal_repeats = cfg.removal_repeats;
        summary = run_nullmodel(get_graph(), get_profiles(), get_partition(), directory, opt, dir);
      } else if (s == "catnet") {
        CatnetOptions opt;
        opt.rho_min = cfg.rho_min;
        opt.support_min = cfg.support_min;
        opt.min_purchases = cfg.min_purchases;
        opt.mean = cfg.correlation_mean == "purchasers" ? CorrelationMean::Purchasers : CorrelationMean::AllUsers;
        opt.afs = cfg.afs_mode == "per-value" ? AfsMode::PerValue : AfsMode::PerUser;
        opt.kmeans.k_min = cfg.kmeans_min;
        opt.kmeans.k_max = cfg.kmeans_max;
        opt.kmeans.restarts = cfg.kmeans_restarts;
        opt.kmeans.gap_references = cfg.gap_references;
        opt.kmeans.seed = cfg.seed;
        opt.standardize = cfg.standardize;
        opt.seed = cfg.seed;
        summary = run_catnet(get_profiles(), get_partition(), directory, opt, dir);
      } else if (s == "dynamics") {
        summary = run_dynamics(get_profiles(), get_partition(), directory, cfg.spend_weighted, dir);
      }
      entry["status"] = "ran";
      entry["summary"] = summary;
      entry["outputs"] = detail::list_files(root, dir);
      available.insert(s);
    } catch (const std::exception& e) {
      entry["status"] = "failed";
      entry["error"] = e.what();
      status = 1;
      if (log) *log << "[" << s << "] failed: " << e.what() << '\n';
    }
    entry["seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    manifest["stages"][s] = entry;
    save();
  }

  for (const auto& s : stage_names()) {
    const auto& e = manifest["stages"][s];
    if (!e.contains("outputs")) continue;
    for (const auto& f : e["outputs"])
      manifest["files"].push_back({{"path", f}, {"stage", s}, {"config_hash", manifest["config_hash"]}, {"seed", cfg.seed}});
  }

  if (!cfg.ground_truth.empty() && status == 0) {
    try {
      auto rep = oracle_report(cfg.ground_truth, cfg.out, cfg.seed);
      manifest["oracle"] = rep.to_json();
    } catch (const std::exception& e) {
      manifest["oracle"] = {{"error", e.what()}};
      status = 1;
    }
  }
  bool complete = status == 0;
  for (const auto& s : stage_names()) {
    const auto st = manifest["stages"][s].value("status", "");
    if (st != "ran" && st != "cached" && st != "skipped") complete = false;
  }
  manifest["complete"] = complete;
  save();
  return {status, manifest};
}

// ---------------------------------------------------------------------------
// Config file and report

/// Flat `key = value` lines; `#` starts a comment. Keys mirror RunConfig fields.
inline void apply_config_entry(RunConfig& c, const std::string& key, const std::string& value) {
  auto num = [&](auto& field) {
    if (!csv::parse_number(value, field)) throw Error("bad value for '" + key + "': '" + value + "'");
  };
  auto flag = [&](bool& field) {
    if (value == "1" || value == "true" || value == "yes") field = true;
    else if (value == "0" || value == "false" || value == "no") field = false;
    else throw Error("bad boolean for '" + key + "': '" + value + "'");
  };
  if (key == "events") c.events = value;
  else if (key == "transactions") c.transactions = value;
  else if (key == "demographics") c.demographics = value;
  else if (key == "directory") c.directory = value;
  else if (key == "ground_truth") c.ground_truth = value;
  else if (key == "out") c.out = value;
  else if (key == "n_classes") num(c.n_classes);
  else if (key == "swaps_factor") num(c.swaps_factor);
  else if (key == "ensemble") num(c.ensemble);
  else if (key == "rho_min") num(c.rho_min);
  else if (key == "support_min") num(c.support_min);
  else if (key == "min_purchases") num(c.min_purchases);
  else if (key == "min_active_months") num(c.min_active_months);
  else if (key == "seed") num(c.seed);
  else if (key == "utc_offset") num(c.utc_offset);
  else if (key == "tail_fraction") num(c.tail_fraction);
  else if (key == "kmeans_min") num(c.kmeans_min);
  else if (key == "kmeans_max") num(c.kmeans_max);
  else if (key == "kmeans_restarts") num(c.kmeans_restarts);
  else if (key == "gap_references") num(c.gap_references);
  else if (key == "afs_mode") c.afs_mode = value;
  else if (key == "correlation_mean") c.correlation_mean = value;
  else if (key == "standardize") flag(c.standardize);
  else if (key == "removal_repeats") num(c.removal_repeats);
  else if (key == "spend_weighted") flag(c.spend_weighted);
  else if (key == "threads") num(c.threads);
  else if (key == "removal_fractions") {
    c.removal_fractions.clear();
    for (const auto& f : csv::split(value)) {
      double x = 0;
      if (!csv::parse_number(f, x)) throw Error("bad removal fraction '" + f + "'");
      c.removal_fractions.push_back(x);
    }
  } else if (key == "skip") {
    c.skip.clear();
    for (const auto& f : csv::split(value))
      if (!csv::trim(f).empty()) c.skip.insert(std::string(csv::trim(f)));
  } else {
    throw Error("unknown config key '" + key + "'");
  }
}

inline RunConfig read_config(std::istream& in, RunConfig c = {}) {
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    auto t = csv::trim(line);
    if (t.empty()) continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos) throw ParseError(n, "expected key = value");
    apply_config_entry(c, std::string(csv::trim(t.substr(0, eq))), std::string(csv::trim(t.substr(eq + 1))));
  }
  return c;
}

inline RunConfig read_config(const std::string& path, RunConfig c = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config '" + path + "'");
  return read_config(in, std::move(c));
}

struct Report {
  std::string text;
  nlohmann::json json;
};

/// Human and machine summaries of a manifest. Sections for stages that did not produce
/// outputs are omitted; an incomplete manifest is flagged as partial.
inline Report report(const nlohmann::json& manifest) {
  Report r;
  std::ostringstream t;
  const bool complete = manifest.value("complete", false);
  r.json = {{"partial", !complete}, {"seed", manifest.value("seed", 0ULL)},
            {"config_hash", manifest.value("config_hash", "")}, {"stages", nlohmann::json::object()}};
  t << "socioscope report" << (complete ? "" : " (PARTIAL: manifest incomplete)") << '\n';
  t << "seed " << manifest.value("seed", 0ULL) << ", config " << manifest.value("config_hash", "") << "\n\n";
  auto num = [](const nlohmann::json& v) { return v.is_number() ? csv::format(v.get<double>()) : std::string("NA"); };
  const auto stages = manifest.value("stages", nlohmann::json::object());
  for (const auto& s : stage_names()) {
    if (!stages.contains(s)) continue;
    const auto& e = stages[s];
    const auto status = e.value("status", "");
    r.json["stages"][s] = {{"status", status}};
    if (status != "ran" && status != "cached") {
      t << "[" << s << "] " << status;
      if (e.contains("error")) t << ": " << e["error"].get<std::string>();
      t << "\n\n";
      continue;
    }
    const auto sum = e.value("summary", nlohmann::json::object());
    r.json["stages"][s]["summary"] = sum;
    t << "[" << s << "] " << status << '\n';
    if (s == "ingest") {
      t << "  nodes " << sum.value("nodes", 0) << ", edges " << sum.value("edges", 0) << ", users "
        << sum.value("users", 0) << ", transactions " << sum.value("transactions", 0) << '\n';
    } else if (s == "socio") {
      t << "  Gini " << num(sum.value("gini", nlohmann::json())) << ", Pareto alpha "
        << num(sum.value("pareto_alpha", nlohmann::json())) << '\n';
      t << "  class sizes " << sum.value("class_sizes", nlohmann::json::array()).dump() << '\n';
    } else if (s == "spending") {
      t << "  spending vectors " << sum.value("vectors", 0) << ", d_SV(1,n) " << num(sum.value("d_SV_max", nlohmann::json()))
        << '\n';
    } else if (s == "nullmodel") {
      for (const auto* label : {"L_SV", "L_k1", "Lambda_k2-17", "Lambda_k1"}) {
        const auto m = sum.value(label, nlohmann::json::object());
        t << "  " << label << ": diagonal mean " << num(m.value("diagonal_mean", nlohmann::json()))
          << ", off-diagonal mean " << num(m.value("off_diagonal_mean", nlohmann::json())) << '\n';
      }
    } else if (s == "catnet") {
      t << "  categories " << sum.value("categories", 0) << ", network nodes " << sum.value("graph_nodes", 0)
        << ", edges " << sum.value("graph_edges", 0) << ", communities " << sum.value("communities", 0)
        << ", modularity " << num(sum.value("modularity", nlohmann::json())) << '\n';
      if (sum.contains("best_k")) t << "  best k " << sum["best_k"].dump() << '\n';
      if (sum.contains("feature_correlations")) t << "  feature correlations " << sum["feature_correlations"].dump() << '\n';
    } else if (s == "dynamics") {
      t << "  Friday share by class " << sum.value("friday_share_by_class", nlohmann::json::array()).dump() << '\n';
    }
    t << '\n';
  }
  if (manifest.contains("oracle")) {
    const auto& o = manifest["oracle"];
    r.json["oracle"] = o;
    t << "[oracle]\n";
    if (o.contains("error")) {
      t << "  error: " << o["error"].get<std::string>() << '\n';
    } else {
      for (const auto& c : o["checks"]) {
        t << "  " << std::left << std::setw(16) << c["verdict"].get<std::string>() << std::setw(24)
          << c["criterion"].get<std::string>() << num(c["value"]) << "  (target " << c["target"].get<std::string>()
          << ")\n";
      }
    }
  }
  r.text = t.str();
  return r;
}

inline Report report(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw Error("cannot open manifest '" + manifest_path + "'");
  return report(nlohmann::json::parse(in));
}

}  // namespace socioscope
