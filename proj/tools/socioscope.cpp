// socioscope command-line front end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "socioscope/socioscope.hpp"

namespace fs = std::filesystem;
using namespace socioscope;

namespace {

CategoryDirectory load_directory(const std::string& path) {
  return path.empty() ? CategoryDirectory::builtin() : CategoryDirectory::from_file(path);
}

Profiles load_profiles(const std::string& path, const CategoryDirectory& directory) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profiles '" + path + "'");
  return read_profiles(in, directory);
}

ClassPartition load_partition(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open partition '" + path + "'");
  return read_partition(in);
}

SocialGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open graph '" + path + "'");
  return read_graph(in);
}

std::ofstream open_file(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream o(p, std::ios::binary);
  if (!o) throw Error("cannot write '" + p.string() + "'");
  return o;
}

// "2..25" or "15"
std::pair<int, int> parse_range(const std::string& s) {
  auto dots = s.find("..");
  int lo = 0, hi = 0;
  if (dots == std::string::npos) {
    if (!csv::parse_number(s, lo)) throw Error("bad k range '" + s + "'");
    return {lo, lo};
  }
  if (!csv::parse_number(s.substr(0, dots), lo) || !csv::parse_number(s.substr(dots + 2), hi))
    throw Error("bad k range '" + s + "'");
  return {lo, hi};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Socioeconomic consumption analysis on communication and purchase records"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "Worker cap (falls back to SOCIOSCOPE_THREADS)");
  std::string directory_path;
  app.add_option("--directory", directory_path, "MCC directory CSV (mcc,name,pcg); built-in table by default");

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Parse events, transactions and demographics into a graph and profiles");
  std::string events, transactions, demographics, ingest_out = "ingest";
  ProfileOptions popt;
  ingest->add_option("--events", events, "caller,callee,timestamp,kind,duration")->required();
  ingest->add_option("--transactions", transactions, "user_id,timestamp,amount,mcc")->required();
  ingest->add_option("--demographics", demographics, "user_id,age,gender");
  ingest->add_option("--min-active-months", popt.min_active_months)->capture_default_str();
  ingest->add_option("--utc-offset", popt.utc_offset_seconds, "Seconds added before taking the weekday")->capture_default_str();
  ingest->add_option("--out", ingest_out, "Output directory")->capture_default_str();

  // classes
  auto* classes = app.add_subcommand("classes", "AMP, Lorenz curve, Gini, Pareto exponent and class partition");
  std::string cls_input, cls_out = "partition.csv", cls_lorenz, cls_amp, cls_pyramid, cls_summary;
  int cls_n = 9;
  double tail_fraction = 0.1;
  classes->add_option("--n", cls_n, "Number of classes")->capture_default_str();
  classes->add_option("--input", cls_input, "profiles.jsonl")->required();
  classes->add_option("--out", cls_out, "Partition CSV")->capture_default_str();
  classes->add_option("--lorenz", cls_lorenz, "Lorenz curve CSV f,C");
  classes->add_option("--amp", cls_amp, "Per-user AMP CSV");
  classes->add_option("--pyramid", cls_pyramid, "Population pyramid CSV");
  classes->add_option("--summary", cls_summary, "JSON summary");
  classes->add_option("--tail-fraction", tail_fraction, "Share of largest AMPs used by the Hill estimator")->capture_default_str();

  // spending
  auto* spending = app.add_subcommand("spending", "Class shares, class distances, dispersion and entropy");
  std::string sp_profiles, sp_partition, sp_out = "spending";
  spending->add_option("--profiles", sp_profiles)->required();
  spending->add_option("--partition", sp_partition)->required();
  spending->add_option("--out-matrices", sp_out, "Output directory")->capture_default_str();

  // nullmodel
  auto* nullmodel = app.add_subcommand("nullmodel", "Null-model ratios L and Lambda, assortativity and robustness");
  std::string nm_graph, nm_profiles, nm_partition, nm_out = "nullmodel", nm_subset = "k2-17", nm_measure = "L";
  RewirePlan plan;
  bool nm_assort = false;
  nullmodel->add_option("--graph", nm_graph)->required();
  nullmodel->add_option("--profiles", nm_profiles)->required();
  nullmodel->add_option("--partition", nm_partition)->required();
  nullmodel->add_option("--swaps-factor", plan.swaps_factor)->capture_default_str();
  nullmodel->add_option("--ensemble", plan.ensemble_size)->capture_default_str();
  nullmodel->add_option("--seed", plan.seed)->capture_default_str();
  nullmodel->add_option("--subset", nm_subset, "k2-17 | k1 | k1-17")->capture_default_str();
  nullmodel->add_option("--measure", nm_measure, "L (spending vectors) | lambda (weekly vectors)")->capture_default_str();
  nullmodel->add_flag("--assortativity", nm_assort, "Also write per-PCG assortativity and its robustness");
  nullmodel->add_flag("--verify", plan.verify_members, "Check degrees and simplicity of every ensemble member");
  nullmodel->add_option("--out", nm_out, "Output directory")->capture_default_str();

  // catnet
  auto* catnet = app.add_subcommand("catnet", "Category correlation network, communities, AFS and clustering");
  std::string cn_profiles, cn_partition, cn_out = "catnet", cn_k = "2..25", cn_afs = "per-user", cn_mean = "all-users";
  CatnetOptions copt;
  catnet->add_option("--profiles", cn_profiles)->required();
  catnet->add_option("--partition", cn_partition)->required();
  catnet->add_option("--rho-min", copt.rho_min)->capture_default_str();
  catnet->add_option("--support-min", copt.support_min)->capture_default_str();
  catnet->add_option("--min-purchases", copt.min_purchases)->capture_default_str();
  catnet->add_option("--kmeans", cn_k, "k range lo..hi")->capture_default_str();
  catnet->add_option("--afs", cn_afs, "per-user | per-value")->capture_default_str();
  catnet->add_option("--mean", cn_mean, "all-users | purchasers")->capture_default_str();
  catnet->add_option("--seed", copt.seed)->capture_default_str();
  bool cn_raw = false;
  catnet->add_flag("--no-standardize", cn_raw, "Cluster raw AFS triplets instead of z-scores");
  catnet->add_option("--out", cn_out, "Output directory")->capture_default_str();

  // dynamics
  auto* dynamics = app.add_subcommand("dynamics", "Weekly purchase profiles per group");
  std::string dy_profiles, dy_partition, dy_group = "class", dy_scope = "global", dy_out;
  bool dy_per_pcg = false, dy_weighted = false;
  dynamics->add_option("--profiles", dy_profiles)->required();
  dynamics->add_option("--partition", dy_partition)->required();
  dynamics->add_option("--group", dy_group, "class | age | gender")->capture_default_str();
  dynamics->add_option("--scope", dy_scope, "global | k2-17 | k1")->capture_default_str();
  dynamics->add_flag("--per-pcg", dy_per_pcg, "One class profile per PCG");
  dynamics->add_flag("--spend-weighted", dy_weighted, "Weight users by their in-scope spend");
  dynamics->add_option("--out", dy_out, "Output CSV (stdout if omitted)");

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic population with planted ground truth");
  std::string sy_spec, sy_out = "synth";
  synth->add_option("--spec", sy_spec, "JSON generator spec (defaults for missing keys)");
  synth->add_option("--out", sy_out, "Output directory")->capture_default_str();

  // run
  auto* run = app.add_subcommand("run", "Full pipeline with stage caching");
  std::string run_config;
  RunConfig cfg;
  std::vector<std::string> skip;
  run->add_option("--config", run_config, "Flat key = value file; command-line options override it");
  auto* o_events = run->add_option("--events", cfg.events, "Communication events CSV");
  auto* o_tx = run->add_option("--transactions", cfg.transactions, "Card transactions CSV");
  auto* o_demo = run->add_option("--demographics", cfg.demographics, "Demographics CSV (optional)");
  auto* o_gt = run->add_option("--ground-truth", cfg.ground_truth, "Synth ground truth for an oracle run");
  auto* o_out = run->add_option("--out", cfg.out, "Run directory");
  auto* o_n = run->add_option("--n-classes", cfg.n_classes);
  auto* o_sf = run->add_option("--swaps-factor", cfg.swaps_factor);
  auto* o_ens = run->add_option("--ensemble", cfg.ensemble, "Rewired graphs per null model");
  auto* o_rho = run->add_option("--rho-min", cfg.rho_min);
  auto* o_sup = run->add_option("--support-min", cfg.support_min);
  auto* o_mp = run->add_option("--min-purchases", cfg.min_purchases);
  auto* o_mam = run->add_option("--min-active-months", cfg.min_active_months);
  auto* o_seed = run->add_option("--seed", cfg.seed);
  run->add_option("--skip", skip, "Stages to skip (ingest, socio, spending, nullmodel, catnet, dynamics)");
  run->add_flag("--force", cfg.force, "Ignore cached stages");

  // report
  auto* rep = app.add_subcommand("report", "Summarize a run manifest");
  std::string rep_manifest, rep_json;
  rep->add_option("--manifest", rep_manifest, "manifest.json or the run directory")->required();
  rep->add_option("--json", rep_json, "Write the machine summary here");

  // oracle
  auto* orc = app.add_subcommand("oracle", "Compare pipeline outputs with a synth ground truth");
  std::string orc_truth, orc_outputs, orc_json;
  orc->add_option("--ground-truth", orc_truth, "ground_truth.json written by synth")->required();
  orc->add_option("--outputs", orc_outputs, "Run directory")->required();
  orc->add_option("--json", orc_json, "Also write the verdicts as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads) set_thread_cap(threads);

    if (*ingest) {
      const auto dir = load_directory(directory_path);
      auto r = run_ingest(events, transactions, demographics, dir, popt);
      write_ingest(ingest_out, r, dir);
      std::cout << "nodes " << r.graph.node_count() << ", edges " << r.graph.edge_count() << ", users "
                << r.profiles.size() << '\n';
      return 0;
    }
    if (*classes) {
      const auto dir = load_directory(directory_path);
      auto profiles = load_profiles(cls_input, dir);
      auto r = run_socio(profiles, cls_n, tail_fraction);
      {
        auto o = open_file(cls_out);
        write_partition(o, r.partition);
      }
      if (!cls_lorenz.empty()) {
        auto o = open_file(cls_lorenz);
        write_lorenz(o, r.inequality);
      }
      if (!cls_amp.empty()) {
        auto o = open_file(cls_amp);
        write_amp(o, r.amp);
      }
      if (!cls_pyramid.empty()) {
        auto o = open_file(cls_pyramid);
        write_pyramid(o, r.pyramid);
      }
      if (!cls_summary.empty()) {
        auto o = open_file(cls_summary);
        o << r.summary.dump(1) << '\n';
      }
      std::cout << "Gini " << csv::format(r.inequality.gini) << ", Pareto alpha "
                << (r.inequality.pareto_alpha ? csv::format(*r.inequality.pareto_alpha) : "NA") << '\n';
      for (int j = 1; j <= cls_n; ++j) std::cout << "s" << j << ": " << r.partition.size(j) << " users\n";
      return 0;
    }
    if (*spending) {
      const auto dir = load_directory(directory_path);
      auto s = run_spending(load_profiles(sp_profiles, dir), load_partition(sp_partition), dir, sp_out);
      std::cout << s.dump(1) << '\n';
      return 0;
    }
    if (*nullmodel) {
      const auto dir = load_directory(directory_path);
      auto g = load_graph(nm_graph);
      auto profiles = load_profiles(nm_profiles, dir);
      auto partition = load_partition(nm_partition);
      fs::create_directories(nm_out);
      NullRatio r;
      if (nm_measure == "L") {
        r = L_matrix(g, spending_vectors(profiles), partition, parse_subset(nm_subset), plan);
      } else if (nm_measure == "lambda") {
        auto scope = nm_subset == "k1" ? WeeklyScope::cash() : WeeklyScope::noncash();
        r = lambda_matrix(g, weekly_vectors(profiles, scope), partition, plan, "Lambda_" + scope.name);
      } else {
        throw Error("--measure must be L or lambda");
      }
      {
        auto o = open_file(fs::path(nm_out) / (r.ratio.label() + ".csv"));
        r.ratio.write_csv(o);
      }
      {
        auto o = open_file(fs::path(nm_out) / (r.ratio.label() + "_sigma.csv"));
        r.sigma.write_csv(o);
      }
      for (const auto& d : r.diagnostics) std::cerr << "note: " << d << '\n';
      if (nm_assort) {
        NullModelOptions opt;
        opt.plan = plan;
        auto s = run_nullmodel(g, profiles, partition, dir, opt, fs::path(nm_out) / "all");
        std::cout << s.dump(1) << '\n';
      }
      r.ratio.write_csv(std::cout);
      return 0;
    }
    if (*catnet) {
      const auto dir = load_directory(directory_path);
      auto [lo, hi] = parse_range(cn_k);
      copt.kmeans.k_min = lo;
      copt.kmeans.k_max = hi;
      copt.kmeans.seed = copt.seed;
      copt.standardize = !cn_raw;
      if (cn_afs == "per-value") copt.afs = AfsMode::PerValue;
      else if (cn_afs != "per-user") throw Error("--afs must be per-user or per-value");
      if (cn_mean == "purchasers") copt.mean = CorrelationMean::Purchasers;
      else if (cn_mean != "all-users") throw Error("--mean must be all-users or purchasers");
      auto s = run_catnet(load_profiles(cn_profiles, dir), load_partition(cn_partition), dir, copt, cn_out);
      std::cout << s.dump(1) << '\n';
      return 0;
    }
    if (*dynamics) {
      const auto dir = load_directory(directory_path);
      auto profiles = load_profiles(dy_profiles, dir);
      auto partition = load_partition(dy_partition);
      std::ofstream file;
      std::ostream* out = &std::cout;
      if (!dy_out.empty()) {
        file = open_file(dy_out);
        out = &file;
      }
      if (dy_per_pcg) {
        write_pcg_profiles(*out, per_pcg_profiles(profiles, partition, dy_weighted), dir);
      } else {
        WeeklyScope scope = dy_scope == "k2-17" ? WeeklyScope::noncash()
                            : dy_scope == "k1"  ? WeeklyScope::cash()
                            : dy_scope == "global" ? WeeklyScope::global()
                                                   : throw Error("--scope must be global, k2-17 or k1");
        auto gp = group_profiles(weekly_vectors(profiles, scope), profiles, partition, parse_grouping(dy_group),
                                 dy_weighted);
        for (const auto& d : gp.diagnostics) std::cerr << "note: " << d << '\n';
        write_group_profiles(*out, gp);
      }
      return 0;
    }
    if (*synth) {
      SynthSpec spec;
      if (!sy_spec.empty()) {
        std::ifstream in(sy_spec);
        if (!in) throw Error("cannot open spec '" + sy_spec + "'");
        spec = nlohmann::json::parse(in).get<SynthSpec>();
      }
      auto f = generate(spec, sy_out, load_directory(directory_path));
      std::cout << f.events << '\n' << f.transactions << '\n' << f.demographics << '\n' << f.ground_truth << '\n';
      return 0;
    }
    if (*run) {
      if (!run_config.empty()) {
        RunConfig file_cfg = read_config(run_config);
        // command-line values win over the file
        auto keep = [](CLI::Option* o, auto& dst, const auto& src) {
          if (o->count() == 0) dst = src;
        };
        keep(o_events, cfg.events, file_cfg.events);
        keep(o_tx, cfg.transactions, file_cfg.transactions);
        keep(o_demo, cfg.demographics, file_cfg.demographics);
        keep(o_gt, cfg.ground_truth, file_cfg.ground_truth);
        keep(o_out, cfg.out, file_cfg.out);
        keep(o_n, cfg.n_classes, file_cfg.n_classes);
        keep(o_sf, cfg.swaps_factor, file_cfg.swaps_factor);
        keep(o_ens, cfg.ensemble, file_cfg.ensemble);
        keep(o_rho, cfg.rho_min, file_cfg.rho_min);
        keep(o_sup, cfg.support_min, file_cfg.support_min);
        keep(o_mp, cfg.min_purchases, file_cfg.min_purchases);
        keep(o_mam, cfg.min_active_months, file_cfg.min_active_months);
        keep(o_seed, cfg.seed, file_cfg.seed);
        cfg.directory = file_cfg.directory;
        cfg.utc_offset = file_cfg.utc_offset;
        cfg.tail_fraction = file_cfg.tail_fraction;
        cfg.kmeans_min = file_cfg.kmeans_min;
        cfg.kmeans_max = file_cfg.kmeans_max;
        cfg.kmeans_restarts = file_cfg.kmeans_restarts;
        cfg.gap_references = file_cfg.gap_references;
        cfg.afs_mode = file_cfg.afs_mode;
        cfg.correlation_mean = file_cfg.correlation_mean;
        cfg.removal_fractions = file_cfg.removal_fractions;
        cfg.removal_repeats = file_cfg.removal_repeats;
        cfg.spend_weighted = file_cfg.spend_weighted;
        if (skip.empty()) cfg.skip = file_cfg.skip;
        if (!threads) threads = file_cfg.threads;
      }
      if (!directory_path.empty()) cfg.directory = directory_path;
      // an oracle run adopts the generator seed unless one was given explicitly
      if (!cfg.ground_truth.empty() && o_seed->count() == 0 && !fs::exists(run_config)) {
        std::ifstream in(cfg.ground_truth);
        if (in) cfg.seed = nlohmann::json::parse(in).value("seed", cfg.seed);
      }
      for (const auto& s : skip) cfg.skip.insert(s);
      cfg.threads = threads;
      auto res = run_pipeline(cfg, &std::cerr);
      std::cout << report(res.manifest).text;
      return res.status;
    }
    if (*rep) {
      fs::path p(rep_manifest);
      if (fs::is_directory(p)) p /= "manifest.json";
      auto r = report(p.string());
      std::cout << r.text;
      if (!rep_json.empty()) {
        auto o = open_file(rep_json);
        o << r.json.dump(1) << '\n';
      }
      return r.json.value("partial", false) ? 2 : 0;
    }
    if (*orc) {
      auto r = oracle_report(orc_truth, orc_outputs);
      write_oracle_table(std::cout, r);
      if (!orc_json.empty()) {
        auto o = open_file(orc_json);
        o << r.to_json().dump(1) << '\n';
      }
      return r.all_pass() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
