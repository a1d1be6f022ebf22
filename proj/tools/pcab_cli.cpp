// pcab_cli: generate instances, solve them, benchmark methods, estimate volumes.

#include <glob.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pcab/bench.hpp"
#include "pcab/colgen.hpp"
#include "pcab/datagen.hpp"
#include "pcab/io.hpp"

namespace fs = std::filesystem;
using namespace pcab;

namespace {

/// Configuration the user asked for but that cannot run.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunFlags {
  std::string method = "colgen-ahp";
  int K = 1;
  double time_limit = 0.0;
  bool massive = false;
  std::uint64_t seed = 0;
  int thr = 0;
  int nmax = 8;
  bool root_node_only = false;
  bool warm_start = false;
  bool deterministic = false;
  double big_m = 10000.0;
  double diameter = 0.0;
};

void add_run_flags(CLI::App* app, RunFlags& f, bool with_method_and_budget) {
  if (with_method_and_budget) {
    app->add_option("--method", f.method, "model-a | model-b | ov2007 | colgen-exact | colgen-ahp | greedy | hull-greedy-2d")
        ->capture_default_str();
    app->add_option("--budget,-K", f.K, "Hyperplane budget K")->capture_default_str();
  }
  app->add_option("--time-limit", f.time_limit, "Seconds per run; 0 selects 6*10^(log2 d)");
  app->add_flag("--massive", f.massive, "Use the massive-run default time limit");
  app->add_option("--seed", f.seed, "Random seed")->capture_default_str();
  app->add_option("--thr", f.thr, "HPLS point threshold; 0 selects d");
  app->add_option("--nmax", f.nmax, "AHP starts per iteration")->capture_default_str();
  app->add_flag("--root-node-only", f.root_node_only, "Stop compact-model solves after the root node");
  app->add_flag("--warm-start", f.warm_start, "Seed column generation with greedy hyperplanes");
  app->add_option("--big-m", f.big_m, "Big-M constant")->capture_default_str();
  app->add_option("--diameter", f.diameter, "OV2007 diameter bound; 0 uses 3 given a manifest, else the data range");
}

RunConfig to_run_config(const RunFlags& f) {
  RunConfig rc;
  try {
    rc.method = parse_method(f.method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  rc.K = f.K;
  rc.time_limit = f.time_limit;
  rc.massive = f.massive;
  rc.seed = f.seed;
  rc.thr = f.thr;
  rc.nmax = f.nmax;
  rc.root_node_only = f.root_node_only;
  rc.warm_start = f.warm_start;
  rc.deterministic = f.deterministic;
  if (rc.K < 1) throw ConfigError("budget must be at least 1");
  if (rc.time_limit < 0) throw ConfigError("time limit must be positive");
  if (rc.nmax < 1 || rc.thr < 0) throw ConfigError("nmax must be positive and thr nonnegative");
  return rc;
}

BudgetParams to_params(const RunFlags& f) {
  BudgetParams p;
  p.K = f.K;
  p.big_m = f.big_m;
  if (f.diameter > 0) p.diameter = f.diameter;
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

/// Generated instances live in [-1,2]^d, so a manifest next to the CSV
/// pins the OV2007 diameter bound at 3.
BudgetParams for_instance(BudgetParams p, const std::string& path) {
  if (!p.diameter && fs::exists(path + ".json")) p.diameter = 3.0;
  return p;
}

Dataset load_or_fail(const std::string& path) {
  if (!fs::exists(path)) throw ConfigError("no such instance: " + path);
  return load_dataset(path);
}

std::vector<std::string> expand(const std::vector<std::string>& patterns) {
  std::vector<std::string> out;
  for (const auto& pat : patterns) {
    glob_t g{};
    if (::glob(pat.c_str(), 0, nullptr, &g) == 0)
      for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
    globfree(&g);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_trace_csv(const std::string& path, const PcabSolution& s) {
  auto out = open_out(path);
  out << "seconds,error\n";
  for (const auto& [t, e] : s.trace) out << format_double(t) << ',' << e << '\n';
}

int cmd_gen(const std::string& family, int d, double gamma, long pos, long neg, std::uint64_t seed,
            const std::string& out, std::string manifest_path) {
  GenConfig cfg;
  if (family == "d1" || family == "D1")
    cfg = GenConfig::table_default(Family::d1, d, seed);
  else if (family == "d2" || family == "D2")
    cfg = GenConfig::table_default(Family::d2, d, seed);
  else
    throw ConfigError("family must be d1 or d2");
  if (cfg.family == Family::d1 && gamma >= 0) cfg.gamma = gamma;
  if (pos >= 0) cfg.random_positives = pos;
  if (neg >= 0) cfg.random_negatives = neg;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Dataset ds = generate(cfg);
  save_dataset(out, ds);
  if (manifest_path.empty()) manifest_path = out + ".json";
  open_out(manifest_path) << manifest(cfg, ds).dump(2) << '\n';
  std::cout << out << ": m=" << ds.num_positives() << " n=" << ds.num_negatives() << " d=" << ds.dim() << '\n';
  return 0;
}

int cmd_solve(const std::string& input, const RunFlags& f, const std::string& out, const std::string& trace,
              const std::string& events) {
  const RunConfig rc = to_run_config(f);
  const BudgetParams p = to_params(f);
  const Dataset ds = load_or_fail(input);
  if (rc.method == Method::hull_greedy_2d && ds.dim() != 2) throw ConfigError("hull-greedy-2d needs d = 2");
  const RunOutcome r = run_method(ds, for_instance(p, input), rc);
  save_solution(out, r.solution, false);
  if (!trace.empty()) write_trace_csv(trace, r.solution);
  if (!events.empty() && r.telemetry) {
    auto ev = open_out(events);
    write_events_csv(ev, r.telemetry->events);
  }
  std::cout << RunReport::header() << '\n' << r.report.row() << '\n';
  return 0;
}

int cmd_bench(const std::vector<std::string>& patterns, const std::vector<std::string>& methods,
              const std::vector<int>& budgets, const RunFlags& base, const std::string& out,
              const std::string& runs_path) {
  const auto files = expand(patterns);
  if (files.empty()) throw ConfigError("no instance matches the given patterns");
  std::vector<RunConfig> configs;
  for (const auto& m : methods)
    for (int K : budgets) {
      RunFlags f = base;
      f.method = m;
      f.K = K;
      configs.push_back(to_run_config(f));
    }
  const BudgetParams p = to_params(base);

  std::ofstream runs;
  if (!runs_path.empty()) {
    runs = open_out(runs_path);
    runs << "instance," << RunReport::header() << '\n';
  }
  std::vector<RunReport> rows;
  for (const auto& file : files) {
    const Dataset ds = load_dataset(file);
    for (const auto& rc : configs) {
      if (rc.method == Method::hull_greedy_2d && ds.dim() != 2) continue;
      const auto r = run_method(ds, for_instance(p, file), rc);
      rows.push_back(r.report);
      if (runs) runs << file << ',' << r.report.row() << std::endl;
      std::cerr << file << ' ' << r.report.row() << '\n';
    }
  }
  auto agg = open_out(out);
  agg << RunReport::header() << '\n';
  for (const auto& r : aggregate_reports(rows)) agg << r.row() << '\n';
  return 0;
}

int cmd_volume(const std::string& path, int dim, std::int64_t samples, std::uint64_t seed) {
  if (!fs::exists(path)) throw ConfigError("no such solution: " + path);
  const PcabSolution s = load_solution(path);
  int d = dim;
  if (!s.hyperplanes.empty()) d = static_cast<int>(s.hyperplanes.front().dim());
  if (d < 1) throw ConfigError("empty solution: pass --dim");
  if (samples < 1000) throw ConfigError("need at least 1000 samples");
  const auto v = mc_volume(s.hyperplanes, d, samples, seed);
  std::cout << "estimate,std_error\n" << format_double(v.estimate) << ',' << format_double(v.std_error) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Polyhedral separation with a hyperplane budget"};
  app.require_subcommand(1);

  std::string family = "d1", gen_out, manifest_path;
  int gen_d = 2;
  double gamma = -1;
  long gen_pos = -1, gen_neg = -1;
  std::uint64_t gen_seed = 0;
  auto* gen = app.add_subcommand("gen", "Generate a D1 or D2 instance");
  gen->add_option("--family", family, "d1 or d2")->capture_default_str();
  gen->add_option("--dim,-d", gen_d, "Dimension")->capture_default_str();
  gen->add_option("--gamma", gamma, "D1 border gap (default 0.04)");
  gen->add_option("--positives", gen_pos, "Random positive count (default from the table)");
  gen->add_option("--negatives", gen_neg, "Random negative count (default from the table)");
  gen->add_option("--seed", gen_seed, "Random seed")->capture_default_str();
  gen->add_option("--out,-o", gen_out, "Output CSV")->required();
  gen->add_option("--manifest", manifest_path, "Manifest JSON (default <out>.json)");

  RunFlags solve_flags;
  solve_flags.deterministic = true;
  std::string input, sol_out, trace_out, events_out;
  auto* solve = app.add_subcommand("solve", "Run one method on one instance");
  solve->add_option("--input,-i", input, "Instance CSV")->required();
  add_run_flags(solve, solve_flags, true);
  solve->add_flag("--deterministic,!--wall-clock", solve_flags.deterministic,
                  "Budget solves in simplex pivots (default) or wall-clock seconds");
  solve->add_option("--out,-o", sol_out, "Solution JSON")->required();
  solve->add_option("--trace", trace_out, "Improvement trace CSV");
  solve->add_option("--events", events_out, "Column generation events CSV");

  RunFlags bench_flags;
  std::vector<std::string> patterns, methods{"colgen-ahp"};
  std::vector<int> budgets{1};
  std::string bench_out, runs_out;
  auto* bench = app.add_subcommand("bench", "Run a method x budget grid over instances");
  bench->add_option("--instances", patterns, "Instance CSV paths or glob patterns")->required();
  bench->add_option("--method", methods, "Methods to run")->capture_default_str();
  bench->add_option("--budget,-K", budgets, "Budgets K to run")->capture_default_str();
  add_run_flags(bench, bench_flags, false);
  bench->add_flag("--deterministic,!--wall-clock", bench_flags.deterministic,
                  "Budget solves in simplex pivots or wall-clock seconds (default)");
  bench->add_option("--out,-o", bench_out, "Aggregate CSV")->required();
  bench->add_option("--runs", runs_out, "Per-run CSV");

  std::string vol_path;
  int vol_dim = 0;
  std::int64_t samples = 100000;
  std::uint64_t vol_seed = 0;
  auto* volume = app.add_subcommand("volume", "Monte-Carlo volume of a solution in [-1,2]^d");
  volume->add_option("--solution,-s", vol_path, "Solution JSON")->required();
  volume->add_option("--dim,-d", vol_dim, "Dimension, needed for empty solutions");
  volume->add_option("--samples", samples, "Sample count")->capture_default_str();
  volume->add_option("--seed", vol_seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen(family, gen_d, gamma, gen_pos, gen_neg, gen_seed, gen_out, manifest_path);
    if (*solve) return cmd_solve(input, solve_flags, sol_out, trace_out, events_out);
    if (*bench) return cmd_bench(patterns, methods, budgets, bench_flags, bench_out, runs_out);
    if (*volume) return cmd_volume(vol_path, vol_dim, samples, vol_seed);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
