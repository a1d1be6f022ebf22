// Acceptance run: one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>

#include "oracles.hpp"
#include "pcab/ahp.hpp"
#include "pcab/bench.hpp"
#include "pcab/budget.hpp"
#include "pcab/colgen.hpp"
#include "pcab/datagen.hpp"
#include "pcab/greedy.hpp"
#include "pcab/lp/branch_and_bound.hpp"
#include "pcab/models.hpp"

using namespace pcab;
namespace fs = std::filesystem;

namespace {

constexpr int kInstances = 20;

struct Verdict {
  bool pass = false;
  std::string detail;
};

Dataset instance(Family f, int d, int idx) {
  return generate(GenConfig::table_default(f, d, 1000 + static_cast<std::uint64_t>(idx)));
}

struct ColgenRun {
  Dataset ds;
  ColgenResult result;
  double seconds = 0.0;
};

// Runs shared by criteria 3, 4, 7 and 8.
std::vector<ColgenRun> separability_runs;
std::vector<ColgenRun> underbudget_runs;

ColgenRun run_ahp(const Dataset& ds, int K, double limit, std::uint64_t seed) {
  BudgetParams p;
  p.K = K;
  ColgenConfig cfg;
  cfg.pricer = Pricer::ahp;
  cfg.time_limit = limit;
  cfg.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  ColgenRun run{ds, run_colgen(ds, p, cfg), 0.0};
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return run;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Verdict c1_oracle_equivalence() {
  std::mt19937_64 rng(20240101);
  int mismatches = 0, solves = 0;
  for (int t = 0; t < 200; ++t) {
    const auto ds = oracle::random_micro(rng);
    for (int K : {1, 2}) {
      BudgetParams p;
      p.K = K;
      const auto r = lp::solve_milp(build_model_b(ds, p));
      ++solves;
      if (r.status != lp::Status::optimal || std::llround(r.objective) != oracle::min_error_bruteforce(ds, K))
        ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%.0f mismatches over %.0f Model B solves", mismatches, solves)};
}

Verdict c2_lsvm() {
  std::mt19937_64 rng(20240202);
  int mismatches = 0, checks = 0;
  for (int t = 0; t < 200; ++t) {
    const auto ds = oracle::random_micro(rng);
    const auto n = static_cast<std::uint32_t>(ds.num_negatives());
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
      const auto subset = oracle::members(mask);
      ++checks;
      if (hulls_intersect(ds, subset) == oracle::strictly_separable(ds, subset)) ++mismatches;
    }
  }
  return {mismatches == 0, fmt("%.0f mismatches over %.0f subsets", mismatches, checks)};
}

Verdict c3_separability() {
  int hit2 = 0, hit4 = 0;
  double sec2 = 0, sec4 = 0;
  for (int i = 0; i < kInstances; ++i) {
    auto r = run_ahp(instance(Family::d1, 2, i), 4, 6.0, static_cast<std::uint64_t>(i));
    if (r.result.solution.error == 0 && r.seconds <= 6.0) ++hit2;
    sec2 += r.seconds;
    separability_runs.push_back(std::move(r));
  }
  for (int i = 0; i < kInstances; ++i) {
    auto r = run_ahp(instance(Family::d1, 4, i), 8, 60.0, static_cast<std::uint64_t>(i));
    if (r.result.solution.error == 0 && r.seconds <= 60.0) ++hit4;
    sec4 += r.seconds;
    separability_runs.push_back(std::move(r));
  }
  return {hit2 >= 18 && hit4 >= 18,
          fmt("d=2 K=4: %.0f/20 at error 0 (avg %.3f s); ", hit2, sec2 / kInstances) +
              fmt("d=4 K=8: %.0f/20 at error 0 (avg %.3f s)", hit4, sec4 / kInstances)};
}

Verdict c4_underbudget() {
  double sum = 0;
  for (int i = 0; i < kInstances; ++i) {
    auto r = run_ahp(instance(Family::d1, 2, i), 2, 6.0, static_cast<std::uint64_t>(i));
    sum += 100.0 * double(r.result.solution.error) / double(r.ds.num_negatives());
    underbudget_runs.push_back(std::move(r));
  }
  const double avg = sum / kInstances;
  return {avg <= 30.0, fmt("d=2 K=2 average error %.2f%%", avg)};
}

Verdict c5_ordering() {
  double a = 0, b = 0;
  const double limit = default_time_limit(2, true);
  for (int i = 0; i < kInstances; ++i) {
    const auto ds = instance(Family::d1, 2, i);
    BudgetParams p;
    for (Method m : {Method::model_a, Method::model_b}) {
      RunConfig rc;
      rc.method = m;
      rc.K = 3;
      rc.time_limit = limit;
      rc.deterministic = true;
      const auto out = run_method(ds, p, rc);
      const double e = out.report.error_pct.value_or(100.0);
      (m == Method::model_a ? a : b) += e;
    }
  }
  a /= kInstances;
  b /= kInstances;
  return {a > b, fmt("K=3, %.0f pivots each: Model A %.2f%% vs Model B %.2f%%",
                     double(Budget::pivots_for(limit)), a, b)};
}

Verdict c6_greedy() {
  int runs = 0, bad = 0;
  double worst = 0;
  for (Family f : {Family::d1, Family::d2})
    for (int d : {2, 4})
      for (int i = 0; i < kInstances; ++i) {
        const auto ds = instance(f, d, i);
        BudgetParams p;
        p.K = 2 * d;
        lp::SolveOptions o;
        o.time_limit = default_time_limit(d, true);
        GreedyStats st;
        const auto t0 = std::chrono::steady_clock::now();
        run_greedy(ds, p, o, &st);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        worst = std::max(worst, s / o.time_limit);
        ++runs;
        if (st.plsm_solves > p.K || s > o.time_limit) ++bad;
      }
  return {bad == 0, fmt("%.0f runs, %.0f over K solves or time; worst time use %.1f%% of limit", runs, bad,
                        100.0 * worst)};
}

Verdict c7_reduced_costs() {
  std::size_t cols = 0;
  double worst = 0;
  for (const auto& run : separability_runs)
    for (const auto& rec : run.result.priced) {
      const auto& duals = run.result.duals.at(static_cast<std::size_t>(rec.iter - 1));
      double r = duals.mu;
      const auto& h = rec.column.hyperplane;
      for (Eigen::Index i = 0; i < run.ds.num_negatives(); ++i)
        if (h(run.ds.negative(i)) <= -1.0 + kGeomTol) r -= duals.lambda[i];
      worst = std::max(worst, std::abs(rec.column.reduced_cost - r));
      ++cols;
    }
  return {cols > 0 && worst <= 1e-6, fmt("%.0f columns, max |stored - recomputed| = %.3g", double(cols), worst)};
}

Verdict c8_monotone() {
  int runs = 0, bad = 0;
  for (const auto* set : {&separability_runs, &underbudget_runs})
    for (const auto& run : *set) {
      ++runs;
      const auto& ev = run.result.telemetry.events;
      const auto& tr = run.result.solution.trace;
      bool ok = !ev.empty();
      for (std::size_t i = 1; i < ev.size(); ++i) ok = ok && ev[i].hcm_error <= ev[i - 1].hcm_error;
      for (std::size_t i = 1; i < tr.size(); ++i) ok = ok && tr[i].second <= tr[i - 1].second;
      const auto geom = separation_error(run.ds, run.result.solution.hyperplanes);
      ok = ok && geom == run.result.solution.error && geom <= ev.back().hcm_error;
      if (!ok) ++bad;
    }
  return {runs > 0 && bad == 0, fmt("%.0f colgen runs, %.0f violations", runs, bad)};
}

Verdict c9_datagen() {
  struct Row {
    int d;
    long m1, n1, m2, n2;
  };
  int count_bad = 0, cert_bad = 0, premise_bad = 0, instances = 0;
  for (const Row r : {Row{2, 145, 208, 141, 200}, Row{4, 216, 564, 200, 500}, Row{8, 538, 10048, 282, 8000}}) {
    for (int i = 0; i < kInstances; ++i) {
      for (Family f : {Family::d1, Family::d2}) {
        const auto ds = instance(f, r.d, i);
        ++instances;
        const bool d1 = f == Family::d1;
        if (ds.num_positives() != (d1 ? r.m1 : r.m2) || ds.num_negatives() != (d1 ? r.n1 : r.n2)) ++count_bad;
        if (d1) {
          const auto cert = facet_certificate(r.d, 0.04);
          bool ok = static_cast<int>(cert.size()) == 2 * r.d && separation_error(ds, cert, 0.0) == 0;
          for (const auto& h : cert) ok = ok && is_valid(h, ds, 0.0);
          if (!ok) ++cert_bad;
        }
        // Positives lie in the unit cube and every negative leaves it along
        // some axis, so an axis facet separates it from the positive hull.
        bool premise = (ds.positives().array() >= 0.0).all() && (ds.positives().array() <= 1.0).all();
        for (Eigen::Index k = 0; k < ds.num_negatives() && premise; ++k) {
          const auto a = ds.negative(k).array();
          premise = (a < 0.0).any() || (a > 1.0).any();
        }
        if (r.d == 2 && i == 0 && premise)
          for (Eigen::Index k = 0; k < ds.num_negatives() && premise; ++k)
            premise = !hulls_intersect(ds, {k});
        if (!premise) ++premise_bad;
      }
    }
  }
  return {count_bad == 0 && cert_bad == 0 && premise_bad == 0,
          fmt("%.0f instances: count mismatches %.0f, ", instances, count_bad) +
              fmt("certificate failures %.0f, premise failures %.0f", cert_bad, premise_bad)};
}

Verdict c10_volume() {
  bool ok = true;
  std::string detail;
  for (int d : {2, 4}) {
    const auto v = mc_volume(oracle::unit_cube_facets(d), d, 100000, 77);
    const auto e = mc_volume({}, d, 100000, 77);
    ok = ok && std::abs(v.estimate - 1.0) <= 3.0 * v.std_error && e.estimate == std::pow(3.0, d);
    detail += fmt("d=%.0f: %.4f +- %.4f; ", d, v.estimate, v.std_error);
  }
  return {ok, detail + "empty set gives 3^d"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict c11_determinism() {
  const fs::path dir = fs::temp_directory_path() / ("pcab_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const std::string cli = PCAB_CLI_PATH;
  const std::string inst = (dir / "inst.csv").string();
  auto sh = [](const std::string& cmd) { return std::system((cmd + " > /dev/null 2>&1").c_str()); };
  if (sh(cli + " gen --family d1 --dim 2 --seed 5 --out " + inst) != 0) return {false, "gen failed"};
  int same = 0, total = 0;
  std::string differing;
  for (Method m : all_methods()) {
    const std::string name = to_string(m);
    std::string outputs[2];
    bool ran = true;
    for (int rep = 0; rep < 2; ++rep) {
      const auto out = (dir / (name + std::to_string(rep) + ".json")).string();
      ran = ran && sh(cli + " solve --input " + inst + " --method " + name + " --budget 3 --time-limit 1 --seed 9 --out " +
                      out) == 0;
      outputs[rep] = slurp(out);
    }
    ++total;
    if (ran && !outputs[0].empty() && outputs[0] == outputs[1])
      ++same;
    else
      differing += " " + name;
  }
  fs::remove_all(dir);
  return {same == total, fmt("%.0f/%.0f methods byte-identical", same, total) + differing};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle equivalence", c1_oracle_equivalence},
      {"LSVM correctness", c2_lsvm},
      {"D1 separability", c3_separability},
      {"under-budget regime", c4_underbudget},
      {"method ordering", c5_ordering},
      {"greedy termination", c6_greedy},
      {"reduced-cost audit", c7_reduced_costs},
      {"monotone incumbents", c8_monotone},
      {"datagen exactness", c9_datagen},
      {"volume sanity", c10_volume},
      {"determinism", c11_determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failed;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << i + 1 << " (" << criteria[i].first
              << "): " << v.detail << " [" << fmt("%.1f s", s) << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
