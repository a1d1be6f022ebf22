#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "pcab/colgen.hpp"
#include "pcab/datagen.hpp"
#include "pcab/greedy.hpp"

using namespace pcab;

namespace {

Dataset small_d1(std::uint64_t seed, int d = 2) {
  GenConfig c = GenConfig::table_default(Family::d1, d, seed);
  c.random_positives = 30;
  c.random_negatives = 50;
  return generate(c);
}

Dataset two_clusters() {
  PointsXd pos(4, 2), neg(5, 2);
  pos << 0, 0, 1, 0, 0, 1, 1, 1;
  neg << 3, 0, 3, 1, 4, 0.5, 3.5, 2, 5, -1;
  return Dataset(pos, neg);
}

BudgetParams params(int K) {
  BudgetParams p;
  p.K = K;
  return p;
}

bool nonincreasing(const std::vector<TracePoint>& t) {
  for (std::size_t i = 1; i < t.size(); ++i)
    if (t[i].second > t[i - 1].second || t[i].first < t[i - 1].first) return false;
  return true;
}

}  // namespace

TEST_CASE("greedy: at most K solves, disjoint covers, valid output") {
  for (std::uint64_t s = 0; s < 6; ++s) {
    const auto ds = small_d1(s);
    for (int K : {1, 3, 5}) {
      GreedyStats st;
      lp::SolveOptions o;
      o.time_limit = 10;
      const auto sol = run_greedy(ds, params(K), o, &st);
      CHECK(st.plsm_solves <= K);
      CHECK(static_cast<int>(sol.hyperplanes.size()) <= K);
      std::set<Eigen::Index> seen;
      std::size_t total = 0;
      for (const auto& c : st.covered) {
        total += c.size();
        seen.insert(c.begin(), c.end());
      }
      CHECK(seen.size() == total);
      for (const auto& h : sol.hyperplanes) CHECK(is_valid(h, ds));
      CHECK(sol.error == separation_error(ds, sol.hyperplanes));
      CHECK(sol.error == ds.num_negatives() - static_cast<Eigen::Index>(total));
      CHECK(nonincreasing(sol.trace));
    }
  }
}

TEST_CASE("greedy stops early once every negative is cut") {
  GreedyStats st;
  const auto sol = run_greedy(two_clusters(), params(5), {}, &st);
  CHECK(sol.error == 0);
  CHECK(st.plsm_solves == 1);
}

TEST_CASE("greedy with a pivot budget is reproducible") {
  const auto ds = small_d1(3);
  lp::SolveOptions o;
  o.iteration_limit = 4000;
  const auto a = run_greedy(ds, params(4), o);
  const auto b = run_greedy(ds, params(4), o);
  REQUIRE(a.hyperplanes.size() == b.hyperplanes.size());
  for (std::size_t k = 0; k < a.hyperplanes.size(); ++k) CHECK(a.hyperplanes[k].w == b.hyperplanes[k].w);
}

TEST_CASE("colgen on a separable instance stops after one iteration") {
  const auto ds = two_clusters();
  ColgenConfig cfg;
  cfg.thr = 5;
  cfg.time_limit = 20;
  const auto r = run_colgen(ds, params(1), cfg);
  CHECK(r.solution.error == 0);
  CHECK(r.telemetry.iterations == 1);
  CHECK(r.telemetry.stop_reason == "zero-error");
  REQUIRE(r.duals.size() == 1);
  CHECK(r.duals[0].lambda == Eigen::VectorXd::Ones(5));
}

TEST_CASE("colgen invariants with both pricers") {
  for (Pricer pr : {Pricer::ahp, Pricer::exact_root_node}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto ds = small_d1(20 + s);
      ColgenConfig cfg;
      cfg.pricer = pr;
      cfg.seed = s;
      cfg.time_limit = 8;
      const auto r = run_colgen(ds, params(3), cfg);
      const auto& ev = r.telemetry.events;
      REQUIRE(!ev.empty());
      for (std::size_t i = 1; i < ev.size(); ++i) {
        CHECK(ev[i].hcm_error <= ev[i - 1].hcm_error);
        CHECK(ev[i].columns_total >= ev[i - 1].columns_total);
      }
      CHECK(nonincreasing(r.solution.trace));
      CHECK(r.solution.error <= ev.back().hcm_error);
      CHECK(static_cast<int>(r.solution.hyperplanes.size()) <= 3);
      for (const auto& h : r.solution.hyperplanes) CHECK(is_valid(h, ds));
      for (const auto& rec : r.priced) {
        const auto& duals = r.duals.at(static_cast<std::size_t>(rec.iter - 1));
        double recomputed = duals.mu;
        for (Eigen::Index i = 0; i < ds.num_negatives(); ++i) recomputed -= duals.lambda[i] * rec.column.indicator[i];
        CHECK(std::abs(rec.column.reduced_cost - recomputed) <= 1e-9);
        CHECK(rec.pooled == (rec.column.reduced_cost < -1e-9));
      }
      std::ostringstream csv;
      write_events_csv(csv, ev);
      CHECK(csv.str().rfind("iter,elapsed_s,rmm_obj,min_reduced_cost,hcm_error,columns_total\n", 0) == 0);
    }
  }
}

TEST_CASE("colgen warm start seeds the pool with greedy columns") {
  const auto ds = small_d1(5);
  ColgenConfig cfg;
  cfg.warm_start = true;
  const auto pool = initialize_master(ds, params(3), cfg);
  CHECK(!pool.empty());
  CHECK(pool.size() <= 3);
  for (const auto& c : pool) {
    CHECK(is_valid(c.hyperplane, ds));
    CHECK(c.indicator.sum() >= 1.0);
  }
  cfg.warm_start = false;
  CHECK(initialize_master(ds, params(3), cfg).empty());
}

TEST_CASE("colgen with a pivot budget is reproducible") {
  const auto ds = small_d1(9);
  ColgenConfig cfg;
  cfg.iteration_limit = 30000;
  cfg.seed = 4;
  const auto a = run_colgen(ds, params(3), cfg);
  const auto b = run_colgen(ds, params(3), cfg);
  CHECK(a.solution.error == b.solution.error);
  REQUIRE(a.solution.hyperplanes.size() == b.solution.hyperplanes.size());
  for (std::size_t k = 0; k < a.solution.hyperplanes.size(); ++k)
    CHECK(a.solution.hyperplanes[k].w == b.solution.hyperplanes[k].w);
  CHECK(a.telemetry.iterations == b.telemetry.iterations);
}

TEST_CASE("colgen config validation") {
  ColgenConfig cfg;
  cfg.nmax = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.nmax = 2;
  cfg.thr = -1;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("datagen counts follow the table") {
  struct Row {
    int d;
    long m1, n1, m2, n2;
  };
  for (const Row r : {Row{2, 145, 208, 141, 200}, Row{4, 216, 564, 200, 500}, Row{8, 538, 10048, 282, 8000}}) {
    const auto a = generate(GenConfig::table_default(Family::d1, r.d, 1));
    const auto b = generate(GenConfig::table_default(Family::d2, r.d, 1));
    CHECK(a.num_positives() == r.m1);
    CHECK(a.num_negatives() == r.n1);
    CHECK(b.num_positives() == r.m2);
    CHECK(b.num_negatives() == r.n2);
  }
}

TEST_CASE("corner points in the plane") {
  PointsXd pos, neg;
  corner_points(2, 0.04, pos, neg);
  PointsXd ep(4, 2), en(8, 2);
  ep << 0.04, 0.04, 0.96, 0.04, 0.04, 0.96, 0.96, 0.96;
  en << 0.08, -0.04, -0.04, 0.08,   // vertex (0,0)
      0.92, -0.04, 1.04, 0.08,      // vertex (1,0)
      0.08, 1.04, -0.04, 0.92,      // vertex (0,1)
      0.92, 1.04, 1.04, 0.92;       // vertex (1,1)
  CHECK(pos.isApprox(ep, 1e-15));
  CHECK(neg.isApprox(en, 1e-15));
}

TEST_CASE("D1 certificate, premise and determinism") {
  for (int d : {2, 4}) {
    for (std::uint64_t s = 0; s < 3; ++s) {
      const auto ds = generate(GenConfig::table_default(Family::d1, d, s));
      const auto cert = facet_certificate(d, 0.04);
      CHECK(cert.size() == static_cast<std::size_t>(2 * d));
      for (const auto& h : cert) CHECK(is_valid(h, ds, 0.0));
      CHECK(separation_error(ds, cert, 0.0) == 0);
      CHECK((ds.positives().array() >= 0.0).all());
      CHECK((ds.positives().array() <= 1.0).all());
      for (Eigen::Index i = 0; i < ds.num_negatives(); ++i) {
        const auto a = ds.negative(i).array();
        CHECK(((a < 0.0).any() || (a > 1.0).any()));
        CHECK(((a >= -1.0).all() && (a <= 2.0).all()));
      }
    }
  }
  const auto a = generate(GenConfig::table_default(Family::d2, 4, 17));
  const auto b = generate(GenConfig::table_default(Family::d2, 4, 17));
  const auto c = generate(GenConfig::table_default(Family::d2, 4, 18));
  CHECK(a.negatives() == b.negatives());
  CHECK(a.positives() == b.positives());
  CHECK(a.negatives() != c.negatives());
}

TEST_CASE("corner points alone need 2d hyperplanes in the plane") {
  PointsXd pos, neg;
  corner_points(2, 0.04, pos, neg);
  const Dataset ds(pos, neg);
  CHECK(oracle::min_error_bruteforce(ds, 3) > 0);
  CHECK(oracle::min_error_bruteforce(ds, 4) == 0);
}

TEST_CASE("datagen config validation and manifest") {
  GenConfig c;
  c.d = 3;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c.random_positives = 5;
  c.random_negatives = 5;
  CHECK_NOTHROW(c.validate());
  c.gamma = 0.0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  const auto cfg = GenConfig::table_default(Family::d1, 2, 3);
  const auto ds = generate(cfg);
  const auto j = manifest(cfg, ds);
  CHECK(j.at("family") == "D1");
  CHECK(j.at("d") == 2);
  CHECK(j.at("seed") == 3);
  CHECK_THROWS_AS(generate_d2(cfg), std::invalid_argument);
}
