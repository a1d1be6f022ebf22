#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pcab/bench.hpp"
#include "pcab/datagen.hpp"

using namespace pcab;

namespace {

// Unit square positives; two negatives beyond each side.
Dataset square_with_sides() {
  PointsXd pos(4, 2), neg(8, 2);
  pos << 0, 0, 1, 0, 0, 1, 1, 1;
  neg << 2, 0.3, 2, 0.6,      // right
      -1, 0.5, -1.5, 0.5,     // left
      0.5, 2, 0.2, 3,         // top
      0.5, -1, 0.5, -2;       // bottom
  return Dataset(pos, neg);
}

}  // namespace

TEST_CASE("method names round trip") {
  for (Method m : all_methods()) CHECK(parse_method(to_string(m)) == m);
  CHECK(all_methods().size() == 7);
  CHECK(std::string(to_string(Method::colgen_ahp)) == "colgen-ahp");
  CHECK_THROWS_AS(parse_method("simplex"), std::invalid_argument);
}

TEST_CASE("default time limits") {
  CHECK(default_time_limit(2) == doctest::Approx(60.0));
  CHECK(default_time_limit(4) == doctest::Approx(600.0));
  CHECK(default_time_limit(8) == doctest::Approx(6000.0));
  CHECK(default_time_limit(2, true) == doctest::Approx(6.0));
  CHECK(default_time_limit(4, true) == doctest::Approx(60.0));
  CHECK_THROWS(default_time_limit(0));
}

TEST_CASE("report rows and aggregation") {
  RunReport a{"model-b", 3, 2, 1.23456, 12.5, 0.5};
  CHECK(a.row() == "model-b,3,2,1.235,12.50,0.500");
  RunReport na{"ov2007", 3, 2, 2.0, std::nullopt, 0.0};
  CHECK(na.row() == "ov2007,3,2,2.000,NA,0.000");
  CHECK(std::string(RunReport::header()) == "method,K,d,seconds,error_pct,te_seconds");

  RunReport b{"model-b", 3, 2, 3.0, 7.5, 1.5};
  const auto agg = aggregate_reports({a, na, b, na});
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].method == "model-b");
  CHECK(agg[0].error_pct.value() == doctest::Approx(10.0));
  CHECK(agg[0].te_seconds == doctest::Approx(1.0));
  CHECK(agg[1].method == "ov2007");
  CHECK_FALSE(agg[1].error_pct.has_value());
}

TEST_CASE("Monte Carlo volume") {
  for (int d : {2, 4}) {
    const auto v = mc_volume(oracle::unit_cube_facets(d), d, 100000, 1);
    CHECK(std::abs(v.estimate - 1.0) <= 3.0 * v.std_error);
    const auto e = mc_volume({}, d, 1000, 1);
    CHECK(e.estimate == std::pow(3.0, d));
    CHECK(e.std_error == 0.0);
  }
  // Half plane x >= 0.5 inside [-1,2]^2 has area 1.5 * 3.
  const auto half = mc_volume({Hyperplane{-0.5, Eigen::Vector2d(1, 0)}}, 2, 200000, 3);
  CHECK(std::abs(half.estimate - 4.5) <= 4.0 * half.std_error);
  CHECK_THROWS_AS(mc_volume({}, 2, 999, 1), std::invalid_argument);
}

TEST_CASE("volume is monotone under added hyperplanes for a fixed seed") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Hyperplane> hs;
  double prev = mc_volume(hs, 3, 5000, 9).estimate;
  for (int k = 0; k < 6; ++k) {
    hs.push_back({u(rng) + 1.5, Eigen::Vector3d(u(rng), u(rng), u(rng))});
    const double v = mc_volume(hs, 3, 5000, 9).estimate;
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("planar hull") {
  PointsXd pts(6, 2);
  pts << 0, 0, 1, 0, 1, 1, 0, 1, 0.5, 0.5, 0.5, 0;  // interior and collinear extras
  const auto hull = convex_hull_2d(pts);
  REQUIRE(hull.size() == 4);
  double area2 = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& p = hull[i];
    const auto& q = hull[(i + 1) % hull.size()];
    area2 += p.x() * q.y() - p.y() * q.x();
  }
  CHECK(area2 == doctest::Approx(2.0));  // counter-clockwise
}

TEST_CASE("hull greedy on a square") {
  const auto ds = square_with_sides();
  const auto four = hull_greedy_2d(ds, 4);
  CHECK(four.error == 0);
  CHECK(four.hyperplanes.size() == 4);
  for (const auto& h : four.hyperplanes) {
    CHECK(is_valid(h, ds));
    CHECK(h.w.norm() == doctest::Approx(1.0));
  }
  const auto one = hull_greedy_2d(ds, 1);
  CHECK(one.error == 6);
  const auto ten = hull_greedy_2d(ds, 10);
  CHECK(ten.hyperplanes.size() == 4);  // stops once nothing is gained

  PointsXd p3(3, 3), n3(1, 3);
  p3.setZero();
  n3.setOnes();
  CHECK_THROWS_AS(hull_greedy_2d(Dataset(p3, n3), 2), std::invalid_argument);
  PointsXd line(2, 2), far(1, 2);
  line << 0, 0, 1, 1;
  far << 5, 0;
  CHECK_THROWS_AS(hull_greedy_2d(Dataset(line, far), 2), std::invalid_argument);
}

TEST_CASE("run_method produces consistent reports") {
  GenConfig c = GenConfig::table_default(Family::d1, 2, 4);
  c.random_positives = 20;
  c.random_negatives = 30;
  const auto ds = generate(c);
  BudgetParams p;
  p.diameter = 3.0;
  for (Method m : all_methods()) {
    RunConfig rc;
    rc.method = m;
    rc.K = 3;
    rc.time_limit = 1.0;
    rc.deterministic = true;
    const auto out = run_method(ds, p, rc);
    INFO(to_string(m));
    CHECK(out.report.method == to_string(m));
    CHECK(out.report.K == 3);
    CHECK(out.report.d == 2);
    CHECK(out.report.te_seconds <= out.report.seconds + 1e-9);
    if (out.report.error_pct) {
      CHECK(*out.report.error_pct == doctest::Approx(100.0 * double(out.solution.error) / double(ds.num_negatives())));
      CHECK(out.solution.error == separation_error(ds, out.solution.hyperplanes));
    }
    CHECK(out.telemetry.has_value() == (m == Method::colgen_ahp || m == Method::colgen_exact));
  }
  RunConfig bad;
  bad.K = 0;
  CHECK_THROWS_AS(run_method(ds, p, bad), std::invalid_argument);
}
