#include <doctest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "pcab/ahp.hpp"
#include "pcab/datagen.hpp"

using namespace pcab;

namespace {

Dataset d1_small(std::uint64_t seed) {
  GenConfig c = GenConfig::table_default(Family::d1, 2, seed);
  c.random_positives = 30;
  c.random_negatives = 40;
  return generate(c);
}

}  // namespace

TEST_CASE("sort_by_dual is a stable decreasing order") {
  const Eigen::VectorXd lam = (Eigen::VectorXd(5) << 0.2, 0.9, 0.2, 0.0, 0.9).finished();
  CHECK(sort_by_dual(lam) == std::vector<Eigen::Index>{1, 4, 0, 2, 3});
}

TEST_CASE("LSVM verdict agrees with a separating-LP feasibility check") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 60; ++t) {
    const auto ds = oracle::random_micro(rng);
    const auto n = static_cast<std::uint32_t>(ds.num_negatives());
    std::uniform_int_distribution<std::uint32_t> pick(1, (1u << n) - 1);
    const auto subset = oracle::members(pick(rng));
    CHECK(hulls_intersect(ds, subset) == !oracle::strictly_separable(ds, subset));
    CHECK(separate(ds, subset).has_value() == !hulls_intersect(ds, subset));
  }
}

TEST_CASE("separate returns a margin hyperplane") {
  const auto ds = d1_small(1);
  const std::vector<Eigen::Index> subset{0, 1};
  const auto h = separate(ds, subset);
  REQUIRE(h.has_value());
  CHECK(h->values(ds.positives()).minCoeff() >= 1.0 - 1e-7);
  for (auto i : subset) CHECK((*h)(ds.negative(i)) <= -1.0 + 1e-7);
}

TEST_CASE("HPLS with thr = 0 keeps only the start") {
  const auto ds = d1_small(2);
  const auto sigma = sort_by_dual(Eigen::VectorXd::Ones(ds.num_negatives()));
  int calls = -1;
  const auto col = hpls(ds, HplsInput{sigma, 5, 0}, &calls);
  CHECK(calls == 1);
  REQUIRE(col.has_value());
  CHECK(col->indicator[5] == 1.0);
}

TEST_CASE("HPLS column invariants and LSVM call bound") {
  std::mt19937_64 rng(5);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto ds = d1_small(10 + s);
    const Eigen::Index n = ds.num_negatives();
    std::uniform_real_distribution<double> u(0, 1);
    Eigen::VectorXd lam(n);
    for (Eigen::Index i = 0; i < n; ++i) lam[i] = u(rng);
    const auto sigma = sort_by_dual(lam);
    for (int thr : {1, 2, 5, 12}) {
      const Eigen::Index start = static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(n));
      int calls = 0;
      const auto col = hpls(ds, HplsInput{sigma, start, thr}, &calls);
      CHECK(calls <= thr + 1);
      REQUIRE(col.has_value());
      CHECK(is_valid(col->hyperplane, ds));
      CHECK(col->hyperplane.values(ds.positives()).minCoeff() == doctest::Approx(1.0));
      CHECK(col->indicator == margin_indicator(ds, col->hyperplane, 1e-6));
      CHECK(col->indicator[start] == 1.0);
    }
  }
}

TEST_CASE("HPLS from a start inside the positive hull yields nothing") {
  PointsXd pos(3, 2), neg(2, 2);
  pos << 0, 0, 4, 0, 0, 4;
  neg << 1, 1, 9, 9;
  const Dataset ds(pos, neg);
  int calls = 0;
  CHECK_FALSE(hpls(ds, HplsInput{{0, 1}, 0, 3}, &calls).has_value());
  CHECK(calls == 1);
  CHECK_THROWS_AS(hpls(ds, HplsInput{{0}, 0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(hpls(ds, HplsInput{{0, 1}, 2, 1}), std::out_of_range);
}

TEST_CASE("start draws") {
  std::mt19937_64 rng(3);
  const Eigen::VectorXd lam = (Eigen::VectorXd(6) << 0, 1, 1, 0, 2, 1).finished();
  const Eigen::VectorXd x_prev = (Eigen::VectorXd(6) << 1, 1, 0, 0, 0, 0).finished();
  for (int rep = 0; rep < 50; ++rep) {
    const auto starts = draw_starts(lam, x_prev, 8, rng);
    REQUIRE(!starts.empty());
    CHECK(starts.front() == 1);  // only x_prev = 1 with positive dual
    std::set<Eigen::Index> uniq(starts.begin(), starts.end());
    CHECK(uniq.size() == starts.size());
    // Later starts come from x_prev = 0 with positive dual: {2, 4, 5}.
    CHECK(starts.size() == 4);
    for (std::size_t k = 1; k < starts.size(); ++k) CHECK(lam[starts[k]] > 0);
  }
  CHECK(draw_starts(lam, x_prev, 1, rng).size() == 1);
  CHECK_THROWS_AS(draw_starts(lam, Eigen::VectorXd::Ones(3), 2, rng), std::invalid_argument);
  // No dual mass at all: fall back to the masks.
  const auto zero = draw_starts(Eigen::VectorXd::Zero(6), Eigen::VectorXd::Ones(6), 3, rng);
  CHECK(zero.size() == 3);
}

TEST_CASE("AHP is deterministic for a seed and reports reduced costs") {
  const auto ds = d1_small(7);
  const Eigen::Index n = ds.num_negatives();
  DualPrices duals{Eigen::VectorXd::LinSpaced(n, 1.0, 0.1), 0.3};
  const AhpState st{Eigen::VectorXd::Ones(n)};
  const auto a = ahp(ds, duals, st, 2, 4, 42);
  const auto b = ahp(ds, duals, st, 2, 4, 42);
  REQUIRE(a.size() == b.size());
  CHECK(!a.empty());
  CHECK(a.size() <= 4);
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].indicator == b[k].indicator);
    CHECK(a[k].hyperplane.w == b[k].hyperplane.w);
    CHECK(a[k].reduced_cost == doctest::Approx(reduced_cost(a[k].indicator, duals)).epsilon(1e-12));
  }
  CHECK(ahp(ds, duals, st, 2, 1, 42).size() <= 1);
  CHECK_THROWS_AS(ahp(ds, duals, st, 0, 4, 1), std::invalid_argument);
}
