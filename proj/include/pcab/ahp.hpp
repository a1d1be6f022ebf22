#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "pcab/core.hpp"
#include "pcab/models.hpp"

namespace pcab {

struct HplsInput {
  /// Negatives ordered by nonincreasing dual.
  std::vector<Eigen::Index> sigma;
  Eigen::Index start = 0;
  /// Most candidates considered, not counting the start.
  int thr = 1;
};

struct AhpState {
  /// Indicator of the best column of the previous iteration; all ones at
  /// the first iteration.
  Eigen::VectorXd x_prev;
};

/// Stable order of the negatives by decreasing `lambda`.
std::vector<Eigen::Index> sort_by_dual(const Eigen::VectorXd& lambda);

/// LSVM optimum for the positives against `subset`.
double lsvm_value(const Dataset& ds, const std::vector<Eigen::Index>& subset);
inline bool hulls_intersect(const Dataset& ds, const std::vector<Eigen::Index>& subset) {
  return lsvm_value(ds, subset) < kLsvmTol;
}

/// Hyperplane with positives at `>= 1` and `subset` at `<= -1` minimizing
/// the L1 norm of w; empty when no such hyperplane exists.
std::optional<Hyperplane> separate(const Dataset& ds, const std::vector<Eigen::Index>& subset);

/// One heuristic pricing column grown from `in.start`. Empty when the start
/// point itself lies in the positive hull. `lsvm_calls`, when given,
/// receives the number of LSVM solves.
std::optional<Column> hpls(const Dataset& ds, const HplsInput& in, int* lsvm_calls = nullptr);

/// Start indices for up to `nmax` HPLS runs. The first is drawn with
/// weights x_prev * lambda, the rest without replacement with weights
/// (1 - x_prev) * lambda (all ones replace 1 - x_prev when x_prev has no
/// zero). A weight vector that is entirely zero falls back to its 0/1 mask.
std::vector<Eigen::Index> draw_starts(const Eigen::VectorXd& lambda, const Eigen::VectorXd& x_prev,
                                      int nmax, std::mt19937_64& rng);

/// Runs HPLS from each drawn start concurrently. Columns come back in
/// launch order with reduced costs set from `duals`.
std::vector<Column> ahp(const Dataset& ds, const DualPrices& duals, const AhpState& state,
                        int thr, int nmax, std::uint64_t seed);

}  // namespace pcab
