#pragma once

#include <vector>

#include "pcab/core.hpp"
#include "pcab/lp/model_spec.hpp"
#include "pcab/models.hpp"

namespace pcab {

struct GreedyStats {
  int plsm_solves = 0;
  /// Negatives removed by each placed hyperplane.
  std::vector<std::vector<Eigen::Index>> covered;
};

/// Places one hyperplane at a time by solving PLSM (root node only) on the
/// negatives not yet cut off, for at most `p.K` solves. `opts.time_limit`
/// (or `opts.iteration_limit`, when set) bounds the whole run.
PcabSolution run_greedy(const Dataset& ds, const BudgetParams& p, const lp::SolveOptions& opts = {},
                        GreedyStats* stats = nullptr);

}  // namespace pcab
