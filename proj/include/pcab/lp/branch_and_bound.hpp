#pragma once

#include <functional>
#include <vector>

#include "pcab/lp/model_spec.hpp"

namespace pcab::lp {

/// Called once per improving incumbent with its objective (in the sense of
/// the spec, offset included) and the full primal vector.
using IncumbentCallback = std::function<void(double objective, const std::vector<double>& values)>;

/// LP-based branch and bound.
///
/// Nodes are taken best-bound first (ties by creation order) and branched on
/// the most fractional integer variable (ties by lowest index). Children are
/// warm started from the parent basis with the dual simplex. Every incumbent
/// candidate is polished: integers are rounded and fixed, and the continuous
/// part is re-solved, which removes big-M leakage from the reported point.
/// A diving heuristic runs at the root and periodically inside the tree.
///
/// With `root_node_only` the search stops after the root LP and the dive;
/// the status is then `feasible_incumbent` (or `optimal` when the gap is
/// closed) if an incumbent exists and `time_limit` otherwise.
SolveResult solve_milp(const ModelSpec& spec, const SolveOptions& opts = {},
                       const IncumbentCallback& on_incumbent = {});

/// `solve_lp` for specs without integer variables, `solve_milp` otherwise.
SolveResult solve(const ModelSpec& spec, const SolveOptions& opts = {},
                  const IncumbentCallback& on_incumbent = {});

}  // namespace pcab::lp
