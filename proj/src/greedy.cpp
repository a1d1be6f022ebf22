#include "pcab/greedy.hpp"

#include <numeric>

#include "pcab/budget.hpp"
#include "pcab/lp/branch_and_bound.hpp"

namespace pcab {

PcabSolution run_greedy(const Dataset& ds, const BudgetParams& p, const lp::SolveOptions& opts,
                        GreedyStats* stats) {
  p.validate();
  Budget budget = Budget::from_options(opts);
  const Eigen::Index n = ds.num_negatives();
  std::vector<Eigen::Index> remaining(static_cast<std::size_t>(n));
  std::iota(remaining.begin(), remaining.end(), Eigen::Index{0});

  std::vector<Hyperplane> placed;
  std::vector<TracePoint> trace;
  std::int64_t best = n;
  GreedyStats local;
  for (int t = 0; t < p.K && !remaining.empty() && !budget.exhausted(); ++t) {
    const auto spec = build_plsm(ds, remaining, p.weight, p.big_m);
    lp::SolveOptions so = opts;
    so.root_node_only = true;
    so.dive_rounds = static_cast<int>(ds.dim()) + 2;
    so = budget.next(so);
    const auto res = lp::solve_milp(spec, so);
    budget.charge(res);
    ++local.plsm_solves;
    if (!res.has_solution()) {
      local.covered.emplace_back();
      continue;
    }
    const Hyperplane h = extract_hyperplanes(res, spec, ModelKind::plsm, 1, ds.dim()).front();
    std::vector<Eigen::Index> cut, kept;
    for (Eigen::Index i : remaining) (h(ds.negative(i)) < -kGeomTol ? cut : kept).push_back(i);
    if (!h.degenerate()) placed.push_back(h);
    remaining = std::move(kept);
    local.covered.push_back(std::move(cut));
    const std::int64_t err = separation_error(ds, placed);
    if (err < best) {
      best = err;
      trace.emplace_back(budget.elapsed(), err);
    }
  }
  if (stats) *stats = std::move(local);
  return make_solution(ds, std::move(placed), std::move(trace));
}

}  // namespace pcab
