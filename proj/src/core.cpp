#include "pcab/core.hpp"

#include <cmath>
#include <limits>

namespace pcab {

WeightFunction WeightFunction::constant(double c) {
  if (c == 1.0) return {};
  return WeightFunction([c](const Eigen::Ref<const Eigen::VectorXd>&) { return c; });
}

Eigen::VectorXd WeightFunction::negative_weights(const Dataset& ds) const {
  Eigen::VectorXd c(ds.num_negatives());
  for (Eigen::Index i = 0; i < ds.num_negatives(); ++i) c[i] = (*this)(ds.negative(i).transpose());
  return c;
}

Eigen::VectorXd WeightFunction::all_weights(const Dataset& ds) const {
  Eigen::VectorXd c(ds.num_positives() + ds.num_negatives());
  for (Eigen::Index i = 0; i < ds.num_positives(); ++i) c[i] = (*this)(ds.positive(i).transpose());
  c.tail(ds.num_negatives()) = negative_weights(ds);
  return c;
}

std::optional<Hyperplane> to_margin_form(const Hyperplane& h, const Dataset& ds, double tol) {
  check_dimension(h, ds);
  const double v_pos = h.values(ds.positives()).minCoeff();
  const Eigen::VectorXd vn = h.values(ds.negatives());
  double v_neg = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < vn.size(); ++i)
    if (vn[i] < -tol) v_neg = std::max(v_neg, vn[i]);
  if (!std::isfinite(v_neg) || v_pos <= v_neg) return std::nullopt;
  const double alpha = 2.0 / (v_pos - v_neg);
  const double beta = 1.0 - alpha * v_pos;
  return Hyperplane{alpha * h.b + beta, alpha * h.w};
}

PcabSolution make_solution(const Dataset& ds, std::vector<Hyperplane> hs,
                           std::vector<TracePoint> trace, double tol) {
  for (const auto& h : hs) {
    if (h.degenerate()) throw std::invalid_argument("solution hyperplane has a zero normal");
    if (!is_valid(h, ds, tol)) throw std::invalid_argument("solution hyperplane is not valid");
  }
  PcabSolution s;
  s.error = separation_error(ds, hs, tol);
  s.hyperplanes = std::move(hs);
  s.trace = std::move(trace);
  return s;
}

}  // namespace pcab
