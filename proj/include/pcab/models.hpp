#pragma once

#include <optional>
#include <vector>

#include "pcab/core.hpp"
#include "pcab/lp/model_spec.hpp"

namespace pcab {

struct BudgetParams {
  int K = 1;
  double big_m = 10000.0;
  /// OV2007 strict-side margin.
  double epsilon = 1e-3;
  WeightFunction weight;
  /// OV2007 diameter bound D. When unset the empirical L-infinity diameter
  /// of all points is used.
  std::optional<double> diameter;

  /// Throws std::invalid_argument on K < 1, big_m <= 0 or epsilon <= 0.
  void validate() const;
};

/// Master duals: lambda per negative point, mu for the budget row.
struct DualPrices {
  Eigen::VectorXd lambda;
  double mu = 0.0;
};

/// A 0/1 indicator over the negatives and the hyperplane generating it.
struct Column {
  Eigen::VectorXd indicator;
  Hyperplane hyperplane;
  double reduced_cost = 0.0;
};

using ColumnPool = std::vector<Column>;

/// `-lambda . x + mu`
inline double reduced_cost(const Eigen::VectorXd& indicator, const DualPrices& duals) {
  return -duals.lambda.dot(indicator) + duals.mu;
}

/// Indicator of negatives with `b + w . a <= -1 + tol`.
Eigen::VectorXd margin_indicator(const Dataset& ds, const Hyperplane& h, double tol = kGeomTol);

enum class ModelKind { model_a, model_b, ov2007, pricing, plsm, rmm, hcm };

// Variable names: e_i, x_i_k, xi_i_k, y_i_k, b_k, w_k_j (0-based). OV2007
// indexes e_i, m_i, d_i_k over all points, positives first. Pricing and
// PLSM use k = 0 so their rows coincide with Model B at K = 1.

lp::ModelSpec build_model_a(const Dataset& ds, const BudgetParams& p);
lp::ModelSpec build_model_b(const Dataset& ds, const BudgetParams& p);
lp::ModelSpec build_ov2007(const Dataset& ds, const BudgetParams& p);
/// min -sum lambda_i x_i + mu over one hyperplane.
lp::ModelSpec build_pricing(const Dataset& ds, const DualPrices& duals, const BudgetParams& p);
/// max sum c(a_i) x_i over the negatives in `subset` only.
lp::ModelSpec build_plsm(const Dataset& ds, const std::vector<Eigen::Index>& subset,
                         const WeightFunction& weight = {}, double big_m = 10000.0);
/// min sum (xi_j + eta_j); zero iff conv(positives) meets conv(subset).
lp::ModelSpec build_lsvm(const Dataset& ds, const std::vector<Eigen::Index>& subset);
/// Restricted master over `pool`: rows cover_i (lambda_i) and budget (mu).
lp::ModelSpec build_rmm(const ColumnPool& pool, const Dataset& ds, const BudgetParams& p);
/// The RMM with binary z and e.
lp::ModelSpec build_hcm(const ColumnPool& pool, const Dataset& ds, const BudgetParams& p);

/// Hyperplanes b_k, w_k for k < K (K = 1 for pricing and PLSM).
std::vector<Hyperplane> extract_hyperplanes(const lp::SolveResult& result, const lp::ModelSpec& spec,
                                            ModelKind kind, int K, Eigen::Index d);
/// Pool hyperplanes whose z_p is 1 in an HCM result.
std::vector<Hyperplane> extract_selected(const lp::SolveResult& result, const lp::ModelSpec& spec,
                                         const ColumnPool& pool);
/// Indicator x_i_0 of a pricing or PLSM result, expanded to all n negatives.
Eigen::VectorXd extract_indicator(const lp::SolveResult& result, const lp::ModelSpec& spec,
                                  Eigen::Index n);

/// Master duals read from an RMM result.
DualPrices extract_duals(const lp::SolveResult& result, const lp::ModelSpec& spec, Eigen::Index n);

/// LSVM verdict threshold: hulls intersect iff the optimum is below it.
inline constexpr double kLsvmTol = 1e-7;

}  // namespace pcab
