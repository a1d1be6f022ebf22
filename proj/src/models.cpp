#include "pcab/models.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcab {

using lp::Index;
using lp::ModelSpec;
using lp::Relation;
using lp::Term;

namespace {

std::string nm(const char* base, Eigen::Index i) { return std::string(base) + "_" + std::to_string(i); }
std::string nm(const char* base, Eigen::Index i, Eigen::Index k) {
  return nm(base, i) + "_" + std::to_string(k);
}

struct HyperplaneVars {
  Index b;
  std::vector<Index> w;
};

HyperplaneVars add_hyperplane(ModelSpec& spec, Eigen::Index k, Eigen::Index d) {
  HyperplaneVars h{spec.add_free(nm("b", k)), {}};
  for (Eigen::Index j = 0; j < d; ++j) h.w.push_back(spec.add_free(nm("w", k, j)));
  return h;
}

/// b + w . a as a term list, followed by `extra`.
std::vector<Term> affine(const HyperplaneVars& h, const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         std::initializer_list<Term> extra = {}) {
  std::vector<Term> t{{h.b, 1.0}};
  for (std::size_t j = 0; j < h.w.size(); ++j) t.push_back({h.w[j], a[static_cast<Eigen::Index>(j)]});
  t.insert(t.end(), extra.begin(), extra.end());
  return t;
}

void add_positive_rows(ModelSpec& spec, const Dataset& ds, const HyperplaneVars& h, Eigen::Index k) {
  for (Eigen::Index i = 0; i < ds.num_positives(); ++i)
    spec.add_constraint(nm("pos", i, k), affine(h, ds.positive(i)), Relation::greater_equal, 1.0);
}

/// Rows neg_i_k and bigm_i_k for one negative point; returns x_i_k.
Index add_separation_pair(ModelSpec& spec, const Dataset& ds, const HyperplaneVars& h,
                          Eigen::Index i, Eigen::Index k, double x_obj, double big_m) {
  const Index x = spec.add_binary(nm("x", i, k), x_obj);
  const Index xi = spec.add_variable(nm("xi", i, k), 0.0, lp::kInfinity);
  spec.add_constraint(nm("neg", i, k), affine(h, ds.negative(i), {{xi, -1.0}}), Relation::less_equal, -1.0);
  spec.add_constraint(nm("bigm", i, k), {{xi, 1.0}, {x, big_m}}, Relation::less_equal, big_m);
  return x;
}

ModelSpec build_master(const ColumnPool& pool, const Dataset& ds, const BudgetParams& p, bool integer) {
  p.validate();
  const Eigen::Index n = ds.num_negatives();
  const Eigen::VectorXd c = p.weight.negative_weights(ds);
  ModelSpec spec;
  std::vector<Index> z;
  for (std::size_t q = 0; q < pool.size(); ++q) {
    if (pool[q].indicator.size() != n) throw std::invalid_argument("column indicator has the wrong length");
    z.push_back(spec.add_variable(nm("z", static_cast<Eigen::Index>(q)), 0.0, 1.0, 0.0, integer));
  }
  std::vector<Index> e;
  for (Eigen::Index i = 0; i < n; ++i) e.push_back(spec.add_variable(nm("e", i), 0.0, 1.0, c[i], integer));
  for (Eigen::Index i = 0; i < n; ++i) {
    std::vector<Term> t;
    for (std::size_t q = 0; q < pool.size(); ++q)
      if (pool[q].indicator[i] > 0.5) t.push_back({z[q], 1.0});
    t.push_back({e[i], 1.0});
    spec.add_constraint(nm("cover", i), std::move(t), Relation::greater_equal, 1.0);
  }
  std::vector<Term> budget;
  for (Index v : z) budget.push_back({v, -1.0});
  spec.add_constraint("budget", std::move(budget), Relation::greater_equal, -static_cast<double>(p.K));
  return spec;
}

}  // namespace

void BudgetParams::validate() const {
  if (K < 1) throw std::invalid_argument("budget K must be at least 1");
  if (!(big_m > 0)) throw std::invalid_argument("big-M must be positive");
  if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
}

Eigen::VectorXd margin_indicator(const Dataset& ds, const Hyperplane& h, double tol) {
  return (h.values(ds.negatives()).array() <= -1.0 + tol).cast<double>().matrix();
}

ModelSpec build_model_a(const Dataset& ds, const BudgetParams& p) {
  p.validate();
  const Eigen::Index n = ds.num_negatives(), d = ds.dim();
  const Eigen::VectorXd c = p.weight.negative_weights(ds);
  if ((c.array() < 0).any()) throw std::invalid_argument("Model A needs nonnegative weights");
  ModelSpec spec;
  std::vector<std::vector<Term>> assign(static_cast<std::size_t>(n));
  for (int k = 0; k < p.K; ++k) {
    const auto h = add_hyperplane(spec, k, d);
    add_positive_rows(spec, ds, h, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Index x = spec.add_binary(nm("x", i, k));
      const Index xi = spec.add_variable(nm("xi", i, k), 0.0, lp::kInfinity);
      const Index y = spec.add_variable(nm("y", i, k), 0.0, lp::kInfinity, c[i]);
      spec.add_constraint(nm("neg", i, k), affine(h, ds.negative(i), {{xi, -1.0}}), Relation::less_equal, -1.0);
      // y >= xi - M (1 - x)
      spec.add_constraint(nm("lin", i, k), {{y, 1.0}, {xi, -1.0}, {x, -p.big_m}},
                          Relation::greater_equal, -p.big_m);
      assign[static_cast<std::size_t>(i)].push_back({x, 1.0});
    }
  }
  for (Eigen::Index i = 0; i < n; ++i)
    spec.add_constraint(nm("assign", i), std::move(assign[static_cast<std::size_t>(i)]), Relation::equal, 1.0);
  return spec;
}

ModelSpec build_model_b(const Dataset& ds, const BudgetParams& p) {
  p.validate();
  const Eigen::Index n = ds.num_negatives(), d = ds.dim();
  const Eigen::VectorXd c = p.weight.negative_weights(ds);
  ModelSpec spec;
  std::vector<std::vector<Term>> assign(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Index e = spec.add_binary(nm("e", i), c[i]);
    assign[static_cast<std::size_t>(i)].push_back({e, 1.0});
  }
  for (int k = 0; k < p.K; ++k) {
    const auto h = add_hyperplane(spec, k, d);
    add_positive_rows(spec, ds, h, k);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Index x = add_separation_pair(spec, ds, h, i, k, 0.0, p.big_m);
      assign[static_cast<std::size_t>(i)].push_back({x, 1.0});
    }
  }
  // sum_k x_i_k = 1 - e_i
  for (Eigen::Index i = 0; i < n; ++i)
    spec.add_constraint(nm("assign", i), std::move(assign[static_cast<std::size_t>(i)]), Relation::equal, 1.0);
  return spec;
}

ModelSpec build_ov2007(const Dataset& ds, const BudgetParams& p) {
  p.validate();
  const Eigen::Index m = ds.num_positives(), n = ds.num_negatives(), d = ds.dim();
  const Eigen::Index total = m + n;
  PointsXd all(total, d);
  all << ds.positives(), ds.negatives();
  const double diam = p.diameter ? *p.diameter
                                 : (all.colwise().maxCoeff() - all.colwise().minCoeff()).maxCoeff();
  if (!(diam > 0)) throw std::invalid_argument("OV2007 needs a positive diameter bound");
  const double Q = static_cast<double>(d) * diam;
  const Eigen::VectorXd c = p.weight.all_weights(ds);

  ModelSpec spec;
  std::vector<HyperplaneVars> hs;
  for (int k = 0; k < p.K; ++k) hs.push_back(add_hyperplane(spec, k, d));
  const Index v = spec.add_binary("v");
  for (Eigen::Index i = 0; i < total; ++i) {
    const bool positive = i < m;
    const double label = positive ? 1.0 : -1.0;
    const Index e = spec.add_binary(nm("e", i), c[i]);
    const Index mi = spec.add_binary(nm("m", i));
    std::vector<Term> dsum;
    for (int k = 0; k < p.K; ++k) {
      const Index dik = spec.add_binary(nm("d", i, k));
      if (positive) spec.set_bounds(dik, 0.0, 0.0);
      const auto& h = hs[static_cast<std::size_t>(k)];
      spec.add_constraint(nm("cls1", i, k), affine(h, all.row(i), {{dik, Q}}), Relation::greater_equal, 0.0);
      spec.add_constraint(nm("cls2", i, k), affine(h, all.row(i), {{dik, Q}}), Relation::less_equal, Q - p.epsilon);
      dsum.push_back({dik, 1.0});
    }
    std::vector<Term> up{{mi, 1.0}}, lo{{mi, static_cast<double>(p.K)}};
    for (const auto& t : dsum) {
      up.push_back({t.var, -1.0});
      lo.push_back({t.var, -1.0});
    }
    spec.add_constraint(nm("mup", i), std::move(up), Relation::less_equal, 0.0);
    spec.add_constraint(nm("mlo", i), std::move(lo), Relation::greater_equal, 0.0);
    // 2v - 1 - l (1 - 2m) within [-2e, 2e]
    spec.add_constraint(nm("me1", i), {{v, 2.0}, {mi, 2.0 * label}, {e, -2.0}}, Relation::less_equal, 1.0 + label);
    spec.add_constraint(nm("me2", i), {{v, 2.0}, {mi, 2.0 * label}, {e, 2.0}}, Relation::greater_equal, 1.0 + label);
  }
  return spec;
}

ModelSpec build_pricing(const Dataset& ds, const DualPrices& duals, const BudgetParams& p) {
  p.validate();
  const Eigen::Index n = ds.num_negatives();
  if (duals.lambda.size() != n) throw std::invalid_argument("pricing needs one dual per negative point");
  if (!duals.lambda.allFinite() || !std::isfinite(duals.mu)) throw std::invalid_argument("non-finite duals");
  ModelSpec spec;
  const auto h = add_hyperplane(spec, 0, ds.dim());
  add_positive_rows(spec, ds, h, 0);
  for (Eigen::Index i = 0; i < n; ++i) add_separation_pair(spec, ds, h, i, 0, -duals.lambda[i], p.big_m);
  spec.set_objective_offset(duals.mu);
  return spec;
}

ModelSpec build_plsm(const Dataset& ds, const std::vector<Eigen::Index>& subset,
                     const WeightFunction& weight, double big_m) {
  if (subset.empty()) throw std::invalid_argument("PLSM needs a nonempty subset");
  if (!(big_m > 0)) throw std::invalid_argument("big-M must be positive");
  ModelSpec spec(lp::Sense::maximize);
  const auto h = add_hyperplane(spec, 0, ds.dim());
  add_positive_rows(spec, ds, h, 0);
  for (Eigen::Index i : subset) {
    if (i < 0 || i >= ds.num_negatives()) throw std::out_of_range("PLSM subset index out of range");
    add_separation_pair(spec, ds, h, i, 0, weight(ds.negative(i).transpose()), big_m);
  }
  return spec;
}

ModelSpec build_lsvm(const Dataset& ds, const std::vector<Eigen::Index>& subset) {
  if (subset.empty()) throw std::invalid_argument("LSVM needs a nonempty subset");
  const Eigen::Index m = ds.num_positives(), d = ds.dim();
  ModelSpec spec;
  std::vector<Index> alpha, beta, xi, eta;
  for (Eigen::Index i = 0; i < m; ++i) alpha.push_back(spec.add_variable(nm("alpha", i), 0.0, 1.0));
  for (Eigen::Index i : subset) {
    if (i < 0 || i >= ds.num_negatives()) throw std::out_of_range("LSVM subset index out of range");
    beta.push_back(spec.add_variable(nm("beta", i), 0.0, 1.0));
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    xi.push_back(spec.add_variable(nm("xi", j), 0.0, lp::kInfinity, 1.0));
    eta.push_back(spec.add_variable(nm("eta", j), 0.0, lp::kInfinity, 1.0));
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    std::vector<Term> t;
    for (Eigen::Index i = 0; i < m; ++i) t.push_back({alpha[i], ds.positives()(i, j)});
    for (std::size_t s = 0; s < subset.size(); ++s) t.push_back({beta[s], -ds.negatives()(subset[s], j)});
    t.push_back({xi[j], 1.0});
    t.push_back({eta[j], -1.0});
    spec.add_constraint(nm("coord", j), std::move(t), Relation::equal, 0.0);
  }
  std::vector<Term> sa, sb;
  for (Index a : alpha) sa.push_back({a, 1.0});
  for (Index b : beta) sb.push_back({b, 1.0});
  spec.add_constraint("sum_alpha", std::move(sa), Relation::equal, 1.0);
  spec.add_constraint("sum_beta", std::move(sb), Relation::equal, 1.0);
  return spec;
}

ModelSpec build_rmm(const ColumnPool& pool, const Dataset& ds, const BudgetParams& p) {
  return build_master(pool, ds, p, false);
}

ModelSpec build_hcm(const ColumnPool& pool, const Dataset& ds, const BudgetParams& p) {
  return build_master(pool, ds, p, true);
}

std::vector<Hyperplane> extract_hyperplanes(const lp::SolveResult& result, const ModelSpec& spec,
                                            ModelKind kind, int K, Eigen::Index d) {
  if (!result.has_solution()) throw std::invalid_argument("extract_hyperplanes: result has no primal values");
  if (kind == ModelKind::pricing || kind == ModelKind::plsm) K = 1;
  if (kind == ModelKind::rmm || kind == ModelKind::hcm)
    throw std::invalid_argument("extract_hyperplanes: use extract_selected for master models");
  std::vector<Hyperplane> hs;
  for (int k = 0; k < K; ++k) {
    Hyperplane h{result.value(spec, nm("b", k)), Eigen::VectorXd(d)};
    for (Eigen::Index j = 0; j < d; ++j) h.w[j] = result.value(spec, nm("w", k, j));
    hs.push_back(std::move(h));
  }
  return hs;
}

std::vector<Hyperplane> extract_selected(const lp::SolveResult& result, const ModelSpec& spec,
                                         const ColumnPool& pool) {
  if (!result.has_solution()) throw std::invalid_argument("extract_selected: result has no primal values");
  std::vector<Hyperplane> hs;
  for (std::size_t q = 0; q < pool.size(); ++q)
    if (result.value(spec, nm("z", static_cast<Eigen::Index>(q))) > 0.5) hs.push_back(pool[q].hyperplane);
  return hs;
}

Eigen::VectorXd extract_indicator(const lp::SolveResult& result, const ModelSpec& spec, Eigen::Index n) {
  if (!result.has_solution()) throw std::invalid_argument("extract_indicator: result has no primal values");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (auto idx = spec.find_variable(nm("x", i, 0))) x[i] = result.values[*idx] > 0.5 ? 1.0 : 0.0;
  return x;
}

DualPrices extract_duals(const lp::SolveResult& result, const ModelSpec& spec, Eigen::Index n) {
  if (result.duals.empty()) throw std::invalid_argument("extract_duals: result carries no duals");
  DualPrices dp{Eigen::VectorXd(n), result.dual(spec, "budget")};
  for (Eigen::Index i = 0; i < n; ++i) dp.lambda[i] = result.dual(spec, nm("cover", i));
  return dp;
}

}  // namespace pcab
