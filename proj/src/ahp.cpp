#include "pcab/ahp.hpp"

#include <algorithm>
#include <future>
#include <numeric>
#include <stdexcept>

#include "pcab/lp/simplex.hpp"

namespace pcab {

namespace {

constexpr double kIndicatorTol = 1e-6;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Index drawn with probability proportional to `w`; -1 when `w` has no mass.
Eigen::Index draw(const Eigen::VectorXd& w, std::mt19937_64& rng) {
  const double total = w.sum();
  if (!(total > 0)) return -1;
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  Eigen::Index last = -1;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (w[i] <= 0) continue;
    acc += w[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

Eigen::VectorXd with_mask_fallback(const Eigen::VectorXd& weights, const Eigen::VectorXd& mask) {
  if (weights.sum() > 0) return weights;
  if (mask.sum() > 0) return mask;
  return Eigen::VectorXd::Ones(mask.size());
}

}  // namespace

std::vector<Eigen::Index> sort_by_dual(const Eigen::VectorXd& lambda) {
  std::vector<Eigen::Index> sigma(static_cast<std::size_t>(lambda.size()));
  std::iota(sigma.begin(), sigma.end(), Eigen::Index{0});
  std::stable_sort(sigma.begin(), sigma.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return lambda[a] > lambda[b]; });
  return sigma;
}

double lsvm_value(const Dataset& ds, const std::vector<Eigen::Index>& subset) {
  const auto res = lp::solve_lp(build_lsvm(ds, subset));
  if (res.status != lp::Status::optimal) throw std::runtime_error("LSVM did not solve to optimality");
  return res.objective;
}

std::optional<Hyperplane> separate(const Dataset& ds, const std::vector<Eigen::Index>& subset) {
  const Eigen::Index d = ds.dim();
  lp::ModelSpec spec;
  const lp::Index b = spec.add_free("b");
  std::vector<lp::Index> wp, wm;
  for (Eigen::Index j = 0; j < d; ++j) {
    wp.push_back(spec.add_variable("wp_" + std::to_string(j), 0.0, lp::kInfinity, 1.0));
    wm.push_back(spec.add_variable("wm_" + std::to_string(j), 0.0, lp::kInfinity, 1.0));
  }
  auto row = [&](const auto& a) {
    std::vector<lp::Term> t{{b, 1.0}};
    for (Eigen::Index j = 0; j < d; ++j) {
      t.push_back({wp[j], a[j]});
      t.push_back({wm[j], -a[j]});
    }
    return t;
  };
  for (Eigen::Index i = 0; i < ds.num_positives(); ++i)
    spec.add_constraint("pos_" + std::to_string(i), row(ds.positive(i)), lp::Relation::greater_equal, 1.0);
  for (Eigen::Index i : subset)
    spec.add_constraint("neg_" + std::to_string(i), row(ds.negative(i)), lp::Relation::less_equal, -1.0);
  const auto res = lp::solve_lp(spec);
  if (res.status != lp::Status::optimal) return std::nullopt;
  Hyperplane h{res.values[b], Eigen::VectorXd(d)};
  for (Eigen::Index j = 0; j < d; ++j) h.w[j] = res.values[wp[j]] - res.values[wm[j]];
  return h;
}

std::optional<Column> hpls(const Dataset& ds, const HplsInput& in, int* lsvm_calls) {
  const Eigen::Index n = ds.num_negatives();
  if (static_cast<Eigen::Index>(in.sigma.size()) != n) throw std::invalid_argument("hpls: sigma has the wrong length");
  if (in.start < 0 || in.start >= n) throw std::out_of_range("hpls: start index out of range");
  int calls = 0;
  auto disjoint = [&](const std::vector<Eigen::Index>& s) {
    ++calls;
    return lsvm_value(ds, s) > kLsvmTol;
  };

  std::vector<Eigen::Index> kept{in.start};
  const bool start_ok = disjoint(kept);
  if (start_ok) {
    int considered = 0;
    for (std::size_t pos = 0; pos < in.sigma.size() && considered < in.thr; ++pos) {
      const Eigen::Index cand = in.sigma[pos];
      if (cand == in.start) continue;
      ++considered;
      kept.push_back(cand);
      if (!disjoint(kept)) kept.pop_back();
    }
  }
  if (lsvm_calls) *lsvm_calls = calls;
  if (!start_ok) return std::nullopt;

  const auto h = separate(ds, kept);
  if (!h) throw std::logic_error("hpls: separation LP infeasible on an LSVM-certified subset");
  Column col;
  col.hyperplane = shift_to_positives(*h, ds);
  col.indicator = margin_indicator(ds, col.hyperplane, kIndicatorTol);
  return col;
}

std::vector<Eigen::Index> draw_starts(const Eigen::VectorXd& lambda, const Eigen::VectorXd& x_prev,
                                      int nmax, std::mt19937_64& rng) {
  if (lambda.size() != x_prev.size()) throw std::invalid_argument("draw_starts: size mismatch");
  std::vector<Eigen::Index> starts;
  if (nmax < 1 || lambda.size() == 0) return starts;
  const Eigen::VectorXd lam = lambda.cwiseMax(0.0);

  const Eigen::VectorXd first = with_mask_fallback(x_prev.cwiseProduct(lam), x_prev);
  starts.push_back(draw(first, rng));

  const bool has_zero = (x_prev.array() < 0.5).any();
  const Eigen::VectorXd y_prev = has_zero ? Eigen::VectorXd(Eigen::VectorXd::Ones(x_prev.size()) - x_prev)
                                          : Eigen::VectorXd::Ones(x_prev.size());
  Eigen::VectorXd p = with_mask_fallback(y_prev.cwiseProduct(lam), y_prev);
  p[starts.front()] = 0.0;
  while (static_cast<int>(starts.size()) < nmax) {
    const Eigen::Index i = draw(p, rng);
    if (i < 0) break;
    starts.push_back(i);
    p[i] = 0.0;
  }
  return starts;
}

std::vector<Column> ahp(const Dataset& ds, const DualPrices& duals, const AhpState& state,
                        int thr, int nmax, std::uint64_t seed) {
  const Eigen::Index n = ds.num_negatives();
  if (duals.lambda.size() != n) throw std::invalid_argument("ahp: one dual per negative point expected");
  if (thr < 1 || nmax < 1) throw std::invalid_argument("ahp: thr and nmax must be positive");
  const Eigen::VectorXd x_prev = state.x_prev.size() == n ? state.x_prev : Eigen::VectorXd::Ones(n);

  std::mt19937_64 rng(seed);
  const auto starts = draw_starts(duals.lambda, x_prev, nmax, rng);
  const auto sigma = sort_by_dual(duals.lambda);

  std::vector<std::future<std::optional<Column>>> runs;
  for (Eigen::Index s : starts)
    runs.push_back(std::async(std::launch::async, [&ds, &sigma, s, thr] {
      return hpls(ds, HplsInput{sigma, s, thr});
    }));
  std::vector<Column> out;
  for (auto& f : runs) {
    auto col = f.get();
    if (!col) continue;
    col->reduced_cost = reduced_cost(col->indicator, duals);
    out.push_back(std::move(*col));
  }
  return out;
}

}  // namespace pcab
