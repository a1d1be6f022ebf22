#include "pcab/lp/branch_and_bound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "pcab/lp/simplex.hpp"

namespace pcab::lp {

namespace {

constexpr double kIntTol = 1e-6;
constexpr int kDiveEveryNodes = 64;

struct BoundChange {
  Index var;
  double lower, upper;
};

struct Node {
  std::int64_t id;
  double bound;
  std::vector<BoundChange> changes;
  std::shared_ptr<const std::vector<VarState>> basis;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound > b.bound;
    return a.id > b.id;
  }
};

double fractionality(double v) { return std::abs(v - std::round(v)); }

class MilpSolver {
 public:
  MilpSolver(const ModelSpec& spec, const SolveOptions& opts, const IncumbentCallback& cb)
      : spec_(spec), opts_(opts), cb_(cb), data_(LpData::from_spec(spec)), lp_(data_),
        polisher_(data_) {
    sign_ = spec.sense() == Sense::maximize ? -1.0 : 1.0;
    for (Index j = 0; j < spec.num_variables(); ++j)
      if (spec.variable(j).integer) ints_.push_back(j);
    integral_objective_ = true;
    for (Index j = 0; j < spec.num_variables(); ++j) {
      const double c = data_.cost[j];
      if (c == 0.0) continue;
      if (!spec.variable(j).integer || c != std::round(c)) integral_objective_ = false;
    }
    deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                   std::chrono::duration<double>(std::min(opts.time_limit, 1e7)));
  }

  SolveResult run();

 private:
  std::int64_t work() const { return lp_.iterations() + polisher_.iterations(); }
  bool out_of_time() const {
    return Clock::now() > deadline_ || (opts_.iteration_limit >= 0 && work() >= opts_.iteration_limit);
  }
  /// Iteration cap for the next solve on `s`.
  std::int64_t cap(const Simplex& s) const {
    if (opts_.iteration_limit < 0) return std::numeric_limits<std::int64_t>::max();
    return s.iterations() + std::max<std::int64_t>(0, opts_.iteration_limit - work());
  }
  LpStatus run(Simplex& s) { return s.solve(deadline_, cap(s)); }
  double cutoff_tol() const {
    return std::max(1e-9, opts_.mip_gap * std::abs(incumbent_obj_));
  }
  /// Node bound after exploiting an integral objective.
  double effective_bound(double b) const {
    return integral_objective_ ? std::ceil(b - 1e-6) : b;
  }
  bool prunable(double b) const {
    return has_incumbent_ && effective_bound(b) >= incumbent_obj_ - cutoff_tol();
  }
  void apply(const std::vector<BoundChange>& changes) {
    for (Index j : ints_) lp_.set_column_bounds(j, data_.col_lower[j], data_.col_upper[j]);
    for (const auto& c : changes) lp_.set_column_bounds(c.var, c.lower, c.upper);
  }
  /// Returns the index into ints_ of the most fractional variable, or -1.
  Index most_fractional(const Eigen::VectorXd& x) const;
  void consider(const Eigen::VectorXd& x);
  void consider_hint();
  void dive(int rounds);
  void dive_up();

  const ModelSpec& spec_;
  const SolveOptions& opts_;
  const IncumbentCallback& cb_;
  LpData data_;
  Simplex lp_;
  Simplex polisher_;
  double sign_ = 1.0;
  std::vector<Index> ints_;
  bool integral_objective_ = false;
  Clock::time_point deadline_;

  bool has_incumbent_ = false;
  double incumbent_obj_ = kInfinity;  // min form, no offset
  std::vector<double> incumbent_;
  std::int64_t nodes_ = 0;
};

Index MilpSolver::most_fractional(const Eigen::VectorXd& x) const {
  Index best = -1;
  double best_f = kIntTol;
  for (Index k = 0; k < static_cast<Index>(ints_.size()); ++k) {
    const double f = fractionality(x[ints_[k]]);
    if (f > best_f) {
      best_f = f;
      best = k;
    }
  }
  return best;
}

void MilpSolver::consider(const Eigen::VectorXd& x) {
  for (Index j : ints_) {
    const double v = std::clamp(std::round(x[j]), data_.col_lower[j], data_.col_upper[j]);
    polisher_.set_column_bounds(j, v, v);
  }
  if (run(polisher_) != LpStatus::optimal) return;
  const double obj = polisher_.objective();
  if (has_incumbent_ && obj >= incumbent_obj_ - 1e-9) return;
  const Eigen::VectorXd px = polisher_.primal();
  has_incumbent_ = true;
  incumbent_obj_ = obj;
  incumbent_.assign(px.data(), px.data() + px.size());
  if (cb_) cb_(sign_ * obj + spec_.objective_offset(), incumbent_);
}

void MilpSolver::consider_hint() {
  const auto& h = opts_.incumbent_hint;
  if (static_cast<Index>(h.size()) != spec_.num_variables()) return;
  if (spec_.max_violation(h) > opts_.feasibility_tol) return;
  for (Index j : ints_)
    if (fractionality(h[j]) > kIntTol) return;
  Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(h.data(), static_cast<Index>(h.size()));
  consider(x);
  if (has_incumbent_) return;
  // Polishing failed numerically; the hint is still a verified point.
  has_incumbent_ = true;
  incumbent_obj_ = data_.cost.dot(x);
  incumbent_ = h;
  if (cb_) cb_(sign_ * incumbent_obj_ + spec_.objective_offset(), incumbent_);
}

// Fixes batches of the least fractional integer variables to their rounded
// values, re-solving after each batch. An infeasible batch is undone and
// halved; a single infeasible fix is flipped once before giving up.
void MilpSolver::dive(int rounds) {
  if (ints_.empty()) return;
  std::vector<std::pair<double, double>> saved;
  saved.reserve(ints_.size());
  for (Index j : ints_) saved.emplace_back(lp_.column_lower(j), lp_.column_upper(j));
  const auto saved_basis = lp_.basis();

  int rounds_left = std::max(1, rounds);
  const std::size_t max_steps = 2 * ints_.size() + static_cast<std::size_t>(rounds) + 8;
  for (std::size_t step = 0; step < max_steps && !out_of_time(); ++step) {
    const Eigen::VectorXd x = lp_.primal();
    if (has_incumbent_ && effective_bound(lp_.objective()) >= incumbent_obj_ - cutoff_tol()) break;
    std::vector<Index> frac;
    for (Index j : ints_)
      if (fractionality(x[j]) > kIntTol) frac.push_back(j);
    if (frac.empty()) {
      consider(x);
      break;
    }
    std::stable_sort(frac.begin(), frac.end(), [&](Index a, Index b) {
      return fractionality(x[a]) < fractionality(x[b]);
    });
    std::size_t batch = (frac.size() + rounds_left - 1) / rounds_left;
    rounds_left = std::max(1, rounds_left - 1);

    bool progressed = false;
    while (!progressed && !out_of_time()) {
      const auto basis = lp_.basis();
      std::vector<BoundChange> undo;
      for (std::size_t k = 0; k < batch; ++k) {
        const Index j = frac[k];
        undo.push_back({j, lp_.column_lower(j), lp_.column_upper(j)});
        const double v = std::clamp(std::round(x[j]), lp_.column_lower(j), lp_.column_upper(j));
        lp_.set_column_bounds(j, v, v);
      }
      if (run(lp_) == LpStatus::optimal) {
        progressed = true;
        break;
      }
      for (const auto& u : undo) lp_.set_column_bounds(u.var, u.lower, u.upper);
      lp_.set_basis(basis);
      if (batch > 1) {
        batch /= 2;
        continue;
      }
      const Index j = frac.front();
      const double r = std::round(x[j]);
      const double v = x[j] >= r ? r + 1.0 : r - 1.0;
      if (v < lp_.column_lower(j) || v > lp_.column_upper(j)) break;
      lp_.set_column_bounds(j, v, v);
      if (run(lp_) == LpStatus::optimal) {
        progressed = true;
        break;
      }
      lp_.set_column_bounds(j, undo.front().lower, undo.front().upper);
      lp_.set_basis(basis);
      break;
    }
    if (!progressed) break;
  }

  for (std::size_t k = 0; k < ints_.size(); ++k)
    lp_.set_column_bounds(ints_[k], saved[k].first, saved[k].second);
  lp_.set_basis(saved_basis);
}

// Fixes the fractional integer variable with the largest fractional part
// up, or down when that is infeasible, one re-solve at a time.
void MilpSolver::dive_up() {
  if (ints_.empty()) return;
  std::vector<std::pair<double, double>> saved;
  saved.reserve(ints_.size());
  for (Index j : ints_) saved.emplace_back(lp_.column_lower(j), lp_.column_upper(j));
  const auto saved_basis = lp_.basis();

  for (std::size_t step = 0; step <= ints_.size() && !out_of_time(); ++step) {
    if (prunable(lp_.objective())) break;
    const Eigen::VectorXd x = lp_.primal();
    Index pick = -1;
    double best = kIntTol;
    for (Index j : ints_) {
      const double f = x[j] - std::floor(x[j]);
      if (f > best && f < 1.0 - kIntTol) {
        best = f;
        pick = j;
      }
    }
    if (pick < 0) {
      consider(x);
      break;
    }
    const auto basis = lp_.basis();
    const double lo = lp_.column_lower(pick), up = lp_.column_upper(pick);
    lp_.set_column_bounds(pick, std::ceil(x[pick]), std::ceil(x[pick]));
    if (run(lp_) == LpStatus::optimal) continue;
    lp_.set_basis(basis);
    lp_.set_column_bounds(pick, std::floor(x[pick]), std::floor(x[pick]));
    if (run(lp_) == LpStatus::optimal) continue;
    lp_.set_column_bounds(pick, lo, up);
    break;
  }

  for (std::size_t k = 0; k < ints_.size(); ++k)
    lp_.set_column_bounds(ints_[k], saved[k].first, saved[k].second);
  lp_.set_basis(saved_basis);
}

SolveResult MilpSolver::run() {
  SolveResult res;
  consider_hint();

  bool timed_out = false;
  bool unbounded = false;
  double best_bound = -kInfinity;
  std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
  std::int64_t next_id = 0;
  open.push({next_id++, -kInfinity, {}, nullptr});

  while (!open.empty()) {
    if (out_of_time()) {
      timed_out = true;
      break;
    }
    Node node = open.top();
    open.pop();
    if (prunable(node.bound)) continue;
    apply(node.changes);
    if (node.basis) lp_.set_basis(*node.basis);
    const LpStatus st = run(lp_);
    ++nodes_;
    if (st == LpStatus::limit) {
      open.push(std::move(node));
      timed_out = true;
      break;
    }
    if (st == LpStatus::infeasible) continue;
    if (st == LpStatus::unbounded) {
      if (node.id == 0) {
        unbounded = true;
        break;
      }
      continue;
    }
    const double bound = lp_.objective();
    if (node.id == 0) best_bound = effective_bound(bound);
    if (prunable(bound)) continue;
    Eigen::VectorXd x = lp_.primal();
    const Index k = most_fractional(x);
    if (k < 0) {
      consider(x);
      continue;
    }
    if (node.id == 0 || nodes_ % kDiveEveryNodes == 0) {
      if (node.id == 0) dive_up();
      dive(node.id == 0 ? opts_.dive_rounds : opts_.dive_rounds * 2);
      if (prunable(bound)) continue;
    }
    if (opts_.root_node_only) {
      open.push({node.id, bound, std::move(node.changes), nullptr});
      break;
    }
    const Index j = ints_[k];
    auto basis = std::make_shared<const std::vector<VarState>>(lp_.basis());
    const double lo = lp_.column_lower(j), up = lp_.column_upper(j);
    Node down{next_id++, bound, node.changes, basis};
    down.changes.push_back({j, lo, std::floor(x[j])});
    Node upn{next_id++, bound, std::move(node.changes), basis};
    upn.changes.push_back({j, std::ceil(x[j]), up});
    open.push(std::move(down));
    open.push(std::move(upn));
  }

  res.nodes = nodes_;
  res.iterations = lp_.iterations() + polisher_.iterations();
  if (unbounded) {
    res.status = Status::unbounded;
    return res;
  }
  double open_bound = kInfinity;
  if (!open.empty()) open_bound = effective_bound(open.top().bound);
  if (open.empty()) {
    best_bound = has_incumbent_ ? incumbent_obj_ : kInfinity;
  } else {
    best_bound = std::max(best_bound, std::min(open_bound, has_incumbent_ ? incumbent_obj_ : kInfinity));
  }
  if (has_incumbent_) {
    const bool closed = open.empty() || best_bound >= incumbent_obj_ - cutoff_tol();
    res.status = closed ? Status::optimal : Status::feasible_incumbent;
    res.values = incumbent_;
    res.objective = sign_ * incumbent_obj_ + spec_.objective_offset();
  } else {
    res.status = (open.empty() && !timed_out) ? Status::infeasible : Status::time_limit;
  }
  if (std::isfinite(best_bound)) {
    res.best_bound = sign_ * best_bound + spec_.objective_offset();
  } else {
    res.best_bound = sign_ * best_bound;
  }
  return res;
}

}  // namespace

SolveResult solve_milp(const ModelSpec& spec, const SolveOptions& opts,
                       const IncumbentCallback& on_incumbent) {
  if (!(opts.time_limit > 0)) throw std::invalid_argument("solve_milp: time limit must be positive");
  MilpSolver solver(spec, opts, on_incumbent);
  return solver.run();
}

SolveResult solve(const ModelSpec& spec, const SolveOptions& opts,
                  const IncumbentCallback& on_incumbent) {
  if (spec.num_integer() == 0) return solve_lp(spec, opts);
  return solve_milp(spec, opts, on_incumbent);
}

}  // namespace pcab::lp
