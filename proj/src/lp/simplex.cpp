#include "pcab/lp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pcab::lp {

namespace {

constexpr double kPrimalTol = 1e-9;
constexpr double kDualTol = 1e-9;
constexpr double kDualBailTol = 1e-7;
constexpr double kPivotTol = 1e-9;
constexpr double kDropTol = 1e-14;
constexpr std::size_t kRefactorEvery = 100;
constexpr int kDegenerateBeforeBland = 60;
constexpr int kClockEvery = 16;

}  // namespace

LpData LpData::from_spec(const ModelSpec& spec) {
  spec.validate();
  const Index m = spec.num_constraints();
  const Index n = spec.num_variables();
  LpData d;
  std::vector<Eigen::Triplet<double>> trips;
  d.row_lower.resize(m);
  d.row_upper.resize(m);
  for (Index i = 0; i < m; ++i) {
    const auto& row = spec.constraint(i);
    for (const auto& t : row.terms)
      if (t.coef != 0.0) trips.emplace_back(i, t.var, t.coef);
    switch (row.relation) {
      case Relation::less_equal: d.row_lower[i] = -kInfinity; d.row_upper[i] = row.rhs; break;
      case Relation::equal: d.row_lower[i] = d.row_upper[i] = row.rhs; break;
      case Relation::greater_equal: d.row_lower[i] = row.rhs; d.row_upper[i] = kInfinity; break;
    }
  }
  d.matrix.resize(m, n);
  d.matrix.setFromTriplets(trips.begin(), trips.end());
  d.matrix.makeCompressed();
  const double sign = spec.sense() == Sense::maximize ? -1.0 : 1.0;
  d.cost.resize(n);
  d.col_lower.resize(n);
  d.col_upper.resize(n);
  for (Index j = 0; j < n; ++j) {
    const auto& v = spec.variable(j);
    d.cost[j] = sign * v.objective;
    d.col_lower[j] = v.lower;
    d.col_upper[j] = v.upper;
  }
  return d;
}

Simplex::Simplex(LpData data) : data_(std::move(data)) {
  m_ = data_.rows();
  n_ = data_.cols();
  const Index total = m_ + n_;
  lo_.resize(total);
  up_.resize(total);
  cost_ = Eigen::VectorXd::Zero(total);
  lo_.head(n_) = data_.col_lower;
  up_.head(n_) = data_.col_upper;
  lo_.tail(m_) = data_.row_lower;
  up_.tail(m_) = data_.row_upper;
  cost_.head(n_) = data_.cost;
  x_ = Eigen::VectorXd::Zero(total);
  state_.assign(total, VarState::at_lower);
  head_.assign(m_, 0);
  reset_to_slack_basis();
}

void Simplex::place_nonbasic(Index j) {
  const bool lo_ok = std::isfinite(lo_[j]);
  const bool up_ok = std::isfinite(up_[j]);
  switch (state_[j]) {
    case VarState::basic: return;
    case VarState::at_lower:
      if (!lo_ok) state_[j] = up_ok ? VarState::at_upper : VarState::at_zero;
      break;
    case VarState::at_upper:
      if (!up_ok) state_[j] = lo_ok ? VarState::at_lower : VarState::at_zero;
      break;
    case VarState::at_zero:
      if (lo_ok) state_[j] = VarState::at_lower;
      else if (up_ok) state_[j] = VarState::at_upper;
      break;
  }
  switch (state_[j]) {
    case VarState::at_lower: x_[j] = lo_[j]; break;
    case VarState::at_upper: x_[j] = up_[j]; break;
    default: x_[j] = 0.0; break;
  }
}

void Simplex::reset_to_slack_basis() {
  for (Index j = 0; j < n_; ++j) {
    state_[j] = VarState::at_lower;
    place_nonbasic(j);
  }
  for (Index i = 0; i < m_; ++i) {
    head_[i] = n_ + i;
    state_[n_ + i] = VarState::basic;
  }
  etas_.clear();
}

void Simplex::set_column_bounds(Index j, double lower, double upper) {
  lo_[j] = lower;
  up_[j] = upper;
  if (state_[j] != VarState::basic) place_nonbasic(j);
}

void Simplex::set_basis(const std::vector<VarState>& states) {
  const Index total = m_ + n_;
  if (static_cast<Index>(states.size()) != total) {
    reset_to_slack_basis();
    return;
  }
  const auto basic = std::count(states.begin(), states.end(), VarState::basic);
  if (basic != m_) {
    reset_to_slack_basis();
    return;
  }
  state_ = states;
  Index r = 0;
  for (Index j = 0; j < total; ++j) {
    if (state_[j] == VarState::basic) head_[r++] = j;
    else place_nonbasic(j);
  }
  etas_.clear();
}

bool Simplex::refactor() {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(m_) * 2);
  for (Index r = 0; r < m_; ++r) {
    const Index j = head_[r];
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(data_.matrix, j); it; ++it)
        trips.emplace_back(static_cast<Index>(it.row()), r, it.value());
    } else {
      trips.emplace_back(j - n_, r, -1.0);
    }
  }
  Eigen::SparseMatrix<double> basis(m_, m_);
  basis.setFromTriplets(trips.begin(), trips.end());
  basis.makeCompressed();
  etas_.clear();
  if (m_ == 0) return true;
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  return lu_.info() == Eigen::Success;
}

void Simplex::ftran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  Eigen::VectorXd t = lu_.solve(v);
  v.swap(t);
  for (const auto& e : etas_) {
    const double vr = v[e.row];
    if (vr == 0.0) continue;
    v[e.row] = e.pivot_inv * vr;
    for (const auto& [i, val] : e.entries) v[i] += val * vr;
  }
}

void Simplex::btran(Eigen::VectorXd& v) const {
  if (m_ == 0) return;
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = it->pivot_inv * v[it->row];
    for (const auto& [i, val] : it->entries) s += val * v[i];
    v[it->row] = s;
  }
  Eigen::VectorXd t = lu_.transpose().solve(v);
  v.swap(t);
}

void Simplex::load_column(Index j, Eigen::VectorXd& v) const {
  v.setZero(m_);
  if (j < n_) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(data_.matrix, j); it; ++it)
      v[it.row()] = it.value();
  } else {
    v[j - n_] = -1.0;
  }
}

double Simplex::column_dot(Index j, const Eigen::VectorXd& y) const {
  if (j >= n_) return -y[j - n_];
  double s = 0.0;
  for (Eigen::SparseMatrix<double>::InnerIterator it(data_.matrix, j); it; ++it)
    s += it.value() * y[it.row()];
  return s;
}

void Simplex::compute_basic_values() {
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m_);
  for (Index j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::basic || x_[j] == 0.0) continue;
    if (j < n_) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(data_.matrix, j); it; ++it)
        rhs[it.row()] -= it.value() * x_[j];
    } else {
      rhs[j - n_] += x_[j];
    }
  }
  ftran(rhs);
  for (Index r = 0; r < m_; ++r) x_[head_[r]] = rhs[r];
}

void Simplex::compute_duals(const Eigen::VectorXd& basic_cost, Eigen::VectorXd& y,
                            Eigen::VectorXd& d) const {
  y = basic_cost;
  btran(y);
  d.setZero(n_ + m_);
  for (Index j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::basic) continue;
    d[j] = cost_[j] - column_dot(j, y);
  }
}

void Simplex::pivot(Index r, Index q, const Eigen::VectorXd& alpha) {
  Eta e;
  e.row = r;
  e.pivot_inv = 1.0 / alpha[r];
  for (Index i = 0; i < m_; ++i) {
    if (i == r || std::abs(alpha[i]) < kDropTol) continue;
    e.entries.emplace_back(i, -alpha[i] * e.pivot_inv);
  }
  etas_.push_back(std::move(e));
  head_[r] = q;
  state_[q] = VarState::basic;
  ++iterations_;
}

double Simplex::basic_infeasibility(Index j) const {
  if (x_[j] < lo_[j] - kPrimalTol) return lo_[j] - x_[j];
  if (x_[j] > up_[j] + kPrimalTol) return x_[j] - up_[j];
  return 0.0;
}

double Simplex::objective() const {
  return cost_.head(n_).dot(x_.head(n_));
}

Eigen::VectorXd Simplex::row_duals() const {
  Eigen::VectorXd cb(m_);
  for (Index r = 0; r < m_; ++r) cb[r] = cost_[head_[r]];
  btran(cb);
  return cb;
}

Eigen::VectorXd Simplex::reduced_costs() const {
  Eigen::VectorXd cb(m_), y, d;
  for (Index r = 0; r < m_; ++r) cb[r] = cost_[head_[r]];
  compute_duals(cb, y, d);
  return d.head(n_);
}

bool Simplex::make_dual_feasible(const Eigen::VectorXd& d) {
  std::vector<Index> flips;
  for (Index j = 0; j < n_ + m_; ++j) {
    if (state_[j] == VarState::basic || lo_[j] == up_[j]) continue;
    const double dj = d[j];
    switch (state_[j]) {
      case VarState::at_lower:
        if (dj < -kDualBailTol) {
          if (!std::isfinite(up_[j])) return false;
          flips.push_back(j);
        }
        break;
      case VarState::at_upper:
        if (dj > kDualBailTol) {
          if (!std::isfinite(lo_[j])) return false;
          flips.push_back(j);
        }
        break;
      case VarState::at_zero:
        if (std::abs(dj) > kDualBailTol) return false;
        break;
      default: break;
    }
  }
  if (flips.empty()) return true;
  for (Index j : flips) {
    state_[j] = state_[j] == VarState::at_lower ? VarState::at_upper : VarState::at_lower;
    x_[j] = state_[j] == VarState::at_lower ? lo_[j] : up_[j];
  }
  compute_basic_values();
  return true;
}

Simplex::Outcome Simplex::primal(Clock::time_point deadline) {
  const Index total = n_ + m_;
  Eigen::VectorXd cb(m_), y, d, alpha;
  int degenerate = 0;
  bool bland = false;
  int stalls = 0;
  for (std::int64_t loop = 0;; ++loop) {
    if (etas_.size() >= kRefactorEvery) {
      if (!refactor()) return Outcome::refactor_failed;
      compute_basic_values();
    }
    if (iterations_ >= iteration_cap_) return Outcome::limit;
    if (loop % kClockEvery == 0 && Clock::now() > deadline) return Outcome::limit;

    bool phase1 = false;
    for (Index r = 0; r < m_; ++r) {
      if (basic_infeasibility(head_[r]) > 0.0) {
        phase1 = true;
        break;
      }
    }
    for (Index r = 0; r < m_; ++r) {
      const Index j = head_[r];
      if (phase1) {
        cb[r] = x_[j] < lo_[j] - kPrimalTol ? -1.0 : (x_[j] > up_[j] + kPrimalTol ? 1.0 : 0.0);
      } else {
        cb[r] = cost_[j];
      }
    }
    y = cb;
    btran(y);

    Index q = -1;
    int dir = 0;
    double best = 0.0;
    for (Index j = 0; j < total; ++j) {
      const VarState s = state_[j];
      if (s == VarState::basic || lo_[j] == up_[j]) continue;
      const double dj = (phase1 ? 0.0 : cost_[j]) - column_dot(j, y);
      int jdir = 0;
      if ((s == VarState::at_lower || s == VarState::at_zero) && dj < -kDualTol) jdir = 1;
      else if ((s == VarState::at_upper || s == VarState::at_zero) && dj > kDualTol) jdir = -1;
      if (jdir == 0) continue;
      if (bland) {
        q = j;
        dir = jdir;
        break;
      }
      if (std::abs(dj) > best) {
        best = std::abs(dj);
        q = j;
        dir = jdir;
      }
    }
    if (q < 0) {
      if (!etas_.empty()) {
        if (!refactor()) return Outcome::refactor_failed;
        compute_basic_values();
        continue;
      }
      return phase1 ? Outcome::infeasible : Outcome::optimal;
    }

    load_column(q, alpha);
    ftran(alpha);

    // Harris pass 1: largest step respecting bounds relaxed by the tolerance.
    double tmax = kInfinity;
    for (Index r = 0; r < m_; ++r) {
      const double a = alpha[r];
      if (std::abs(a) < kPivotTol) continue;
      const double rate = -dir * a;
      const Index j = head_[r];
      const double xj = x_[j];
      double t;
      if (rate < 0) {
        if (xj < lo_[j] - kPrimalTol) continue;
        const double bd = xj > up_[j] + kPrimalTol ? up_[j] : lo_[j];
        if (!std::isfinite(bd)) continue;
        t = (xj - bd + kPrimalTol) / -rate;
      } else {
        if (xj > up_[j] + kPrimalTol) continue;
        const double bd = xj < lo_[j] - kPrimalTol ? lo_[j] : up_[j];
        if (!std::isfinite(bd)) continue;
        t = (bd - xj + kPrimalTol) / rate;
      }
      tmax = std::min(tmax, t);
    }
    const double t_flip = (std::isfinite(lo_[q]) && std::isfinite(up_[q])) ? up_[q] - lo_[q] : kInfinity;
    if (!std::isfinite(tmax) && !std::isfinite(t_flip)) {
      if (phase1) {
        // Numerically impossible in exact arithmetic; refresh and retry.
        if (++stalls > 3) return Outcome::infeasible;
        if (!refactor()) return Outcome::refactor_failed;
        compute_basic_values();
        continue;
      }
      return Outcome::unbounded;
    }
    if (t_flip <= tmax) {
      x_[q] += dir * t_flip;
      for (Index r = 0; r < m_; ++r) x_[head_[r]] -= dir * alpha[r] * t_flip;
      state_[q] = state_[q] == VarState::at_upper ? VarState::at_lower : VarState::at_upper;
      x_[q] = state_[q] == VarState::at_lower ? lo_[q] : up_[q];
      ++iterations_;
      degenerate = 0;
      bland = false;
      continue;
    }

    // Pass 2: among rows whose exact ratio fits in tmax, the largest pivot.
    Index leave = -1;
    double leave_bd = 0.0, leave_t = 0.0, leave_piv = 0.0;
    for (Index r = 0; r < m_; ++r) {
      const double a = alpha[r];
      if (std::abs(a) < kPivotTol) continue;
      const double rate = -dir * a;
      const Index j = head_[r];
      const double xj = x_[j];
      double bd, t;
      if (rate < 0) {
        if (xj < lo_[j] - kPrimalTol) continue;
        bd = xj > up_[j] + kPrimalTol ? up_[j] : lo_[j];
        if (!std::isfinite(bd)) continue;
        t = (xj - bd) / -rate;
      } else {
        if (xj > up_[j] + kPrimalTol) continue;
        bd = xj < lo_[j] - kPrimalTol ? lo_[j] : up_[j];
        if (!std::isfinite(bd)) continue;
        t = (bd - xj) / rate;
      }
      if (t > tmax) continue;
      bool take;
      if (leave < 0) {
        take = true;
      } else if (bland) {
        take = t < leave_t - kPrimalTol ||
               (t <= leave_t + kPrimalTol && head_[r] < head_[leave]);
      } else {
        take = std::abs(a) > leave_piv;
      }
      if (take) {
        leave = r;
        leave_bd = bd;
        leave_t = t;
        leave_piv = std::abs(a);
      }
    }
    if (leave < 0) {
      if (++stalls > 3) return phase1 ? Outcome::infeasible : Outcome::unbounded;
      if (!refactor()) return Outcome::refactor_failed;
      compute_basic_values();
      continue;
    }
    const double theta = std::max(0.0, leave_t);
    x_[q] += dir * theta;
    for (Index r = 0; r < m_; ++r) x_[head_[r]] -= dir * alpha[r] * theta;
    const Index p = head_[leave];
    x_[p] = leave_bd;
    state_[p] = (leave_bd == lo_[p]) ? VarState::at_lower : VarState::at_upper;
    pivot(leave, q, alpha);
    if (theta < 1e-12) {
      if (++degenerate > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
  }
}

Simplex::Outcome Simplex::dual(Clock::time_point deadline) {
  const Index total = n_ + m_;
  Eigen::VectorXd cb(m_), y, d, rho, alpha;
  // Pivot row entries rho . a_j of the nonbasic columns.
  Eigen::VectorXd row(total);
  bool stale = true;
  int degenerate = 0;
  bool bland = false;
  for (std::int64_t loop = 0;; ++loop) {
    if (etas_.size() >= kRefactorEvery) {
      if (!refactor()) return Outcome::refactor_failed;
      compute_basic_values();
      stale = true;
    }
    if (iterations_ >= iteration_cap_) return Outcome::limit;
    if (loop % kClockEvery == 0 && Clock::now() > deadline) return Outcome::limit;
    if (stale) {
      for (Index r = 0; r < m_; ++r) cb[r] = cost_[head_[r]];
      compute_duals(cb, y, d);
      if (!make_dual_feasible(d)) return Outcome::not_dual_feasible;
      stale = false;
    }

    Index r = -1;
    double worst = 0.0;
    for (Index i = 0; i < m_; ++i) {
      const double inf = basic_infeasibility(head_[i]);
      if (inf <= 0.0) continue;
      if (bland ? (r < 0 || head_[i] < head_[r]) : inf > worst) {
        worst = inf;
        r = i;
      }
    }
    if (r < 0) {
      if (!etas_.empty()) {
        if (!refactor()) return Outcome::refactor_failed;
        compute_basic_values();
        stale = true;
        continue;
      }
      return Outcome::optimal;
    }
    const Index p = head_[r];
    const bool to_lower = x_[p] < lo_[p];

    rho = Eigen::VectorXd::Unit(m_, r);
    btran(rho);

    double tmax = kInfinity;
    for (Index j = 0; j < total; ++j) {
      const VarState s = state_[j];
      if (s == VarState::basic) {
        row[j] = 0.0;
        continue;
      }
      row[j] = column_dot(j, rho);
      if (lo_[j] == up_[j]) continue;
      const double abar = to_lower ? -row[j] : row[j];
      if (std::abs(abar) < kPivotTol) continue;
      double t;
      if (s == VarState::at_lower) {
        if (abar <= 0) continue;
        t = (d[j] + kDualTol) / abar;
      } else if (s == VarState::at_upper) {
        if (abar >= 0) continue;
        t = (d[j] - kDualTol) / abar;
      } else {
        t = (std::abs(d[j]) + kDualTol) / std::abs(abar);
      }
      tmax = std::min(tmax, t);
    }
    if (!std::isfinite(tmax)) {
      if (!etas_.empty()) {
        if (!refactor()) return Outcome::refactor_failed;
        compute_basic_values();
        stale = true;
        continue;
      }
      return Outcome::infeasible;
    }
    Index q = -1;
    double best_piv = 0.0, q_t = kInfinity;
    for (Index j = 0; j < total; ++j) {
      const VarState s = state_[j];
      if (s == VarState::basic || lo_[j] == up_[j]) continue;
      const double abar = to_lower ? -row[j] : row[j];
      if (std::abs(abar) < kPivotTol) continue;
      double t;
      if (s == VarState::at_lower) {
        if (abar <= 0) continue;
        t = d[j] / abar;
      } else if (s == VarState::at_upper) {
        if (abar >= 0) continue;
        t = d[j] / abar;
      } else {
        t = std::abs(d[j]) / std::abs(abar);
      }
      if (t > tmax) continue;
      // Bland mode: smallest ratio, lowest index among ties.
      const bool take = bland ? (q < 0 || t < q_t - 1e-12) : std::abs(abar) > best_piv;
      if (take) {
        best_piv = std::abs(abar);
        q_t = t;
        q = j;
      }
    }
    if (q < 0) return Outcome::not_dual_feasible;
    if (q_t * worst < 1e-12) {
      if (++degenerate > kDegenerateBeforeBland) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }

    load_column(q, alpha);
    ftran(alpha);
    if (std::abs(alpha[r]) < kPivotTol) {
      if (etas_.empty()) return Outcome::not_dual_feasible;
      if (!refactor()) return Outcome::refactor_failed;
      compute_basic_values();
      stale = true;
      continue;
    }
    const double bound = to_lower ? lo_[p] : up_[p];
    const double dxq = (x_[p] - bound) / alpha[r];
    x_[q] += dxq;
    for (Index i = 0; i < m_; ++i) x_[head_[i]] -= alpha[i] * dxq;
    x_[p] = bound;
    state_[p] = to_lower ? VarState::at_lower : VarState::at_upper;

    const double theta = d[q] / row[q];
    for (Index j = 0; j < total; ++j)
      if (row[j] != 0.0) d[j] -= theta * row[j];
    d[q] = 0.0;
    d[p] = -theta;
    pivot(r, q, alpha);
  }
}

LpStatus Simplex::solve(Clock::time_point deadline, std::int64_t max_iterations) {
  iteration_cap_ = max_iterations;
  auto fresh_start = [&] {
    if (!refactor()) {
      reset_to_slack_basis();
      refactor();
    }
    compute_basic_values();
  };
  fresh_start();

  bool primal_infeasible = false;
  for (Index r = 0; r < m_ && !primal_infeasible; ++r)
    primal_infeasible = basic_infeasibility(head_[r]) > 0.0;

  if (primal_infeasible) {
    const Outcome o = dual(deadline);
    if (o == Outcome::infeasible) return LpStatus::infeasible;
    if (o == Outcome::limit) return LpStatus::limit;
    if (o == Outcome::refactor_failed) {
      reset_to_slack_basis();
      fresh_start();
    }
  }
  for (int attempt = 0; attempt < 2; ++attempt) {
    const Outcome o = primal(deadline);
    switch (o) {
      case Outcome::optimal: return LpStatus::optimal;
      case Outcome::infeasible: return LpStatus::infeasible;
      case Outcome::unbounded: return LpStatus::unbounded;
      case Outcome::limit: return LpStatus::limit;
      default:
        reset_to_slack_basis();
        fresh_start();
        break;
    }
  }
  return LpStatus::limit;
}

SolveResult solve_lp(const ModelSpec& spec, const SolveOptions& opts) {
  if (spec.num_integer() > 0) throw std::invalid_argument("solve_lp: spec has integrality flags");
  if (!(opts.time_limit > 0)) throw std::invalid_argument("solve_lp: time limit must be positive");
  Simplex simplex(LpData::from_spec(spec));
  const auto deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                           std::chrono::duration<double>(std::min(opts.time_limit, 1e7)));
  const std::int64_t cap = opts.iteration_limit >= 0 ? opts.iteration_limit
                                                     : std::numeric_limits<std::int64_t>::max();
  const LpStatus st = simplex.solve(deadline, cap);
  SolveResult res;
  res.iterations = simplex.iterations();
  switch (st) {
    case LpStatus::infeasible: res.status = Status::infeasible; return res;
    case LpStatus::unbounded: res.status = Status::unbounded; return res;
    case LpStatus::limit: res.status = Status::time_limit; return res;
    case LpStatus::optimal: break;
  }
  const double sign = spec.sense() == Sense::maximize ? -1.0 : 1.0;
  res.status = Status::optimal;
  const Eigen::VectorXd x = simplex.primal();
  res.values.assign(x.data(), x.data() + x.size());
  res.objective = sign * simplex.objective() + spec.objective_offset();
  res.best_bound = res.objective;
  const Eigen::VectorXd y = simplex.row_duals();
  const Eigen::VectorXd rc = simplex.reduced_costs();
  res.duals.resize(y.size());
  res.reduced_costs.resize(rc.size());
  for (Index i = 0; i < y.size(); ++i) res.duals[i] = sign * y[i];
  for (Index j = 0; j < rc.size(); ++j) res.reduced_costs[j] = sign * rc[j];
  return res;
}

}  // namespace pcab::lp
