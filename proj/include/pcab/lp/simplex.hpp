#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "pcab/lp/model_spec.hpp"

namespace pcab::lp {

using Clock = std::chrono::steady_clock;

/// Column-major computational form `row_lower <= A x <= row_upper`,
/// `col_lower <= x <= col_upper`, minimize `cost . x`.
struct LpData {
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd cost;
  Eigen::VectorXd col_lower, col_upper;
  Eigen::VectorXd row_lower, row_upper;

  /// Maximization specs are negated so the data is always in min form.
  static LpData from_spec(const ModelSpec& spec);
  Index rows() const { return static_cast<Index>(matrix.rows()); }
  Index cols() const { return static_cast<Index>(matrix.cols()); }
};

enum class VarState : std::uint8_t { basic, at_lower, at_upper, at_zero };

enum class LpStatus { optimal, infeasible, unbounded, limit };

/// Bounded revised simplex over `[A | -I]` with one logical per row.
///
/// The basis is held as a sparse LU of the last refactorization plus a
/// product-form eta file. Primal iterations use a composite phase 1 (sum of
/// infeasibilities) and a Harris ratio test; the dual simplex is used when
/// the current basis is dual feasible, which is the case after bound
/// changes in branch and bound. Dantzig pricing falls back to Bland's rule
/// after a run of degenerate pivots.
class Simplex {
 public:
  explicit Simplex(LpData data);

  Index rows() const { return m_; }
  Index cols() const { return n_; }

  void set_column_bounds(Index j, double lower, double upper);
  double column_lower(Index j) const { return lo_[j]; }
  double column_upper(Index j) const { return up_[j]; }

  /// Runs from the current basis. `deadline` bounds wall-clock time and
  /// `max_iterations` the value of iterations() at which to stop.
  LpStatus solve(Clock::time_point deadline,
                 std::int64_t max_iterations = std::numeric_limits<std::int64_t>::max());

  /// Structural primal values.
  Eigen::VectorXd primal() const { return x_.head(n_); }
  double value(Index j) const { return x_[j]; }
  /// Min-form objective `cost . x`.
  double objective() const;
  /// Row duals in min form: d objective / d row bound.
  Eigen::VectorXd row_duals() const;
  Eigen::VectorXd reduced_costs() const;

  std::vector<VarState> basis() const { return state_; }
  /// Installs a basis snapshot; falls back to the slack basis when the
  /// snapshot does not have exactly `rows()` basic variables.
  void set_basis(const std::vector<VarState>& states);
  void reset_to_slack_basis();

  std::int64_t iterations() const { return iterations_; }

 private:
  struct Eta {
    Index row;
    double pivot_inv;
    std::vector<std::pair<Index, double>> entries;  // off-pivot entries
  };

  enum class Outcome { optimal, infeasible, unbounded, limit, not_dual_feasible, refactor_failed };

  bool refactor();
  void compute_basic_values();
  void place_nonbasic(Index j);
  void ftran(Eigen::VectorXd& v) const;
  void btran(Eigen::VectorXd& v) const;
  void load_column(Index j, Eigen::VectorXd& v) const;
  double column_dot(Index j, const Eigen::VectorXd& y) const;
  void compute_duals(const Eigen::VectorXd& basic_cost, Eigen::VectorXd& y,
                     Eigen::VectorXd& d) const;
  void pivot(Index r, Index q, const Eigen::VectorXd& alpha);
  double basic_infeasibility(Index j) const;
  bool make_dual_feasible(const Eigen::VectorXd& d);

  Outcome primal(Clock::time_point deadline);
  Outcome dual(Clock::time_point deadline);

  LpData data_;
  Index m_ = 0;
  Index n_ = 0;
  Eigen::VectorXd lo_, up_, cost_, x_;
  std::vector<VarState> state_;
  std::vector<Index> head_;
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  std::vector<Eta> etas_;
  std::int64_t iterations_ = 0;
  std::int64_t iteration_cap_ = std::numeric_limits<std::int64_t>::max();
};

/// Solves a continuous spec. Throws std::invalid_argument when the spec
/// carries integrality flags or is malformed.
SolveResult solve_lp(const ModelSpec& spec, const SolveOptions& opts = {});

}  // namespace pcab::lp
