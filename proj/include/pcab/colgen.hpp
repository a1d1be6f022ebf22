#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "pcab/core.hpp"
#include "pcab/models.hpp"

namespace pcab {

enum class Pricer { exact_root_node, ahp };

struct ColgenConfig {
  Pricer pricer = Pricer::ahp;
  double time_limit = 60.0;
  /// Simplex pivot budget replacing the time limit when nonnegative.
  std::int64_t iteration_limit = -1;
  /// HPLS point threshold; 0 selects the dimension d.
  int thr = 0;
  int nmax = 8;
  std::uint64_t seed = 0;
  bool warm_start = false;
  /// Share of the remaining budget given to each HCM solve, and its floor.
  double hcm_share = 0.1;
  double hcm_min_seconds = 0.5;

  void validate() const;
};

/// One row of the events CSV.
struct ColgenEvent {
  int iter = 0;
  double elapsed_s = 0.0;
  double rmm_obj = 0.0;
  double min_reduced_cost = 0.0;
  std::int64_t hcm_error = 0;
  std::size_t columns_total = 0;
};

struct ColgenTelemetry {
  int iterations = 0;
  std::size_t columns = 0;
  /// Objective minus bound of the last exact pricing solve; NaN for AHP.
  double last_pricing_gap = 0.0;
  double pricing_seconds = 0.0;
  double master_seconds = 0.0;
  double hcm_seconds = 0.0;
  /// False when the budget ran out before the first HCM solve.
  bool hcm_solved = false;
  std::string stop_reason;
  std::vector<ColgenEvent> events;
};

/// Every column any pricer returned, with the duals it was priced against.
struct PricingRecord {
  Column column;
  int iter = 0;
  bool pooled = false;
};

struct ColgenResult {
  PcabSolution solution;
  ColgenTelemetry telemetry;
  ColumnPool pool;
  std::vector<DualPrices> duals;  // per iteration
  std::vector<PricingRecord> priced;
};

/// Initial pool: empty, or the greedy hyperplanes as columns when
/// `cfg.warm_start` is set.
ColumnPool initialize_master(const Dataset& ds, const BudgetParams& p, const ColgenConfig& cfg);

/// Column generation with hyperplane choice. Each iteration solves the
/// restricted master, prices with the exact pricing MILP (root node only)
/// or AHP, pools the columns with negative reduced cost and re-solves the
/// hyperplane choice MILP. Stops when no column prices out, the choice
/// error reaches 0, or the budget is spent.
ColgenResult run_colgen(const Dataset& ds, const BudgetParams& p, const ColgenConfig& cfg);

/// `iter,elapsed_s,rmm_obj,min_reduced_cost,hcm_error,columns_total`
void write_events_csv(std::ostream& out, const std::vector<ColgenEvent>& events);

}  // namespace pcab
