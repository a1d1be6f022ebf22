#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pcab/colgen.hpp"
#include "pcab/core.hpp"
#include "pcab/models.hpp"

namespace pcab {

enum class Method { model_a, model_b, ov2007, colgen_exact, colgen_ahp, greedy, hull_greedy_2d };

const char* to_string(Method m);
/// Throws std::invalid_argument on an unknown name.
Method parse_method(const std::string& name);
const std::vector<Method>& all_methods();

/// 6 * 10^(log2 d) seconds, or a tenth of that for massive runs.
double default_time_limit(int d, bool massive = false);

struct RunConfig {
  Method method = Method::colgen_ahp;
  int K = 1;
  /// Nonpositive selects default_time_limit(d, massive).
  double time_limit = 0.0;
  bool massive = false;
  std::uint64_t seed = 0;
  int thr = 0;
  int nmax = 8;
  /// Stop compact-model solves after the root node.
  bool root_node_only = false;
  bool warm_start = false;
  /// Pivot budgets instead of wall clock.
  bool deterministic = false;
};

struct RunReport {
  std::string method;
  int K = 0;
  int d = 0;
  double seconds = 0.0;
  /// Empty for output that carries no usable hyperplane (OV2007 w = 0).
  std::optional<double> error_pct;
  double te_seconds = 0.0;

  static const char* header() { return "method,K,d,seconds,error_pct,te_seconds"; }
  std::string row() const;
};

struct RunOutcome {
  PcabSolution solution;
  RunReport report;
  std::optional<ColgenTelemetry> telemetry;
};

/// Throws std::invalid_argument for hull-greedy-2d on d != 2.
RunOutcome run_method(const Dataset& ds, const BudgetParams& p, const RunConfig& rc);

/// Means per (method, K, d) over the rows given, in first-seen order.
std::vector<RunReport> aggregate_reports(const std::vector<RunReport>& rows);

struct VolumeEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Monte-Carlo volume of the solution polyhedron clipped to [-1,2]^d.
VolumeEstimate mc_volume(const std::vector<Hyperplane>& hs, int d, std::int64_t samples,
                         std::uint64_t seed);

/// Counter-clockwise hull of 2-D points without collinear vertices.
std::vector<Eigen::Vector2d> convex_hull_2d(const PointsXd& pts);

/// Facets of the positive hull chosen greedily by newly cut negatives.
/// Throws std::invalid_argument when d != 2 or the hull is degenerate.
PcabSolution hull_greedy_2d(const Dataset& ds, int K);

}  // namespace pcab
