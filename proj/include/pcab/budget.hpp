#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>

#include "pcab/lp/model_spec.hpp"

namespace pcab {

/// Limit shared by a sequence of solves. Normally wall-clock seconds; in
/// deterministic mode the same figure is converted to simplex pivots so an
/// interrupted run repeats exactly.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  /// Pivots granted per second of time limit in deterministic mode.
  static constexpr double kPivotsPerSecond = 10000.0;

  explicit Budget(double seconds, bool deterministic = false)
      : seconds_(seconds), deterministic_(deterministic), start_(Clock::now()) {
    if (deterministic_) pivots_ = static_cast<std::int64_t>(seconds * kPivotsPerSecond);
  }

  /// Pivot budget when `opts.iteration_limit` is set, else its time limit.
  static Budget from_options(const lp::SolveOptions& opts) {
    Budget b(opts.time_limit, opts.iteration_limit >= 0);
    if (b.deterministic_) b.pivots_ = opts.iteration_limit;
    return b;
  }

  /// Pivot count matching `seconds` in deterministic mode.
  static std::int64_t pivots_for(double seconds) {
    return static_cast<std::int64_t>(seconds * kPivotsPerSecond);
  }

  bool deterministic() const { return deterministic_; }
  double elapsed() const { return std::chrono::duration<double>(Clock::now() - start_).count(); }

  /// Fraction of the budget left, in [0, 1].
  double left_fraction() const {
    if (deterministic_) return pivots_ > 0 ? std::max(0.0, 1.0 - double(used_) / double(pivots_)) : 0.0;
    return seconds_ > 0 ? std::max(0.0, 1.0 - elapsed() / seconds_) : 0.0;
  }
  bool exhausted() const { return left_fraction() <= 0.0; }

  /// Options for the next solve, granted `share` of what is left but at
  /// least `min_seconds` (capped by what is left).
  lp::SolveOptions next(lp::SolveOptions base = {}, double share = 1.0, double min_seconds = 0.0) const {
    if (deterministic_) {
      const double left = double(std::max<std::int64_t>(0, pivots_ - used_));
      const double grant = std::min(left, std::max(share * left, min_seconds * kPivotsPerSecond));
      base.time_limit = 1e9;
      base.iteration_limit = std::max<std::int64_t>(1, static_cast<std::int64_t>(grant));
    } else {
      const double left = std::max(1e-3, seconds_ - elapsed());
      base.time_limit = std::min(left, std::max(share * left, min_seconds));
    }
    return base;
  }

  /// Records the pivots spent by a finished solve.
  void charge(const lp::SolveResult& r) { used_ += r.iterations; }
  void charge(std::int64_t pivots) { used_ += pivots; }
  std::int64_t used() const { return used_; }

 private:
  double seconds_;
  bool deterministic_;
  Clock::time_point start_;
  std::int64_t pivots_ = 0;
  std::int64_t used_ = 0;
};

}  // namespace pcab
