#include "pcab/colgen.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "pcab/ahp.hpp"
#include "pcab/budget.hpp"
#include "pcab/greedy.hpp"
#include "pcab/io.hpp"
#include "pcab/lp/branch_and_bound.hpp"
#include "pcab/lp/simplex.hpp"

namespace pcab {

namespace {

constexpr double kReducedCostTol = 1e-9;
constexpr double kWarmStartShare = 0.1;

std::uint64_t iteration_seed(std::uint64_t seed, int iter) {
  return seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(iter + 1));
}

class Stopwatch {
 public:
  explicit Stopwatch(double& sink) : sink_(sink), t0_(Budget::Clock::now()) {}
  ~Stopwatch() { sink_ += std::chrono::duration<double>(Budget::Clock::now() - t0_).count(); }

 private:
  double& sink_;
  Budget::Clock::time_point t0_;
};

}  // namespace

void ColgenConfig::validate() const {
  if (!(time_limit > 0)) throw std::invalid_argument("colgen time limit must be positive");
  if (thr < 0) throw std::invalid_argument("thr must be positive");
  if (nmax < 1) throw std::invalid_argument("nmax must be positive");
  if (!(hcm_share > 0 && hcm_share <= 1)) throw std::invalid_argument("hcm share must be in (0, 1]");
}

ColumnPool initialize_master(const Dataset& ds, const BudgetParams& p, const ColgenConfig& cfg) {
  ColumnPool pool;
  if (!cfg.warm_start) return pool;
  lp::SolveOptions opts;
  opts.time_limit = cfg.time_limit * kWarmStartShare;
  if (cfg.iteration_limit >= 0)
    opts.iteration_limit = static_cast<std::int64_t>(double(cfg.iteration_limit) * kWarmStartShare);
  const auto greedy = run_greedy(ds, p, opts);
  for (const auto& h : greedy.hyperplanes) {
    const auto margin = to_margin_form(h, ds);
    if (!margin) continue;
    pool.push_back({margin_indicator(ds, *margin), *margin, 0.0});
  }
  return pool;
}

ColgenResult run_colgen(const Dataset& ds, const BudgetParams& p, const ColgenConfig& cfg) {
  p.validate();
  cfg.validate();
  lp::SolveOptions limits;
  limits.time_limit = cfg.time_limit;
  limits.iteration_limit = cfg.iteration_limit;
  Budget budget = Budget::from_options(limits);

  const Eigen::Index n = ds.num_negatives();
  const int thr = cfg.thr > 0 ? cfg.thr : static_cast<int>(ds.dim());
  ColgenResult out;
  auto& tel = out.telemetry;
  tel.last_pricing_gap = cfg.pricer == Pricer::ahp ? std::numeric_limits<double>::quiet_NaN() : 0.0;
  out.pool = initialize_master(ds, p, cfg);
  ColumnPool& pool = out.pool;

  Eigen::VectorXd x_prev = Eigen::VectorXd::Ones(n);
  std::int64_t E = std::numeric_limits<std::int64_t>::max();
  std::vector<Hyperplane> chosen;
  std::vector<double> hcm_values;  // z then e of the last HCM incumbent
  std::vector<TracePoint> trace;
  tel.stop_reason = "time-limit";

  for (int iter = 1;; ++iter) {
    if (budget.exhausted()) break;
    ColgenEvent ev;
    ev.iter = iter;

    lp::SolveResult rmm;
    const auto rmm_spec = build_rmm(pool, ds, p);
    {
      Stopwatch sw(tel.master_seconds);
      rmm = lp::solve_lp(rmm_spec, budget.next());
    }
    budget.charge(rmm);
    if (rmm.status != lp::Status::optimal) {
      if (rmm.status != lp::Status::time_limit) tel.stop_reason = "master-failed";
      break;
    }
    ev.rmm_obj = rmm.objective;
    const DualPrices duals = extract_duals(rmm, rmm_spec, n);
    out.duals.push_back(duals);

    std::vector<Column> cols;
    {
      Stopwatch sw(tel.pricing_seconds);
      if (cfg.pricer == Pricer::ahp) {
        cols = ahp(ds, duals, AhpState{x_prev}, thr, cfg.nmax, iteration_seed(cfg.seed, iter));
      } else {
        const auto spec = build_pricing(ds, duals, p);
        lp::SolveOptions so;
        so.root_node_only = true;
        so.dive_rounds = static_cast<int>(ds.dim()) + 2;
        const auto res = lp::solve_milp(spec, budget.next(so));
        budget.charge(res);
        if (res.has_solution()) {
          tel.last_pricing_gap = res.objective - res.best_bound;
          const Hyperplane h = extract_hyperplanes(res, spec, ModelKind::pricing, 1, ds.dim()).front();
          if (!h.degenerate()) {
            Column c{margin_indicator(ds, h), h, 0.0};
            c.reduced_cost = reduced_cost(c.indicator, duals);
            cols.push_back(std::move(c));
          }
        }
      }
    }
    tel.iterations = iter;
    if (cols.empty()) {
      tel.stop_reason = budget.exhausted() ? "time-limit" : "no-column";
      break;
    }

    std::size_t kmin = 0;
    for (std::size_t k = 1; k < cols.size(); ++k)
      if (cols[k].reduced_cost < cols[kmin].reduced_cost) kmin = k;
    x_prev = cols[kmin].indicator;
    ev.min_reduced_cost = cols[kmin].reduced_cost;

    std::size_t added = 0;
    for (auto& c : cols) {
      const bool pooled = c.reduced_cost < -kReducedCostTol;
      out.priced.push_back({c, iter, pooled});
      if (pooled) {
        pool.push_back(c);
        ++added;
      }
    }
    tel.columns += cols.size();
    ev.columns_total = pool.size();

    if (added > 0) {
      const auto hcm_spec = build_hcm(pool, ds, p);
      lp::SolveOptions so;
      std::vector<double> hint(pool.size() + static_cast<std::size_t>(n), 0.0);
      if (hcm_values.empty()) {
        std::fill(hint.begin() + static_cast<std::ptrdiff_t>(pool.size()), hint.end(), 1.0);
      } else {
        const std::size_t old = hcm_values.size() - static_cast<std::size_t>(n);
        std::copy(hcm_values.begin(), hcm_values.begin() + static_cast<std::ptrdiff_t>(old), hint.begin());
        std::copy(hcm_values.begin() + static_cast<std::ptrdiff_t>(old), hcm_values.end(),
                  hint.begin() + static_cast<std::ptrdiff_t>(pool.size()));
      }
      so.incumbent_hint = std::move(hint);
      lp::SolveResult res;
      {
        Stopwatch sw(tel.hcm_seconds);
        res = lp::solve_milp(hcm_spec, budget.next(so, cfg.hcm_share, cfg.hcm_min_seconds));
      }
      budget.charge(res);
      if (res.has_solution()) {
        const auto e = static_cast<std::int64_t>(std::llround(res.objective));
        if (!tel.hcm_solved || e < E) {
          E = e;
          hcm_values = res.values;
          chosen = extract_selected(res, hcm_spec, pool);
          const std::int64_t geom = separation_error(ds, chosen);
          if (trace.empty() || geom < trace.back().second) trace.emplace_back(budget.elapsed(), geom);
        }
        tel.hcm_solved = true;
      }
    }
    ev.hcm_error = tel.hcm_solved ? E : n;
    ev.elapsed_s = budget.elapsed();
    tel.events.push_back(ev);

    if (added == 0) {
      tel.stop_reason = "reduced-cost";
      break;
    }
    if (tel.hcm_solved && E == 0) {
      tel.stop_reason = "zero-error";
      break;
    }
  }

  out.solution = make_solution(ds, std::move(chosen), std::move(trace));
  return out;
}

void write_events_csv(std::ostream& out, const std::vector<ColgenEvent>& events) {
  out << "iter,elapsed_s,rmm_obj,min_reduced_cost,hcm_error,columns_total\n";
  for (const auto& e : events)
    out << e.iter << ',' << format_double(e.elapsed_s) << ',' << format_double(e.rmm_obj) << ','
        << format_double(e.min_reduced_cost) << ',' << e.hcm_error << ',' << e.columns_total << '\n';
}

}  // namespace pcab
