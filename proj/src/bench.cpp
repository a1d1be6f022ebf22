#include "pcab/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "pcab/budget.hpp"
#include "pcab/greedy.hpp"
#include "pcab/lp/branch_and_bound.hpp"

namespace pcab {

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct MethodName {
  Method method;
  const char* name;
};

constexpr MethodName kNames[] = {
    {Method::model_a, "model-a"},         {Method::model_b, "model-b"},
    {Method::ov2007, "ov2007"},           {Method::colgen_exact, "colgen-exact"},
    {Method::colgen_ahp, "colgen-ahp"},   {Method::greedy, "greedy"},
    {Method::hull_greedy_2d, "hull-greedy-2d"},
};

struct Screened {
  std::vector<Hyperplane> kept;
  bool usable = true;
};

/// Drops zero-normal hyperplanes that keep every point (b >= 0). The run is
/// unusable if nothing else remains or some hyperplane cuts a positive.
Screened screen(const Dataset& ds, const std::vector<Hyperplane>& hs) {
  Screened s;
  bool any_real = false;
  for (const auto& h : hs) {
    if (h.degenerate()) {
      if (h.b < -kGeomTol) s.usable = false;
      continue;
    }
    any_real = true;
    if (!is_valid(h, ds)) {
      s.usable = false;
      continue;
    }
    s.kept.push_back(h);
  }
  if (!hs.empty() && !any_real) s.usable = false;
  return s;
}

struct CompactRun {
  PcabSolution solution;
  bool usable = true;
};

CompactRun run_compact(const Dataset& ds, const BudgetParams& p, const RunConfig& rc, double limit,
                       Clock::time_point t0) {
  ModelKind kind = ModelKind::model_b;
  lp::ModelSpec spec;
  switch (rc.method) {
    case Method::model_a:
      kind = ModelKind::model_a;
      spec = build_model_a(ds, p);
      break;
    case Method::model_b:
      spec = build_model_b(ds, p);
      break;
    default:
      kind = ModelKind::ov2007;
      spec = build_ov2007(ds, p);
      break;
  }
  lp::SolveOptions opts;
  opts.root_node_only = rc.root_node_only;
  opts.seed = rc.seed;
  if (rc.deterministic)
    opts.iteration_limit = Budget::pivots_for(limit);
  else
    opts.time_limit = std::max(1e-3, limit - since(t0));

  const auto decode = [&](const std::vector<double>& values) {
    lp::SolveResult r;
    r.status = lp::Status::feasible_incumbent;
    r.values = values;
    return screen(ds, extract_hyperplanes(r, spec, kind, p.K, ds.dim()));
  };

  std::vector<TracePoint> trace;
  const auto on_incumbent = [&](double, const std::vector<double>& values) {
    const auto s = decode(values);
    if (!s.usable) return;
    const std::int64_t err = separation_error(ds, s.kept);
    if (trace.empty() || err < trace.back().second) trace.emplace_back(since(t0), err);
  };
  const auto res = lp::solve_milp(spec, opts, on_incumbent);

  CompactRun out;
  Screened s;
  if (res.has_solution()) s = decode(res.values);
  out.usable = s.usable;
  out.solution = make_solution(ds, std::move(s.kept), std::move(trace));
  return out;
}

}  // namespace

const char* to_string(Method m) {
  for (const auto& e : kNames)
    if (e.method == m) return e.name;
  return "?";
}

Method parse_method(const std::string& name) {
  for (const auto& e : kNames)
    if (name == e.name) return e.method;
  throw std::invalid_argument("unknown method '" + name + "'");
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods = [] {
    std::vector<Method> v;
    for (const auto& e : kNames) v.push_back(e.method);
    return v;
  }();
  return methods;
}

double default_time_limit(int d, bool massive) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  const double e = std::log2(static_cast<double>(d)) - (massive ? 1.0 : 0.0);
  return 6.0 * std::pow(10.0, e);
}

std::string RunReport::row() const {
  std::ostringstream s;
  s << method << ',' << K << ',' << d << ',' << std::fixed << std::setprecision(3) << seconds << ',';
  if (error_pct)
    s << std::setprecision(2) << *error_pct;
  else
    s << "NA";
  s << ',' << std::setprecision(3) << te_seconds;
  return s.str();
}

RunOutcome run_method(const Dataset& ds, const BudgetParams& p, const RunConfig& rc) {
  p.validate();
  if (rc.K < 1) throw std::invalid_argument("K must be at least 1");
  if (rc.method == Method::hull_greedy_2d && ds.dim() != 2)
    throw std::invalid_argument("hull-greedy-2d needs d = 2");
  const int d = static_cast<int>(ds.dim());
  const double limit = rc.time_limit > 0 ? rc.time_limit : default_time_limit(d, rc.massive);

  BudgetParams params = p;
  params.K = rc.K;
  const auto t0 = Clock::now();
  RunOutcome out;
  bool usable = true;

  switch (rc.method) {
    case Method::model_a:
    case Method::model_b:
    case Method::ov2007: {
      auto r = run_compact(ds, params, rc, limit, t0);
      out.solution = std::move(r.solution);
      usable = r.usable;
      break;
    }
    case Method::colgen_exact:
    case Method::colgen_ahp: {
      ColgenConfig cfg;
      cfg.pricer = rc.method == Method::colgen_ahp ? Pricer::ahp : Pricer::exact_root_node;
      cfg.time_limit = limit;
      if (rc.deterministic) cfg.iteration_limit = Budget::pivots_for(limit);
      cfg.thr = rc.thr;
      cfg.nmax = rc.nmax;
      cfg.seed = rc.seed;
      cfg.warm_start = rc.warm_start;
      auto r = run_colgen(ds, params, cfg);
      out.solution = std::move(r.solution);
      out.telemetry = std::move(r.telemetry);
      break;
    }
    case Method::greedy: {
      lp::SolveOptions opts;
      opts.seed = rc.seed;
      if (rc.deterministic)
        opts.iteration_limit = Budget::pivots_for(limit);
      else
        opts.time_limit = limit;
      out.solution = run_greedy(ds, params, opts);
      break;
    }
    case Method::hull_greedy_2d:
      out.solution = hull_greedy_2d(ds, rc.K);
      break;
  }

  auto& rep = out.report;
  rep.method = to_string(rc.method);
  rep.K = rc.K;
  rep.d = d;
  rep.seconds = since(t0);
  if (usable) rep.error_pct = 100.0 * double(out.solution.error) / double(ds.num_negatives());
  rep.te_seconds = out.solution.trace.empty() ? 0.0 : std::min(out.solution.trace.back().first, rep.seconds);
  return out;
}

std::vector<RunReport> aggregate_reports(const std::vector<RunReport>& rows) {
  struct Acc {
    RunReport first;
    double seconds = 0, te = 0, err = 0;
    int count = 0, err_count = 0;
  };
  std::vector<Acc> accs;
  std::map<std::tuple<std::string, int, int>, std::size_t> index;
  for (const auto& r : rows) {
    const auto key = std::make_tuple(r.method, r.K, r.d);
    auto [it, fresh] = index.try_emplace(key, accs.size());
    if (fresh) accs.push_back({r});
    auto& a = accs[it->second];
    a.seconds += r.seconds;
    a.te += r.te_seconds;
    ++a.count;
    if (r.error_pct) {
      a.err += *r.error_pct;
      ++a.err_count;
    }
  }
  std::vector<RunReport> out;
  for (const auto& a : accs) {
    RunReport r = a.first;
    r.seconds = a.seconds / a.count;
    r.te_seconds = a.te / a.count;
    r.error_pct.reset();
    if (a.err_count > 0) r.error_pct = a.err / a.err_count;
    out.push_back(std::move(r));
  }
  return out;
}

VolumeEstimate mc_volume(const std::vector<Hyperplane>& hs, int d, std::int64_t samples,
                         std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("dimension must be positive");
  if (samples < 1000) throw std::invalid_argument("mc_volume needs at least 1000 samples");
  for (const auto& h : hs)
    if (h.dim() != d) throw std::invalid_argument("hyperplane dimension differs from d");
  const double box = std::pow(3.0, d);
  if (hs.empty()) return {box, 0.0};

  std::mt19937_64 rng(seed);
  Eigen::VectorXd x(d);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    for (int j = 0; j < d; ++j) x[j] = -1.0 + 3.0 * (double(rng() >> 11) * 0x1.0p-53);
    bool inside = true;
    for (const auto& h : hs)
      if (h(x) < 0.0) {
        inside = false;
        break;
      }
    hits += inside;
  }
  const double f = double(hits) / double(samples);
  return {box * f, box * std::sqrt(f * (1.0 - f) / double(samples))};
}

std::vector<Eigen::Vector2d> convex_hull_2d(const PointsXd& pts) {
  if (pts.cols() != 2) throw std::invalid_argument("convex_hull_2d needs 2-D points");
  std::vector<Eigen::Vector2d> p;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) p.emplace_back(pts(i, 0), pts(i, 1));
  std::sort(p.begin(), p.end(), [](const auto& a, const auto& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  p.erase(std::unique(p.begin(), p.end()), p.end());
  if (p.size() < 3) return p;

  const auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> h(2 * p.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  for (std::size_t i = p.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(h[k - 2], h[k - 1], p[i]) <= 0) --k;
    h[k++] = p[i];
  }
  h.resize(k - 1);
  return h;
}

PcabSolution hull_greedy_2d(const Dataset& ds, int K) {
  if (ds.dim() != 2) throw std::invalid_argument("hull_greedy_2d needs d = 2");
  if (K < 1) throw std::invalid_argument("K must be at least 1");
  const auto hull = convex_hull_2d(ds.positives());
  if (hull.size() < 3) throw std::invalid_argument("degenerate hull: fewer than 3 non-collinear positives");

  // Edge p -> q of a counter-clockwise hull keeps the interior on its left.
  std::vector<Hyperplane> edges;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Eigen::Vector2d& p = hull[i];
    const Eigen::Vector2d& q = hull[(i + 1) % hull.size()];
    Eigen::Vector2d w(-(q.y() - p.y()), q.x() - p.x());
    w.normalize();
    edges.push_back({-w.dot(p), w});
  }

  const auto t0 = Clock::now();
  const Eigen::Index n = ds.num_negatives();
  std::vector<bool> alive(static_cast<std::size_t>(n), true);
  std::vector<Hyperplane> chosen;
  std::vector<TracePoint> trace;
  std::int64_t err = n;
  for (int round = 0; round < K; ++round) {
    std::size_t best = 0;
    std::int64_t best_gain = 0;
    for (std::size_t e = 0; e < edges.size(); ++e) {
      const Eigen::VectorXd v = edges[e].values(ds.negatives());
      std::int64_t gain = 0;
      for (Eigen::Index i = 0; i < n; ++i) gain += alive[static_cast<std::size_t>(i)] && v[i] < -kGeomTol;
      if (gain > best_gain) {
        best_gain = gain;
        best = e;
      }
    }
    if (best_gain == 0) break;
    const Eigen::VectorXd v = edges[best].values(ds.negatives());
    for (Eigen::Index i = 0; i < n; ++i)
      if (v[i] < -kGeomTol) alive[static_cast<std::size_t>(i)] = false;
    chosen.push_back(edges[best]);
    err -= best_gain;
    trace.emplace_back(since(t0), err);
  }
  return make_solution(ds, std::move(chosen), std::move(trace));
}

}  // namespace pcab
