#include "pcab/datagen.hpp"

#include <random>
#include <stdexcept>

namespace pcab {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

PointsXd random_box(std::mt19937_64& rng, long count, int d, double lo, double hi) {
  PointsXd pts(count, d);
  for (long i = 0; i < count; ++i)
    for (int j = 0; j < d; ++j) pts(i, j) = uniform(rng, lo, hi);
  return pts;
}

/// Uniform in [-1,2]^d minus the closed unit cube, by rejection.
PointsXd random_shell(std::mt19937_64& rng, long count, int d) {
  PointsXd pts(count, d);
  Eigen::RowVectorXd p(d);
  for (long i = 0; i < count;) {
    for (int j = 0; j < d; ++j) p[j] = uniform(rng, -1.0, 2.0);
    if ((p.array() >= 0.0).all() && (p.array() <= 1.0).all()) continue;
    pts.row(i++) = p;
  }
  return pts;
}

PointsXd stack(const PointsXd& a, const PointsXd& b) {
  PointsXd out(a.rows() + b.rows(), a.cols());
  if (a.rows() > 0) out.topRows(a.rows()) = a;
  if (b.rows() > 0) out.bottomRows(b.rows()) = b;
  return out;
}

}  // namespace

GenConfig GenConfig::table_default(Family family, int d, std::uint64_t seed) {
  GenConfig c;
  c.family = family;
  c.d = d;
  c.gamma = family == Family::d1 ? 0.04 : 0.0;
  c.seed = seed;
  return c;
}

long GenConfig::resolved_random_positives() const {
  if (random_positives >= 0) return random_positives;
  switch (d) {
    case 2: return 141;
    case 4: return 200;
    case 8: return 282;
    default: throw std::invalid_argument("no default random-positive count for this dimension");
  }
}

long GenConfig::resolved_random_negatives() const {
  if (random_negatives >= 0) return random_negatives;
  switch (d) {
    case 2: return 200;
    case 4: return 500;
    case 8: return 8000;
    default: throw std::invalid_argument("no default random-negative count for this dimension");
  }
}

void GenConfig::validate() const {
  if (d < 1 || d > 20) throw std::invalid_argument("dimension must be in 1..20");
  if (!(gamma >= 0 && gamma < 0.5)) throw std::invalid_argument("gamma must be in [0, 0.5)");
  if (family == Family::d1 && !(gamma > 0)) throw std::invalid_argument("D1 needs a positive gamma");
  resolved_random_positives();
  resolved_random_negatives();
}

void corner_points(int d, double gamma, PointsXd& positives, PointsXd& negatives) {
  const long vertices = 1L << d;
  positives.resize(vertices, d);
  negatives.resize(vertices * d, d);
  for (long v = 0; v < vertices; ++v) {
    Eigen::RowVectorXd outer(d);
    for (int j = 0; j < d; ++j) {
      const bool one = (v >> j) & 1;
      positives(v, j) = one ? 1.0 - gamma : gamma;
      outer[j] = one ? 1.0 + gamma : -gamma;
    }
    for (int j = 0; j < d; ++j) {
      Eigen::RowVectorXd q = outer;
      const bool one = (v >> j) & 1;
      q[j] = one ? 1.0 - 2.0 * gamma : 2.0 * gamma;
      negatives.row(v * d + j) = q;
    }
  }
}

Dataset generate_d1(const GenConfig& cfg) {
  if (cfg.family != Family::d1) throw std::invalid_argument("generate_d1 needs a D1 config");
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  PointsXd cp, cn;
  corner_points(cfg.d, cfg.gamma, cp, cn);
  const PointsXd rp = random_box(rng, cfg.resolved_random_positives(), cfg.d, cfg.gamma, 1.0 - cfg.gamma);
  const PointsXd rn = random_shell(rng, cfg.resolved_random_negatives(), cfg.d);
  return Dataset(stack(cp, rp), stack(cn, rn));
}

Dataset generate_d2(const GenConfig& cfg) {
  if (cfg.family != Family::d2) throw std::invalid_argument("generate_d2 needs a D2 config");
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  PointsXd rp = random_box(rng, cfg.resolved_random_positives(), cfg.d, 0.0, 1.0);
  PointsXd rn = random_shell(rng, cfg.resolved_random_negatives(), cfg.d);
  return Dataset(std::move(rp), std::move(rn));
}

Dataset generate(const GenConfig& cfg) {
  return cfg.family == Family::d1 ? generate_d1(cfg) : generate_d2(cfg);
}

std::vector<Hyperplane> facet_certificate(int d, double gamma) {
  std::vector<Hyperplane> hs;
  for (int j = 0; j < d; ++j) {
    Eigen::VectorXd e = Eigen::VectorXd::Unit(d, j);
    hs.push_back({-gamma / 2.0, e});
    hs.push_back({1.0 - gamma / 2.0, -e});
  }
  return hs;
}

nlohmann::json manifest(const GenConfig& cfg, const Dataset& ds) {
  return {{"family", cfg.family == Family::d1 ? "D1" : "D2"},
          {"d", cfg.d},
          {"gamma", cfg.family == Family::d1 ? cfg.gamma : 0.0},
          {"seed", cfg.seed},
          {"random_positives", cfg.resolved_random_positives()},
          {"random_negatives", cfg.resolved_random_negatives()},
          {"positives", ds.num_positives()},
          {"negatives", ds.num_negatives()}};
}

}  // namespace pcab
