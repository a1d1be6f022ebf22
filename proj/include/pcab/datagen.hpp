#pragma once

#include <cstdint>
#include <vector>

#include <json.hpp>

#include "pcab/core.hpp"

namespace pcab {

enum class Family { d1, d2 };

struct GenConfig {
  Family family = Family::d1;
  int d = 2;
  /// Border gap; D2 always uses 0.
  double gamma = 0.04;
  /// Random point counts; negative selects the table default for d.
  long random_positives = -1;
  long random_negatives = -1;
  std::uint64_t seed = 0;

  /// Random counts for d in {2, 4, 8}: (141, 200), (200, 500), (282, 8000).
  static GenConfig table_default(Family family, int d, std::uint64_t seed = 0);
  void validate() const;
  long resolved_random_positives() const;
  long resolved_random_negatives() const;
};

/// Corner points for every vertex of [0,1]^d: one positive and d negatives.
/// Rows are ordered by vertex (bit j of the vertex index is coordinate j).
void corner_points(int d, double gamma, PointsXd& positives, PointsXd& negatives);

/// Corner points plus random positives in [gamma, 1-gamma]^d and random
/// negatives in [-1,2]^d outside [0,1]^d. Corner rows come first.
Dataset generate_d1(const GenConfig& cfg);
/// Random points only: positives in [0,1]^d, negatives as in D1.
Dataset generate_d2(const GenConfig& cfg);
Dataset generate(const GenConfig& cfg);

/// The 2d hyperplanes x_j >= gamma/2 and x_j <= 1 - gamma/2.
std::vector<Hyperplane> facet_certificate(int d, double gamma);

nlohmann::json manifest(const GenConfig& cfg, const Dataset& ds);

}  // namespace pcab
