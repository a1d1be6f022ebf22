#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace pcab {

/// Row-major point storage: one point per row.
template <typename Scalar>
using PointMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using PointsXd = PointMatrix<double>;

/// Default geometric tolerance applied to solver output.
inline constexpr double kGeomTol = 1e-6;

/// Affine function `b + w . a`.
template <typename Scalar>
struct BasicHyperplane {
  Scalar b{0};
  Vector<Scalar> w;

  Eigen::Index dim() const { return w.size(); }

  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& a) const {
    return b + w.dot(a.derived());
  }

  /// Values on every row of `points`.
  template <typename Derived>
  Vector<Scalar> values(const Eigen::MatrixBase<Derived>& points) const {
    return (points * w).array() + b;
  }

  bool degenerate() const { return (w.array() == Scalar(0)).all(); }
};

using Hyperplane = BasicHyperplane<double>;

/// Immutable labeled point cloud. Row order of each block defines the point
/// indices and never changes; copies share the underlying storage.
template <typename Scalar>
class BasicDataset {
 public:
  using Points = PointMatrix<Scalar>;

  BasicDataset() = default;

  /// Throws std::invalid_argument when the blocks are empty, have different
  /// widths, or contain non-finite coordinates.
  BasicDataset(Points positives, Points negatives) {
    if (positives.rows() < 1 || negatives.rows() < 1)
      throw std::invalid_argument("dataset needs at least one positive and one negative point");
    if (positives.cols() < 1 || positives.cols() != negatives.cols())
      throw std::invalid_argument("dataset blocks have mismatched dimensions");
    if (!positives.allFinite() || !negatives.allFinite())
      throw std::invalid_argument("dataset has non-finite coordinates");
    data_ = std::make_shared<const Blocks>(Blocks{std::move(positives), std::move(negatives)});
  }

  Eigen::Index dim() const { return data_ ? data_->pos.cols() : 0; }
  Eigen::Index num_positives() const { return data_ ? data_->pos.rows() : 0; }
  Eigen::Index num_negatives() const { return data_ ? data_->neg.rows() : 0; }

  const Points& positives() const { return data_->pos; }
  const Points& negatives() const { return data_->neg; }
  auto positive(Eigen::Index i) const { return data_->pos.row(i); }
  auto negative(Eigen::Index i) const { return data_->neg.row(i); }

 private:
  struct Blocks {
    Points pos;
    Points neg;
  };
  std::shared_ptr<const Blocks> data_;
};

using Dataset = BasicDataset<double>;

/// Weight of a point; the default is the constant 1.
class WeightFunction {
 public:
  using Rule = std::function<double(const Eigen::Ref<const Eigen::VectorXd>&)>;

  WeightFunction() = default;
  explicit WeightFunction(Rule rule) : rule_(std::move(rule)) {}
  static WeightFunction constant(double c);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& a) const {
    return rule_ ? rule_(a) : 1.0;
  }
  bool is_unit() const { return !rule_; }

  /// Weights of all negatives of `ds`, in index order.
  Eigen::VectorXd negative_weights(const Dataset& ds) const;
  /// Weights of the positives followed by the negatives.
  Eigen::VectorXd all_weights(const Dataset& ds) const;

 private:
  Rule rule_;
};

/// One improvement event: (elapsed seconds, error).
using TracePoint = std::pair<double, std::int64_t>;

struct PcabSolution {
  std::vector<Hyperplane> hyperplanes;
  std::int64_t error = 0;
  std::vector<TracePoint> trace;
};

template <typename Scalar>
void check_dimension(const BasicHyperplane<Scalar>& h, const BasicDataset<Scalar>& ds) {
  if (h.dim() != ds.dim()) throw std::invalid_argument("hyperplane and dataset dimensions differ");
}

/// True iff `b + w . a >= -tol` on every positive point.
template <typename Scalar>
bool is_valid(const BasicHyperplane<Scalar>& h, const BasicDataset<Scalar>& ds,
              Scalar tol = Scalar(kGeomTol)) {
  if (tol < Scalar(0)) throw std::invalid_argument("is_valid: negative tolerance");
  check_dimension(h, ds);
  return (h.values(ds.positives()).array() >= -tol).all();
}

/// Negatives lying on the nonnegative side (within `tol`) of every hyperplane.
template <typename Scalar>
std::vector<bool> enclosed_negatives(const BasicDataset<Scalar>& ds,
                                     const std::vector<BasicHyperplane<Scalar>>& hs,
                                     Scalar tol = Scalar(kGeomTol)) {
  Eigen::Array<bool, Eigen::Dynamic, 1> inside =
      Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(ds.num_negatives(), true);
  for (const auto& h : hs) {
    check_dimension(h, ds);
    inside = inside && (h.values(ds.negatives()).array() >= -tol);
  }
  return std::vector<bool>(inside.data(), inside.data() + inside.size());
}

/// err(s): number of negatives enclosed by all hyperplanes. An empty list
/// encloses every negative.
template <typename Scalar>
std::int64_t separation_error(const BasicDataset<Scalar>& ds,
                              const std::vector<BasicHyperplane<Scalar>>& hs,
                              Scalar tol = Scalar(kGeomTol)) {
  const auto inside = enclosed_negatives(ds, hs, tol);
  return static_cast<std::int64_t>(std::count(inside.begin(), inside.end(), true));
}

/// Moves `h` so that `min_i b' + w . a_i = 1` over the positives.
template <typename Scalar>
BasicHyperplane<Scalar> shift_to_positives(const BasicHyperplane<Scalar>& h,
                                           const BasicDataset<Scalar>& ds) {
  if (ds.num_positives() == 0) return h;
  check_dimension(h, ds);
  return {Scalar(1) - (ds.positives() * h.w).minCoeff(), h.w};
}

/// Rescales a valid hyperplane to the margin form used by the models:
/// positives at `>= 1` and every negative it strictly cuts (value below
/// `-tol`) at `<= -1`. Empty when no negative is cut.
std::optional<Hyperplane> to_margin_form(const Hyperplane& h, const Dataset& ds,
                                         double tol = kGeomTol);

/// Builds a solution from solver hyperplanes. Throws std::invalid_argument
/// on a zero normal or a hyperplane invalid beyond `tol`.
PcabSolution make_solution(const Dataset& ds, std::vector<Hyperplane> hs,
                           std::vector<TracePoint> trace = {}, double tol = kGeomTol);

}  // namespace pcab
