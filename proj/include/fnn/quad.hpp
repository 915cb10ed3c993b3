#pragma once

#include "fnn/basis.hpp"
#include "fnn/progress.hpp"

#include <optional>

namespace fnn {

/// Composite Simpson rule on an odd number of equally spaced nodes.
class QuadratureRule {
 public:
  static constexpr int kDefaultPoints = 101;

  QuadratureRule(Domain domain, int num_points = kDefaultPoints);

  int num_points() const { return static_cast<int>(nodes_.size()); }
  const Domain& domain() const { return domain_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const Vector& weights() const { return weights_; }

 private:
  Domain domain_;
  std::vector<double> nodes_;
  Vector weights_;
};

double simpson(const QuadratureRule& rule, std::span<const double> values);

/// Where a design-matrix column came from.
struct ColumnSource {
  enum class Kind { functional, scalar };
  Kind kind = Kind::functional;
  int covariate = 0;  // functional: covariate k
  int index = 0;      // functional: weight-basis function m; scalar: j

  bool operator==(const ColumnSource&) const = default;
};

/// Per-column z-scoring statistics.
struct Standardization {
  Vector mean;
  Vector scale;  // strictly positive; zero-variance columns get 1
};

/// N x D network input: integral features for every (covariate, weight-basis
/// function) pair followed by the raw scalar covariates.
struct DesignMatrix {
  Matrix features;
  std::vector<ColumnSource> column_map;
  Standardization standardization;

  Eigen::Index num_columns() const { return features.cols(); }
};

/// Builds the integral features int phi^w_km(t) x_kn(t) dt with Simpson's
/// rule on `rule_points` nodes per covariate, appends `scalars` unchanged and
/// records standardization statistics of the resulting rows.
///
/// A progress event is emitted per covariate.
DesignMatrix integral_features(const FunctionalDataSet& fd,
                               const std::vector<BasisSystem>& weight_bases,
                               const std::optional<Matrix>& scalars,
                               int rule_points = QuadratureRule::kDefaultPoints,
                               const ProgressFn& progress = {});

/// Mean / standard deviation per column (sample sd, n-1 denominator).
Standardization fit_standardization(const Matrix& rows);

Matrix standardize(const DesignMatrix& dm, const Matrix& rows);
Matrix standardize(const Standardization& stats, const Matrix& rows);
Matrix unstandardize(const Standardization& stats, const Matrix& rows);

}  // namespace fnn
