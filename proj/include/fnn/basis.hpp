#pragma once

#include "fnn/core.hpp"

#include <span>
#include <string_view>

namespace fnn {

enum class BasisKind { fourier, bspline };

std::string_view to_string(BasisKind kind);
BasisKind parse_basis_kind(std::string_view name);

/// A family of basis functions on a closed interval. Used both to smooth
/// observed curves and to expand functional weights.
///
/// Fourier systems always hold an odd number of functions: the constant
/// followed by sine/cosine pairs of increasing frequency. B-spline systems
/// use equally spaced interior knots with endpoint multiplicity equal to the
/// order.
class BasisSystem {
 public:
  static constexpr int kDefaultOrder = 4;

  /// Even counts are rounded up to the next odd count; a notice is appended
  /// to `warnings` when one is supplied.
  static BasisSystem fourier(int num_basis, Domain domain,
                             Warnings* warnings = nullptr);
  static BasisSystem bspline(int num_basis, Domain domain,
                             int order = kDefaultOrder);
  static BasisSystem make(BasisKind kind, int num_basis, Domain domain,
                          int order = kDefaultOrder,
                          Warnings* warnings = nullptr);

  BasisKind kind() const { return kind_; }
  int num_basis() const { return num_basis_; }
  const Domain& domain() const { return domain_; }
  /// Polynomial order for B-splines; 0 for Fourier systems.
  int order() const { return order_; }
  /// Full knot sequence (length num_basis + order); empty for Fourier.
  const std::vector<double>& knots() const { return knots_; }

  bool operator==(const BasisSystem& other) const;

 private:
  BasisSystem(BasisKind kind, int num_basis, Domain domain, int order);

  BasisKind kind_;
  int num_basis_;
  Domain domain_;
  int order_;
  std::vector<double> knots_;
};

/// Discretized curves: N observations sampled on one shared grid.
struct RawCurves {
  std::vector<double> argvals;  // p strictly increasing points
  Matrix values;                // N x p

  std::size_t num_points() const { return argvals.size(); }
  Eigen::Index num_obs() const { return values.rows(); }

  /// Checks shape, monotonicity and finiteness; throws ValidationError.
  void validate() const;
  /// Additionally checks that every argval lies in `domain`.
  void validate(const Domain& domain) const;
};

/// Basis-coefficient form of K functional covariates over N observations.
struct FunctionalDataSet {
  struct Covariate {
    BasisSystem basis;
    Matrix coefs;  // num_basis x N
  };

  std::vector<Covariate> covariates;

  std::size_t num_covariates() const { return covariates.size(); }
  Eigen::Index n_obs() const;
  void validate() const;
  /// Restricts every covariate to the given observation columns.
  FunctionalDataSet select(std::span<const Eigen::Index> obs) const;
};

/// Row q, column m holds phi_m(t_q).
Matrix basis_eval(const BasisSystem& system, std::span<const double> t);
/// Row q, column m holds d phi_m / dt at t_q.
Matrix basis_derivative(const BasisSystem& system, std::span<const double> t);

/// Ordinary least-squares fit of each observation onto the basis.
/// Returns a num_basis x N coefficient matrix.
Matrix smooth_curves(const RawCurves& raw, const BasisSystem& system);

/// Fourier system used when raw curves are smoothed without user input:
/// min(31, largest odd count <= number of sample points).
BasisSystem default_smoothing_basis(std::size_t num_points, Domain domain);

/// Evaluates x_k(t) for observation n.
Vector curve_eval(const FunctionalDataSet& fd, std::size_t k, Eigen::Index n,
                  std::span<const double> t);

/// n evenly spaced points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace fnn
