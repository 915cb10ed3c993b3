#include "fnn/basis.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace fnn {

namespace {

std::string format_point(double t) {
  std::ostringstream os;
  os.precision(17);
  os << t;
  return os.str();
}

void check_points(const BasisSystem& system, std::span<const double> t) {
  for (double v : t) {
    if (!std::isfinite(v) || !contains(system.domain(), v)) {
      throw DomainError("evaluation point " + format_point(v) +
                        " lies outside the basis domain [" +
                        format_point(system.domain().lo) + ", " +
                        format_point(system.domain().hi) + "]");
    }
  }
}

double clamp_to(const Domain& d, double t) {
  return std::min(std::max(t, d.lo), d.hi);
}

// Index i with knots[i] <= t < knots[i+1], restricted to the valid spans
// [order-1, num_basis-1]; t == hi maps to the last span.
int find_span(const std::vector<double>& knots, int order, int num_basis,
              double t) {
  int lo = order - 1;
  int hi = num_basis - 1;
  if (t >= knots[hi + 1]) return hi;
  if (t <= knots[lo]) return lo;
  while (hi - lo > 1) {
    int mid = (lo + hi) / 2;
    if (t < knots[mid]) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return (t >= knots[hi]) ? hi : lo;
}

// Cox-de Boor in triangular form: values of the `degree + 1` B-splines of
// the given degree that are nonzero on `span`, for bases span-degree..span.
void nonzero_bsplines(const std::vector<double>& knots, int span, int degree,
                      double t, std::vector<double>& out) {
  out.assign(degree + 1, 0.0);
  std::vector<double> left(degree + 1), right(degree + 1);
  out[0] = 1.0;
  for (int j = 1; j <= degree; ++j) {
    left[j] = t - knots[span + 1 - j];
    right[j] = knots[span + j] - t;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      double denom = right[r + 1] + left[j - r];
      double temp = denom != 0.0 ? out[r] / denom : 0.0;
      out[r] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    out[j] = saved;
  }
}

Matrix fourier_eval(const BasisSystem& s, std::span<const double> t,
                    bool derivative) {
  const int m_total = s.num_basis();
  const double period = s.domain().length();
  const double c0 = 1.0 / std::sqrt(period);
  const double c1 = std::sqrt(2.0 / period);
  Matrix out(static_cast<Eigen::Index>(t.size()), m_total);
  for (std::size_t q = 0; q < t.size(); ++q) {
    const auto row = static_cast<Eigen::Index>(q);
    const double shifted = t[q] - s.domain().lo;
    out(row, 0) = derivative ? 0.0 : c0;
    for (int m = 1; 2 * m - 1 < m_total; ++m) {
      const double omega = 2.0 * std::numbers::pi * m / period;
      const double sn = std::sin(omega * shifted);
      const double cs = std::cos(omega * shifted);
      if (derivative) {
        out(row, 2 * m - 1) = c1 * omega * cs;
        out(row, 2 * m) = -c1 * omega * sn;
      } else {
        out(row, 2 * m - 1) = c1 * sn;
        out(row, 2 * m) = c1 * cs;
      }
    }
  }
  return out;
}

Matrix bspline_eval(const BasisSystem& s, std::span<const double> t) {
  const int order = s.order();
  const int degree = order - 1;
  const auto& knots = s.knots();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(t.size()), s.num_basis());
  std::vector<double> vals;
  for (std::size_t q = 0; q < t.size(); ++q) {
    const double x = clamp_to(s.domain(), t[q]);
    const int span = find_span(knots, order, s.num_basis(), x);
    nonzero_bsplines(knots, span, degree, x, vals);
    for (int r = 0; r <= degree; ++r) {
      out(static_cast<Eigen::Index>(q), span - degree + r) = vals[r];
    }
  }
  return out;
}

Matrix bspline_derivative(const BasisSystem& s, std::span<const double> t) {
  const int order = s.order();
  const int degree = order - 1;
  const auto& knots = s.knots();
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(t.size()), s.num_basis());
  std::vector<double> lower;
  for (std::size_t q = 0; q < t.size(); ++q) {
    const double x = clamp_to(s.domain(), t[q]);
    const int span = find_span(knots, order, s.num_basis(), x);
    // Degree-1 values on the same span cover bases span-degree+1..span.
    nonzero_bsplines(knots, span, degree - 1, x, lower);
    for (int r = 0; r <= degree; ++r) {
      const int j = span - degree + r;
      double d = 0.0;
      if (r >= 1) {
        const double denom = knots[j + degree] - knots[j];
        if (denom > 0.0) d += lower[r - 1] / denom;
      }
      if (r <= degree - 1) {
        const double denom = knots[j + degree + 1] - knots[j + 1];
        if (denom > 0.0) d -= lower[r] / denom;
      }
      out(static_cast<Eigen::Index>(q), j) = degree * d;
    }
  }
  return out;
}

}  // namespace

std::string_view to_string(BasisKind kind) {
  return kind == BasisKind::fourier ? "fourier" : "bspline";
}

BasisKind parse_basis_kind(std::string_view name) {
  if (name == "fourier") return BasisKind::fourier;
  if (name == "bspline") return BasisKind::bspline;
  throw ValidationError("unknown basis kind '" + std::string(name) +
                        "' (expected fourier or bspline)");
}

BasisSystem::BasisSystem(BasisKind kind, int num_basis, Domain domain,
                         int order)
    : kind_(kind), num_basis_(num_basis), domain_(domain), order_(order) {
  if (kind_ == BasisKind::bspline) {
    const int interior = num_basis_ - order_;
    knots_.reserve(num_basis_ + order_);
    for (int i = 0; i < order_; ++i) knots_.push_back(domain_.lo);
    for (int i = 1; i <= interior; ++i) {
      knots_.push_back(domain_.lo + domain_.length() * i / (interior + 1));
    }
    for (int i = 0; i < order_; ++i) knots_.push_back(domain_.hi);
  }
}

BasisSystem BasisSystem::fourier(int num_basis, Domain domain,
                                 Warnings* warnings) {
  domain = make_domain(domain.lo, domain.hi);
  if (num_basis < 1) {
    throw ValidationError("fourier basis needs at least one function, got " +
                          std::to_string(num_basis));
  }
  if (num_basis % 2 == 0) {
    if (warnings) {
      warnings->push_back("fourier basis size " + std::to_string(num_basis) +
                          " is even; using " + std::to_string(num_basis + 1));
    }
    ++num_basis;
  }
  return BasisSystem(BasisKind::fourier, num_basis, domain, 0);
}

BasisSystem BasisSystem::bspline(int num_basis, Domain domain, int order) {
  domain = make_domain(domain.lo, domain.hi);
  if (order < 1) {
    throw ValidationError("bspline order must be positive, got " +
                          std::to_string(order));
  }
  if (num_basis < order) {
    throw ValidationError("bspline basis size " + std::to_string(num_basis) +
                          " is smaller than its order " +
                          std::to_string(order));
  }
  return BasisSystem(BasisKind::bspline, num_basis, domain, order);
}

BasisSystem BasisSystem::make(BasisKind kind, int num_basis, Domain domain,
                              int order, Warnings* warnings) {
  return kind == BasisKind::fourier ? fourier(num_basis, domain, warnings)
                                    : bspline(num_basis, domain, order);
}

bool BasisSystem::operator==(const BasisSystem& other) const {
  return kind_ == other.kind_ && num_basis_ == other.num_basis_ &&
         domain_ == other.domain_ && order_ == other.order_;
}

void RawCurves::validate() const {
  if (argvals.size() < 2) {
    throw ValidationError("raw curves need at least 2 sample points, got " +
                          std::to_string(argvals.size()));
  }
  if (static_cast<std::size_t>(values.cols()) != argvals.size()) {
    throw ValidationError("raw curves have " + std::to_string(values.cols()) +
                          " value columns but " +
                          std::to_string(argvals.size()) + " argvals");
  }
  if (values.rows() == 0) throw ValidationError("no observations");
  for (std::size_t i = 0; i < argvals.size(); ++i) {
    if (!std::isfinite(argvals[i])) {
      throw ValidationError("argval " + std::to_string(i + 1) +
                            " is not finite");
    }
    if (i > 0 && !(argvals[i] > argvals[i - 1])) {
      throw ValidationError("argvals must be strictly increasing (position " +
                            std::to_string(i + 1) + ")");
    }
  }
  if (!values.allFinite()) {
    throw ValidationError("raw curves contain missing or non-finite values");
  }
}

void RawCurves::validate(const Domain& domain) const {
  validate();
  for (double t : argvals) {
    if (!contains(domain, t)) {
      throw DomainError("argval " + format_point(t) + " lies outside [" +
                        format_point(domain.lo) + ", " +
                        format_point(domain.hi) + "]");
    }
  }
}

Eigen::Index FunctionalDataSet::n_obs() const {
  return covariates.empty() ? 0 : covariates.front().coefs.cols();
}

void FunctionalDataSet::validate() const {
  if (covariates.empty()) {
    throw ValidationError("functional data set has no covariates");
  }
  const Eigen::Index n = n_obs();
  for (std::size_t k = 0; k < covariates.size(); ++k) {
    const auto& c = covariates[k];
    if (c.coefs.rows() != c.basis.num_basis()) {
      throw ValidationError(
          "covariate " + std::to_string(k + 1) + " has " +
          std::to_string(c.coefs.rows()) + " coefficient rows but its basis has " +
          std::to_string(c.basis.num_basis()) + " functions");
    }
    if (c.coefs.cols() != n) {
      throw ValidationError("covariate " + std::to_string(k + 1) + " has " +
                            std::to_string(c.coefs.cols()) +
                            " observations, expected " + std::to_string(n));
    }
    if (!c.coefs.allFinite()) {
      throw ValidationError("covariate " + std::to_string(k + 1) +
                            " has non-finite coefficients");
    }
  }
}

FunctionalDataSet FunctionalDataSet::select(
    std::span<const Eigen::Index> obs) const {
  FunctionalDataSet out;
  for (const auto& c : covariates) {
    Matrix coefs(c.coefs.rows(), static_cast<Eigen::Index>(obs.size()));
    for (std::size_t j = 0; j < obs.size(); ++j) {
      coefs.col(static_cast<Eigen::Index>(j)) = c.coefs.col(obs[j]);
    }
    out.covariates.push_back({c.basis, std::move(coefs)});
  }
  return out;
}

Matrix basis_eval(const BasisSystem& system, std::span<const double> t) {
  check_points(system, t);
  return system.kind() == BasisKind::fourier ? fourier_eval(system, t, false)
                                             : bspline_eval(system, t);
}

Matrix basis_derivative(const BasisSystem& system, std::span<const double> t) {
  check_points(system, t);
  if (system.kind() == BasisKind::fourier) return fourier_eval(system, t, true);
  if (system.order() < 2) {
    throw ValidationError("bspline derivative needs order >= 2");
  }
  return bspline_derivative(system, t);
}

Matrix smooth_curves(const RawCurves& raw, const BasisSystem& system) {
  raw.validate(system.domain());
  const auto p = static_cast<Eigen::Index>(raw.num_points());
  const Eigen::Index m = system.num_basis();
  if (p < m) {
    throw ValidationError("under-determined smoothing: " + std::to_string(p) +
                          " sample points for " + std::to_string(m) +
                          " basis functions; use fewer basis terms");
  }
  const Matrix phi = basis_eval(system, raw.argvals);
  Eigen::ColPivHouseholderQR<Matrix> qr(phi);
  if (qr.rank() < m) {
    throw NumericalError("smoothing design has numerical rank " +
                         std::to_string(qr.rank()) + " < " + std::to_string(m) +
                         " basis functions");
  }
  return qr.solve(raw.values.transpose());
}

BasisSystem default_smoothing_basis(std::size_t num_points, Domain domain) {
  int m = static_cast<int>(std::min<std::size_t>(31, num_points));
  if (m % 2 == 0) --m;
  return BasisSystem::fourier(std::max(m, 1), domain);
}

Vector curve_eval(const FunctionalDataSet& fd, std::size_t k, Eigen::Index n,
                  std::span<const double> t) {
  if (k >= fd.num_covariates()) {
    throw ValidationError("covariate index " + std::to_string(k) +
                          " out of range (K = " +
                          std::to_string(fd.num_covariates()) + ")");
  }
  const auto& c = fd.covariates[k];
  if (n < 0 || n >= c.coefs.cols()) {
    throw ValidationError("observation index " + std::to_string(n) +
                          " out of range (N = " + std::to_string(c.coefs.cols()) +
                          ")");
  }
  return basis_eval(c.basis, t) * c.coefs.col(n);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  if (n > 0) out.back() = hi;
  return out;
}

}  // namespace fnn
