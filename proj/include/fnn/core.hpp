#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace fnn {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Closed interval [lo, hi] with lo < hi.
struct Domain {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool operator==(const Domain&) const = default;
};

Domain make_domain(double lo, double hi);

/// Tolerance used when checking that evaluation points lie inside a domain.
inline constexpr double kEndpointTolerance = 1e-12;

bool contains(const Domain& d, double t);

// Error hierarchy. ValidationError maps to CLI exit code 1,
// NumericalError to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class ParseError : public ValidationError {
 public:
  ParseError(const std::string& path, std::size_t line, std::size_t column,
             const std::string& what);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Non-fatal notices (parity rounding, list broadcasting) collected during a call.
using Warnings = std::vector<std::string>;

}  // namespace fnn
