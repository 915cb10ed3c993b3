#include "fnn/core.hpp"

#include <cmath>

namespace fnn {

Domain make_domain(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo)) {
    throw ValidationError("invalid domain [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "]: need lo < hi");
  }
  return Domain{lo, hi};
}

bool contains(const Domain& d, double t) {
  return t >= d.lo - kEndpointTolerance && t <= d.hi + kEndpointTolerance;
}

ParseError::ParseError(const std::string& path, std::size_t line,
                       std::size_t column, const std::string& what)
    : ValidationError(path + ":" + std::to_string(line) + ":" +
                      std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

}  // namespace fnn
