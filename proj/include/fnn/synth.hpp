#pragma once

#include "fnn/model.hpp"

#include <cstdint>

namespace fnn {

// Seeded synthetic scalar-on-function datasets with a known functional
// weight beta*(t) in the span of a 7-term Fourier basis. Covariate curves are
// random 11-term Fourier expansions sampled on an even grid.

struct SynthOptions {
  Eigen::Index n = 150;
  std::size_t points = 101;
  Domain domain{0.0, 1.0};
  double noise_sd = 0.05;
  std::uint64_t seed = 1;
};

struct SynthData {
  FnnData data;               // raw curves as functional covariate
  FunctionalDataSet tensor;   // the same curves in exact coefficient form
  BasisSystem beta_basis = BasisSystem::fourier(7, Domain{0.0, 1.0});
  Vector beta_coefs;
  Vector signal;              // int beta*(t) x_n(t) dt per observation
  ResponseMode mode = ResponseMode::regression;
};

/// y = int beta* x dt + N(0, noise_sd^2).
SynthData synth_regression(const SynthOptions& options);
/// Two classes "0"/"1" from thresholding int beta* x dt + 0.5 z at zero, with
/// one scalar covariate z; curves are shifted along beta* by class.
SynthData synth_classification(const SynthOptions& options);
/// Response: 11 Fourier coefficients linear in the curve's leading
/// coefficients plus noise.
SynthData synth_functional(const SynthOptions& options);

/// Composite trapezoid rule of f on `points` equally spaced nodes.
double trapezoid(const Vector& values, Domain domain);

}  // namespace fnn
