#include "fnn/synth.hpp"

#include <random>

namespace fnn {

namespace {

constexpr int kCurveBasis = 11;
constexpr std::size_t kOracleNodes = 10001;

// Leading coefficients drive the response; the tail adds shape only.
double coefficient_sd(int m) { return m < 7 ? 1.0 : 0.5; }

Vector default_beta() {
  Vector b(7);
  b << 0.6, 1.0, -0.8, 0.5, 0.7, -0.4, 0.3;
  return b;
}

struct Curves {
  BasisSystem basis;
  Matrix coefs;  // kCurveBasis x N
};

Curves random_curves(const SynthOptions& o, std::mt19937_64& rng) {
  if (o.n < 2) throw ValidationError("synthetic data needs at least 2 observations");
  if (o.points < static_cast<std::size_t>(kCurveBasis)) {
    throw ValidationError("synthetic curves need at least 11 sample points");
  }
  Curves c{BasisSystem::fourier(kCurveBasis, o.domain), Matrix(kCurveBasis, o.n)};
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Eigen::Index i = 0; i < o.n; ++i) {
    for (int m = 0; m < kCurveBasis; ++m) c.coefs(m, i) = coefficient_sd(m) * normal(rng);
  }
  return c;
}

// Brute-force int beta*(t) x_n(t) dt on a dense trapezoid grid.
Vector integrate_signal(const Curves& c, const BasisSystem& beta_basis, const Vector& beta) {
  const auto grid = linspace(c.basis.domain().lo, c.basis.domain().hi, kOracleNodes);
  const Vector beta_t = basis_eval(beta_basis, grid) * beta;
  const Matrix x_t = basis_eval(c.basis, grid) * c.coefs;  // nodes x N
  Vector out(c.coefs.cols());
  for (Eigen::Index i = 0; i < c.coefs.cols(); ++i) {
    out[i] = trapezoid(beta_t.cwiseProduct(x_t.col(i)), c.basis.domain());
  }
  return out;
}

SynthData assemble(const SynthOptions& o, const Curves& c) {
  SynthData s;
  s.beta_basis = BasisSystem::fourier(7, o.domain);
  s.beta_coefs = default_beta();
  RawCurves raw;
  raw.argvals = linspace(o.domain.lo, o.domain.hi, o.points);
  raw.values = (basis_eval(c.basis, raw.argvals) * c.coefs).transpose();
  s.data.func_cov = std::vector<RawCurves>{std::move(raw)};
  s.tensor.covariates.push_back({c.basis, c.coefs});
  s.signal = integrate_signal(c, s.beta_basis, s.beta_coefs);
  return s;
}

}  // namespace

double trapezoid(const Vector& values, Domain domain) {
  const Eigen::Index n = values.size();
  if (n < 2) throw ValidationError("trapezoid rule needs at least 2 nodes");
  const double h = domain.length() / static_cast<double>(n - 1);
  return h * (values.sum() - 0.5 * (values[0] + values[n - 1]));
}

SynthData synth_regression(const SynthOptions& o) {
  std::mt19937_64 rng(o.seed);
  const Curves c = random_curves(o, rng);
  SynthData s = assemble(o, c);
  std::normal_distribution<double> noise(0.0, o.noise_sd);
  Vector y = s.signal;
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] += noise(rng);
  s.data.resp = Response::scalar(y);
  s.mode = ResponseMode::regression;
  return s;
}

SynthData synth_classification(const SynthOptions& o) {
  std::mt19937_64 rng(o.seed);
  Curves c = random_curves(o, rng);
  const Vector beta = default_beta();
  const Vector direction = beta / beta.norm();
  std::bernoulli_distribution coin(0.5);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix z(o.n, 1);
  for (Eigen::Index i = 0; i < o.n; ++i) {
    const double shift = coin(rng) ? 2.5 : -2.5;
    c.coefs.col(i).head(7) += shift * direction;
    z(i, 0) = normal(rng);
  }
  SynthData s = assemble(o, c);
  std::vector<std::string> labels;
  for (Eigen::Index i = 0; i < o.n; ++i) {
    labels.push_back(s.signal[i] + 0.5 * z(i, 0) > 0.0 ? "1" : "0");
  }
  s.data.scalar_cov = std::move(z);
  s.data.resp = Response::classes(std::move(labels));
  s.mode = ResponseMode::classification;
  return s;
}

SynthData synth_functional(const SynthOptions& o) {
  std::mt19937_64 rng(o.seed);
  const Curves c = random_curves(o, rng);
  SynthData s = assemble(o, c);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix map(7, kCurveBasis);
  for (Eigen::Index i = 0; i < map.rows(); ++i) {
    for (Eigen::Index j = 0; j < map.cols(); ++j) map(i, j) = 0.3 * normal(rng);
  }
  Matrix y = c.coefs.topRows(7).transpose() * map;
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) y(i, j) += o.noise_sd * normal(rng);
  }
  s.data.resp = Response::functional(std::move(y));
  s.mode = ResponseMode::functional;
  return s;
}

}  // namespace fnn
