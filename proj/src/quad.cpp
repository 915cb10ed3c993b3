#include "fnn/quad.hpp"

#include <cmath>

namespace fnn {

QuadratureRule::QuadratureRule(Domain domain, int num_points)
    : domain_(make_domain(domain.lo, domain.hi)) {
  if (num_points < 3 || num_points % 2 == 0) {
    throw ValidationError("Simpson rule needs an odd number of points >= 3, got " +
                          std::to_string(num_points));
  }
  nodes_ = linspace(domain_.lo, domain_.hi, static_cast<std::size_t>(num_points));
  const double h = domain_.length() / (num_points - 1);
  weights_.resize(num_points);
  for (int q = 0; q < num_points; ++q) {
    double w = (q == 0 || q == num_points - 1) ? 1.0 : (q % 2 == 1 ? 4.0 : 2.0);
    weights_[q] = w * h / 3.0;
  }
}

double simpson(const QuadratureRule& rule, std::span<const double> values) {
  if (static_cast<int>(values.size()) != rule.num_points()) {
    throw ValidationError("Simpson rule has " + std::to_string(rule.num_points()) +
                          " nodes but received " + std::to_string(values.size()) +
                          " values");
  }
  double sum = 0.0;
  for (std::size_t q = 0; q < values.size(); ++q) {
    sum += rule.weights()[static_cast<Eigen::Index>(q)] * values[q];
  }
  return sum;
}

DesignMatrix integral_features(const FunctionalDataSet& fd,
                               const std::vector<BasisSystem>& weight_bases,
                               const std::optional<Matrix>& scalars,
                               int rule_points, const ProgressFn& progress) {
  fd.validate();
  const std::size_t num_cov = fd.num_covariates();
  if (weight_bases.size() != num_cov) {
    throw ValidationError("expected " + std::to_string(num_cov) +
                          " weight bases, got " +
                          std::to_string(weight_bases.size()));
  }
  const Eigen::Index n = fd.n_obs();
  if (scalars) {
    if (scalars->rows() != n) {
      throw ValidationError("scalar covariates have " +
                            std::to_string(scalars->rows()) +
                            " rows, expected " + std::to_string(n));
    }
    if (!scalars->allFinite()) {
      throw ValidationError("scalar covariates contain non-finite entries");
    }
  }

  Eigen::Index width = scalars ? scalars->cols() : 0;
  for (const auto& wb : weight_bases) width += wb.num_basis();

  DesignMatrix dm;
  dm.features.resize(n, width);
  dm.column_map.reserve(static_cast<std::size_t>(width));

  Eigen::Index col = 0;
  for (std::size_t k = 0; k < num_cov; ++k) {
    const auto& cov = fd.covariates[k];
    const auto& wb = weight_bases[k];
    if (!(wb.domain() == cov.basis.domain())) {
      throw DomainError("weight basis domain for covariate " +
                        std::to_string(k + 1) +
                        " does not match the covariate's domain");
    }
    emit(progress, {ProgressEvent::Kind::integrals, static_cast<int>(k + 1),
                    static_cast<int>(num_cov), 0.0});
    const QuadratureRule rule(cov.basis.domain(), rule_points);
    const Matrix curves = basis_eval(cov.basis, rule.nodes()) * cov.coefs;  // Q x N
    const Matrix weighted =
        rule.weights().asDiagonal() * basis_eval(wb, rule.nodes());  // Q x Mw
    dm.features.middleCols(col, wb.num_basis()) = curves.transpose() * weighted;
    for (int m = 0; m < wb.num_basis(); ++m) {
      dm.column_map.push_back(
          {ColumnSource::Kind::functional, static_cast<int>(k), m});
    }
    col += wb.num_basis();
    emit(progress, {ProgressEvent::Kind::integrals, static_cast<int>(k + 1),
                    static_cast<int>(num_cov), 1.0});
  }
  if (scalars) {
    dm.features.rightCols(scalars->cols()) = *scalars;
    for (Eigen::Index j = 0; j < scalars->cols(); ++j) {
      dm.column_map.push_back(
          {ColumnSource::Kind::scalar, 0, static_cast<int>(j)});
    }
  }
  dm.standardization = fit_standardization(dm.features);
  return dm;
}

Standardization fit_standardization(const Matrix& rows) {
  const Eigen::Index n = rows.rows();
  Standardization s;
  s.mean = Vector::Zero(rows.cols());
  s.scale = Vector::Ones(rows.cols());
  if (n == 0) return s;
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double mean = rows.col(j).mean();
    double sd = 0.0;
    if (n > 1) {
      sd = std::sqrt((rows.col(j).array() - mean).square().sum() /
                     static_cast<double>(n - 1));
    }
    // Degenerate columns pass through untouched.
    if (sd <= 1e-12 * std::max(1.0, std::abs(mean))) continue;
    s.mean[j] = mean;
    s.scale[j] = sd;
  }
  return s;
}

Matrix standardize(const Standardization& stats, const Matrix& rows) {
  if (rows.cols() != stats.mean.size()) {
    throw ValidationError("expected " + std::to_string(stats.mean.size()) +
                          " feature columns, got " + std::to_string(rows.cols()));
  }
  return (rows.rowwise() - stats.mean.transpose()).array().rowwise() /
         stats.scale.transpose().array();
}

Matrix standardize(const DesignMatrix& dm, const Matrix& rows) {
  return standardize(dm.standardization, rows);
}

Matrix unstandardize(const Standardization& stats, const Matrix& rows) {
  if (rows.cols() != stats.mean.size()) {
    throw ValidationError("expected " + std::to_string(stats.mean.size()) +
                          " feature columns, got " + std::to_string(rows.cols()));
  }
  Matrix out = rows.array().rowwise() * stats.scale.transpose().array();
  out.rowwise() += stats.mean.transpose();
  return out;
}

}  // namespace fnn
