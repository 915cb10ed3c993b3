#pragma once

#include "fnn/basis.hpp"
#include "fnn/net.hpp"
#include "fnn/quad.hpp"

#include <optional>
#include <string>
#include <variant>

namespace fnn {

enum class ResponseMode { regression, classification, functional };

std::string_view to_string(ResponseMode mode);
ResponseMode parse_response_mode(std::string_view name);

/// Basis used to expand one covariate's functional weight beta_k(t).
struct WeightBasisSpec {
  BasisKind kind = BasisKind::fourier;
  int num_basis = 7;
  int order = BasisSystem::kDefaultOrder;

  bool operator==(const WeightBasisSpec&) const = default;
};

struct FnnConfig {
  /// One entry per functional covariate; a single entry is repeated for all.
  std::vector<WeightBasisSpec> weight_bases{WeightBasisSpec{}};
  int hidden_layers = 2;
  /// Per-layer lists; a single entry is repeated for every hidden layer.
  std::vector<int> neurons{64, 64};
  std::vector<Activation> activations{Activation::relu, Activation::relu};
  /// Empty means no dropout.
  std::vector<double> dropout;
  ResponseMode response_mode = ResponseMode::regression;
  std::vector<Domain> domain_ranges;
  TrainConfig train;
  bool raw_data = false;
  int rule_points = QuadratureRule::kDefaultPoints;
};

/// Functional covariates either as sampled curves (one RawCurves per
/// covariate) or already in basis-coefficient form.
using FunctionalInput = std::variant<std::vector<RawCurves>, FunctionalDataSet>;

Eigen::Index n_obs(const FunctionalInput& input);
std::size_t num_covariates(const FunctionalInput& input);

struct Response {
  Matrix values;                    // regression N x 1, functional N x M_resp
  std::vector<std::string> labels;  // classification: one label per row

  static Response scalar(const Vector& y);
  static Response classes(std::vector<std::string> labels);
  static Response functional(Matrix coefs);

  Eigen::Index size() const;
};

struct FnnData {
  FunctionalInput func_cov;
  std::optional<Matrix> scalar_cov;
  Response resp;

  Eigen::Index n_obs() const { return fnn::n_obs(func_cov); }
  FnnData select(std::span<const Eigen::Index> rows) const;
};

struct ResponseMeta {
  std::vector<std::string> class_labels;  // classification, first-appearance order
  int num_outputs = 1;
};

/// A fitted functional neural network. Immutable after fnn_fit.
struct FnnModel {
  FnnConfig config;
  /// Raw-data mode: the basis each covariate was smoothed onto.
  std::vector<BasisSystem> smoothing_bases;
  std::vector<BasisSystem> weight_bases;
  std::vector<ColumnSource> column_map;
  Standardization standardization;
  Eigen::Index num_scalars = 0;
  Network params;
  TrainHistory history;
  ResponseMeta response;
  Warnings warnings;
  /// Smoothed covariates when raw curves were passed to fnn_fit.
  std::optional<FunctionalDataSet> smoothed_data;

  std::size_t num_covariates() const { return weight_bases.size(); }
};

struct Reporter {
  ProgressFn progress;
  std::function<void(const std::string&)> warning;
};

/// Output layer width and activation implied by a response.
struct OutputSpec {
  int units = 1;
  Activation activation = Activation::linear;
  LossKind loss = LossKind::mse;
};

/// Hidden layers from the config's per-layer lists (broadcasting length-1
/// lists) followed by `output`.
std::vector<LayerSpec> resolve_layers(const FnnConfig& config,
                                      const OutputSpec& output,
                                      Warnings* warnings = nullptr);

/// Weight bases per covariate (broadcasting a single spec).
std::vector<BasisSystem> resolve_weight_bases(const FnnConfig& config,
                                              std::size_t num_covariates,
                                              Warnings* warnings = nullptr);

FnnModel fnn_fit(const FnnData& data, const FnnConfig& config,
                 const Reporter& reporter = {});

/// Regression: N x 1 values. Classification: N x C probabilities in the
/// model's label order. Functional: N x M_resp coefficients.
Matrix fnn_predict(const FnnModel& model, const FunctionalInput& func_cov,
                   const std::optional<Matrix>& scalar_cov,
                   const ProgressFn& progress = {});

/// Most probable label per prediction row.
std::vector<std::string> predicted_labels(const FnnModel& model,
                                          const Matrix& probabilities);

struct FunctionalWeight {
  int covariate = 0;
  BasisSystem basis;
  Vector coefficients;

  Vector eval(std::span<const double> t) const;
};

/// beta_k(t) per covariate: first-layer weights attached to covariate k,
/// divided by the feature scales and averaged over first-layer units.
std::vector<FunctionalWeight> fnn_weights(const FnnModel& model);

struct CurveTable {
  std::vector<double> t;
  Matrix values;  // N x len(t)
};

/// Evaluates predicted response coefficients on a = t_0 < ... <= b spaced by
/// `step`.
CurveTable curve_predictions(const Matrix& predictions, Domain domain,
                             double step, BasisKind kind,
                             int order = BasisSystem::kDefaultOrder);

/// Layer table in the style of a dense-model summary.
struct ModelSummary {
  struct Row {
    std::string name;
    Eigen::Index units = 0;
    std::size_t params = 0;
  };
  std::vector<Row> rows;
  std::size_t total_params = 0;
};

ModelSummary summarize(const Network& net);
std::string format_summary(const ModelSummary& summary);

}  // namespace fnn
