#pragma once

#include "fnn/core.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace fnn {

enum class Activation { relu, sigmoid, tanh, linear, softmax };
enum class LossKind { mse, categorical_cross_entropy };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);
std::string_view to_string(LossKind l);
LossKind parse_loss(std::string_view name);

struct LayerSpec {
  int units = 64;
  Activation activation = Activation::relu;
  double dropout_rate = 0.0;  // applied to this layer's output while training

  bool operator==(const LayerSpec&) const = default;
};

struct DenseLayer {
  Matrix weights;  // units x fan_in
  Vector bias;     // units
  Activation activation = Activation::linear;
  double dropout_rate = 0.0;

  Eigen::Index units() const { return weights.rows(); }
  Eigen::Index fan_in() const { return weights.cols(); }
};

using Network = std::vector<DenseLayer>;

struct LayerGradient {
  Matrix weights;
  Vector bias;
};
using Gradients = std::vector<LayerGradient>;

/// Throws ValidationError for empty specs, non-positive widths, dropout
/// outside [0,1), or softmax anywhere but the output layer.
void validate_spec(std::span<const LayerSpec> spec);

/// Glorot-uniform weights, zero biases.
Network init_params(std::span<const LayerSpec> spec, Eigen::Index fan_in,
                    std::uint64_t seed);

/// Trainable parameter count: sum over layers of fan_in * units + units.
std::size_t param_count(const Network& net);
std::size_t param_count(std::span<const LayerSpec> spec, Eigen::Index fan_in);

/// Inference pass; dropout is inactive.
Vector forward(const Network& net, const Vector& input);
/// Row-wise inference over an N x D matrix; returns N x R.
Matrix forward_batch(const Network& net, const Matrix& inputs);

/// Per-sample loss. mse averages over output units; cross-entropy is
/// -sum y log p and expects a softmax output layer.
double sample_loss(const Vector& output, const Vector& target, LossKind loss);
/// Mean per-sample loss over the rows of X / Y.
double mean_loss(const Network& net, const Matrix& X, const Matrix& Y,
                 LossKind loss);

/// Exact gradient of sample_loss(forward(net, input), target) with respect to
/// every weight and bias. Softmax with cross-entropy is handled in fused form.
Gradients backward(const Network& net, const Vector& input,
                   const Vector& target, LossKind loss);

struct TrainConfig {
  int epochs = 100;
  int batch_size = 32;
  double learn_rate = 1e-3;
  double decay_rate = 0.0;
  double validation_split = 0.2;
  bool early_stopping = true;
  int patience = 15;
  std::uint64_t seed = 1;
  LossKind loss = LossKind::mse;
  /// Shuffle rows (seeded) before taking the validation tail.
  bool shuffle_before_split = false;
  double min_delta = 1e-7;

  void validate() const;
};

struct TrainHistory {
  std::vector<double> train_loss;
  std::vector<double> val_loss;   // empty without validation data
  std::vector<double> train_mse;  // mse of outputs; equals train_loss for mse
  int stopped_epoch = 0;
  int best_epoch = 0;  // 1-based epoch whose parameters were returned
};

struct TrainResult {
  Network params;
  TrainHistory history;
};

struct ValidationSet {
  Matrix X;
  Matrix Y;
};

/// Mini-batch Adam (beta1 0.9, beta2 0.999, eps 1e-7) with step size
/// learn_rate / (1 + decay_rate * t), t counting updates already applied.
///
/// Without an explicit validation set the last floor(N * validation_split)
/// rows are held out. With early stopping the parameters of the epoch with the
/// lowest validation loss are returned. Results depend only on the inputs and
/// config.seed.
TrainResult train(std::span<const LayerSpec> spec, const TrainConfig& config,
                  const Matrix& X, const Matrix& Y,
                  const std::optional<ValidationSet>& validation = std::nullopt);

}  // namespace fnn
