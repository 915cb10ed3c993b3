#include "fnn/net.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace fnn {

namespace {

// Activations act column-wise: each column of z is one sample.
void activate(Activation act, Matrix& z) {
  switch (act) {
    case Activation::relu:
      z = z.cwiseMax(0.0);
      break;
    case Activation::sigmoid:
      z = (1.0 + (-z.array()).exp()).inverse().matrix();
      break;
    case Activation::tanh:
      z = z.array().tanh().matrix();
      break;
    case Activation::linear:
      break;
    case Activation::softmax:
      for (Eigen::Index c = 0; c < z.cols(); ++c) {
        auto col = z.col(c);
        col.array() -= col.maxCoeff();
        col = col.array().exp().matrix();
        col /= col.sum();
      }
      break;
  }
}

// Given dL/da, returns dL/dz for one layer (columns are samples).
Matrix activation_backward(Activation act, const Matrix& z, const Matrix& a,
                           const Matrix& grad_a) {
  switch (act) {
    case Activation::relu:
      return (z.array() > 0.0).select(grad_a, 0.0);
    case Activation::sigmoid:
      return (grad_a.array() * a.array() * (1.0 - a.array())).matrix();
    case Activation::tanh:
      return (grad_a.array() * (1.0 - a.array().square())).matrix();
    case Activation::linear:
      return grad_a;
    case Activation::softmax: {
      Matrix out(grad_a.rows(), grad_a.cols());
      for (Eigen::Index c = 0; c < a.cols(); ++c) {
        const double dot = a.col(c).dot(grad_a.col(c));
        out.col(c) = (a.col(c).array() * (grad_a.col(c).array() - dot)).matrix();
      }
      return out;
    }
  }
  return grad_a;
}

struct ForwardCache {
  std::vector<Matrix> z;       // pre-activations per layer
  std::vector<Matrix> a;       // a[0] = input, a[l+1] = output of layer l
  std::vector<Matrix> masks;   // dropout masks (empty when inactive)
};

// inputs: D x B (columns are samples)
void forward_cached(const Network& net, const Matrix& inputs, ForwardCache& cache,
                    std::mt19937_64* dropout_rng) {
  cache.z.resize(net.size());
  cache.a.resize(net.size() + 1);
  cache.masks.assign(net.size(), Matrix());
  cache.a[0] = inputs;
  for (std::size_t l = 0; l < net.size(); ++l) {
    const auto& layer = net[l];
    cache.z[l] = (layer.weights * cache.a[l]).colwise() + layer.bias;
    Matrix a = cache.z[l];
    activate(layer.activation, a);
    if (dropout_rng && layer.dropout_rate > 0.0) {
      const double keep = 1.0 - layer.dropout_rate;
      std::bernoulli_distribution coin(keep);
      Matrix mask(a.rows(), a.cols());
      for (Eigen::Index j = 0; j < mask.cols(); ++j) {
        for (Eigen::Index i = 0; i < mask.rows(); ++i) {
          mask(i, j) = coin(*dropout_rng) ? 1.0 / keep : 0.0;
        }
      }
      cache.masks[l] = mask;
      a = a.cwiseProduct(mask);
    }
    cache.a[l + 1] = std::move(a);
  }
}

// Gradients of the mean per-sample loss over the batch columns.
Gradients backward_cached(const Network& net, const ForwardCache& cache,
                          const Matrix& targets, LossKind loss) {
  const Eigen::Index batch = targets.cols();
  const std::size_t num_layers = net.size();
  const Matrix& out = cache.a[num_layers];
  const Eigen::Index r = out.rows();
  Gradients grads(num_layers);

  Matrix delta;  // dL/dz of the current layer, summed loss over the batch
  const auto& last = net.back();
  if (loss == LossKind::categorical_cross_entropy &&
      last.activation == Activation::softmax && last.dropout_rate == 0.0) {
    delta = out.array().rowwise() * targets.colwise().sum().array();
    delta -= targets;
  } else {
    Matrix grad_a;
    if (loss == LossKind::mse) {
      grad_a = 2.0 * (out - targets) / static_cast<double>(r);
    } else {
      grad_a = -targets.cwiseQuotient(out);
    }
    if (cache.masks[num_layers - 1].size() != 0) {
      grad_a = grad_a.cwiseProduct(cache.masks[num_layers - 1]);
    }
    Matrix a_act = cache.z[num_layers - 1];
    activate(last.activation, a_act);
    delta = activation_backward(last.activation, cache.z[num_layers - 1], a_act,
                                grad_a);
  }
  delta /= static_cast<double>(batch);

  for (std::size_t l = num_layers; l-- > 0;) {
    grads[l].weights = delta * cache.a[l].transpose();
    grads[l].bias = delta.rowwise().sum();
    if (l == 0) break;
    Matrix grad_a = net[l].weights.transpose() * delta;
    if (cache.masks[l - 1].size() != 0) {
      grad_a = grad_a.cwiseProduct(cache.masks[l - 1]);
    }
    Matrix a_act = cache.z[l - 1];
    activate(net[l - 1].activation, a_act);
    delta = activation_backward(net[l - 1].activation, cache.z[l - 1], a_act,
                                grad_a);
  }
  return grads;
}

void check_input_width(const Network& net, Eigen::Index width) {
  if (net.empty()) throw ValidationError("network has no layers");
  if (width != net.front().fan_in()) {
    throw ValidationError("input has " + std::to_string(width) +
                          " features but the first layer expects " +
                          std::to_string(net.front().fan_in()));
  }
}

Matrix select_rows(const Matrix& m, std::span<const Eigen::Index> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  }
  return out;
}

double mean_mse(const Network& net, const Matrix& X, const Matrix& Y) {
  const Matrix pred = forward_batch(net, X);
  return (pred - Y).squaredNorm() /
         static_cast<double>(std::max<Eigen::Index>(1, Y.size()));
}

struct AdamState {
  std::vector<Matrix> mw, vw;
  std::vector<Vector> mb, vb;

  explicit AdamState(const Network& net) {
    for (const auto& layer : net) {
      mw.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
      vw.push_back(Matrix::Zero(layer.weights.rows(), layer.weights.cols()));
      mb.push_back(Vector::Zero(layer.bias.size()));
      vb.push_back(Vector::Zero(layer.bias.size()));
    }
  }
};

constexpr double kBeta1 = 0.9;
constexpr double kBeta2 = 0.999;
constexpr double kEpsilon = 1e-7;

void adam_step(Network& net, const Gradients& grads, AdamState& state,
               double step, long update) {
  const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(update));
  const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(update));
  for (std::size_t l = 0; l < net.size(); ++l) {
    state.mw[l] = kBeta1 * state.mw[l] + (1.0 - kBeta1) * grads[l].weights;
    state.vw[l] = kBeta2 * state.vw[l] +
                  (1.0 - kBeta2) * grads[l].weights.cwiseAbs2();
    state.mb[l] = kBeta1 * state.mb[l] + (1.0 - kBeta1) * grads[l].bias;
    state.vb[l] = kBeta2 * state.vb[l] + (1.0 - kBeta2) * grads[l].bias.cwiseAbs2();
    net[l].weights.array() -= step * (state.mw[l].array() / bc1) /
                              ((state.vw[l].array() / bc2).sqrt() + kEpsilon);
    net[l].bias.array() -= step * (state.mb[l].array() / bc1) /
                           ((state.vb[l].array() / bc2).sqrt() + kEpsilon);
  }
}

}  // namespace

std::string_view to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
    case Activation::softmax: return "softmax";
  }
  return "linear";
}

Activation parse_activation(std::string_view name) {
  for (auto a : {Activation::relu, Activation::sigmoid, Activation::tanh,
                 Activation::linear, Activation::softmax}) {
    if (name == to_string(a)) return a;
  }
  throw ValidationError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(LossKind l) {
  return l == LossKind::mse ? "mse" : "categorical_cross_entropy";
}

LossKind parse_loss(std::string_view name) {
  if (name == "mse") return LossKind::mse;
  if (name == "categorical_cross_entropy") return LossKind::categorical_cross_entropy;
  throw ValidationError("unknown loss '" + std::string(name) + "'");
}

void validate_spec(std::span<const LayerSpec> spec) {
  if (spec.empty()) throw ValidationError("network needs at least one layer");
  for (std::size_t l = 0; l < spec.size(); ++l) {
    const auto& s = spec[l];
    const std::string where = "layer " + std::to_string(l + 1);
    if (s.units < 1) throw ValidationError(where + ": units must be positive");
    if (!(s.dropout_rate >= 0.0 && s.dropout_rate < 1.0)) {
      throw ValidationError(where + ": dropout rate must lie in [0, 1)");
    }
    if (s.activation == Activation::softmax && l + 1 != spec.size()) {
      throw ValidationError(where + ": softmax is only allowed on the output layer");
    }
  }
  if (spec.back().dropout_rate != 0.0) {
    throw ValidationError("output layer cannot use dropout");
  }
}

Network init_params(std::span<const LayerSpec> spec, Eigen::Index fan_in,
                    std::uint64_t seed) {
  validate_spec(spec);
  if (fan_in < 1) throw ValidationError("network input width must be positive");
  std::mt19937_64 rng(seed);
  Network net;
  net.reserve(spec.size());
  Eigen::Index in = fan_in;
  for (const auto& s : spec) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + s.units));
    std::uniform_real_distribution<double> dist(-limit, limit);
    DenseLayer layer;
    layer.weights.resize(s.units, in);
    for (Eigen::Index i = 0; i < layer.weights.rows(); ++i) {
      for (Eigen::Index j = 0; j < layer.weights.cols(); ++j) {
        layer.weights(i, j) = dist(rng);
      }
    }
    layer.bias = Vector::Zero(s.units);
    layer.activation = s.activation;
    layer.dropout_rate = s.dropout_rate;
    net.push_back(std::move(layer));
    in = s.units;
  }
  return net;
}

std::size_t param_count(const Network& net) {
  std::size_t total = 0;
  for (const auto& layer : net) {
    total += static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
  }
  return total;
}

std::size_t param_count(std::span<const LayerSpec> spec, Eigen::Index fan_in) {
  std::size_t total = 0;
  auto in = static_cast<std::size_t>(fan_in);
  for (const auto& s : spec) {
    const auto units = static_cast<std::size_t>(s.units);
    total += in * units + units;
    in = units;
  }
  return total;
}

Vector forward(const Network& net, const Vector& input) {
  check_input_width(net, input.size());
  Matrix a = input;
  for (const auto& layer : net) {
    Matrix z = (layer.weights * a).colwise() + layer.bias;
    activate(layer.activation, z);
    a = std::move(z);
  }
  return a.col(0);
}

Matrix forward_batch(const Network& net, const Matrix& inputs) {
  check_input_width(net, inputs.cols());
  Matrix a = inputs.transpose();
  for (const auto& layer : net) {
    Matrix z = (layer.weights * a).colwise() + layer.bias;
    activate(layer.activation, z);
    a = std::move(z);
  }
  return a.transpose();
}

double sample_loss(const Vector& output, const Vector& target, LossKind loss) {
  if (output.size() != target.size()) {
    throw ValidationError("target has " + std::to_string(target.size()) +
                          " entries but the network outputs " +
                          std::to_string(output.size()));
  }
  if (loss == LossKind::mse) {
    return (output - target).squaredNorm() / static_cast<double>(output.size());
  }
  double sum = 0.0;
  for (Eigen::Index r = 0; r < output.size(); ++r) {
    if (target[r] != 0.0) sum -= target[r] * std::log(output[r]);
  }
  return sum;
}

double mean_loss(const Network& net, const Matrix& X, const Matrix& Y,
                 LossKind loss) {
  const Matrix pred = forward_batch(net, X);
  if (pred.cols() != Y.cols() || pred.rows() != Y.rows()) {
    throw ValidationError("target shape does not match network output");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < pred.rows(); ++i) {
    sum += sample_loss(pred.row(i).transpose(), Y.row(i).transpose(), loss);
  }
  return sum / static_cast<double>(std::max<Eigen::Index>(1, pred.rows()));
}

Gradients backward(const Network& net, const Vector& input,
                   const Vector& target, LossKind loss) {
  check_input_width(net, input.size());
  if (target.size() != net.back().units()) {
    throw ValidationError("target has " + std::to_string(target.size()) +
                          " entries but the network outputs " +
                          std::to_string(net.back().units()));
  }
  ForwardCache cache;
  forward_cached(net, input, cache, nullptr);
  return backward_cached(net, cache, target, loss);
}

void TrainConfig::validate() const {
  if (epochs < 1) throw ValidationError("epochs must be positive");
  if (batch_size < 1) throw ValidationError("batch size must be positive");
  if (!(learn_rate >= 0.0) || !std::isfinite(learn_rate)) {
    throw ValidationError("learn rate must be a finite non-negative number");
  }
  if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) {
    throw ValidationError("decay rate must be a finite non-negative number");
  }
  if (!(validation_split >= 0.0 && validation_split < 1.0)) {
    throw ValidationError("validation split must lie in [0, 1)");
  }
  if (patience < 1) throw ValidationError("patience must be positive");
}

TrainResult train(std::span<const LayerSpec> spec, const TrainConfig& config,
                  const Matrix& X, const Matrix& Y,
                  const std::optional<ValidationSet>& validation) {
  config.validate();
  validate_spec(spec);
  if (X.rows() != Y.rows()) {
    throw ValidationError("inputs have " + std::to_string(X.rows()) +
                          " rows but targets have " + std::to_string(Y.rows()));
  }
  if (Y.cols() != spec.back().units) {
    throw ValidationError("targets have " + std::to_string(Y.cols()) +
                          " columns but the output layer has " +
                          std::to_string(spec.back().units) + " units");
  }
  if (config.loss == LossKind::categorical_cross_entropy &&
      spec.back().activation != Activation::softmax) {
    throw ValidationError("cross-entropy loss requires a softmax output layer");
  }
  if (X.rows() < 2) throw ValidationError("training needs at least 2 rows");
  if (!X.allFinite() || !Y.allFinite()) {
    throw ValidationError("training data contain non-finite values");
  }

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);

  std::vector<Eigen::Index> order(static_cast<std::size_t>(X.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  if (config.shuffle_before_split && !validation) {
    std::shuffle(order.begin(), order.end(), rng);
  }

  Matrix x_train, y_train, x_val, y_val;
  bool has_val = false;
  if (validation) {
    x_train = X;
    y_train = Y;
    x_val = validation->X;
    y_val = validation->Y;
    if (x_val.rows() == 0) throw ValidationError("validation set is empty");
    if (x_val.cols() != X.cols() || y_val.cols() != Y.cols() ||
        x_val.rows() != y_val.rows()) {
      throw ValidationError("validation set shape does not match training data");
    }
    has_val = true;
  } else if (config.validation_split > 0.0) {
    const auto n = static_cast<double>(X.rows());
    const auto n_train = static_cast<Eigen::Index>(n * (1.0 - config.validation_split));
    const Eigen::Index n_val = X.rows() - n_train;
    if (n_train < 1 || n_val < 1) {
      throw ValidationError(
          "validation split " + std::to_string(config.validation_split) +
          " leaves an empty training or validation partition for " +
          std::to_string(X.rows()) + " rows");
    }
    std::span<const Eigen::Index> idx(order);
    x_train = select_rows(X, idx.first(n_train));
    y_train = select_rows(Y, idx.first(n_train));
    x_val = select_rows(X, idx.subspan(n_train));
    y_val = select_rows(Y, idx.subspan(n_train));
    has_val = true;
  } else {
    x_train = select_rows(X, order);
    y_train = select_rows(Y, order);
  }
  if (config.early_stopping && !has_val) {
    throw ValidationError(
        "early stopping needs a validation split > 0 or a validation set");
  }

  Network net = init_params(spec, X.cols(), config.seed);
  AdamState adam(net);
  TrainResult result;
  auto& hist = result.history;

  Network best_net = net;
  double best_val = std::numeric_limits<double>::infinity();
  double reference_val = std::numeric_limits<double>::infinity();
  int wait = 0;
  long updates = 0;

  const Eigen::Index n_train = x_train.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n_train));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  ForwardCache cache;
  const bool uses_dropout =
      std::any_of(spec.begin(), spec.end(),
                  [](const LayerSpec& s) { return s.dropout_rate > 0.0; });

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(perm.begin(), perm.end(), rng);
    for (Eigen::Index start = 0; start < n_train; start += config.batch_size) {
      const Eigen::Index len = std::min<Eigen::Index>(config.batch_size, n_train - start);
      std::span<const Eigen::Index> rows(perm.data() + start,
                                         static_cast<std::size_t>(len));
      const Matrix xb = select_rows(x_train, rows).transpose();
      const Matrix yb = select_rows(y_train, rows).transpose();
      forward_cached(net, xb, cache, uses_dropout ? &rng : nullptr);
      const Gradients grads = backward_cached(net, cache, yb, config.loss);
      const double step =
          config.learn_rate / (1.0 + config.decay_rate * static_cast<double>(updates));
      ++updates;
      adam_step(net, grads, adam, step, updates);
    }

    const double train_loss = mean_loss(net, x_train, y_train, config.loss);
    if (!std::isfinite(train_loss)) {
      throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                           " (non-finite training loss)");
    }
    hist.train_loss.push_back(train_loss);
    hist.train_mse.push_back(config.loss == LossKind::mse
                                 ? train_loss
                                 : mean_mse(net, x_train, y_train));
    hist.stopped_epoch = epoch;

    if (has_val) {
      const double val_loss = mean_loss(net, x_val, y_val, config.loss);
      if (!std::isfinite(val_loss)) {
        throw NumericalError("training diverged at epoch " + std::to_string(epoch) +
                             " (non-finite validation loss)");
      }
      hist.val_loss.push_back(val_loss);
      if (config.early_stopping) {
        if (val_loss < best_val) {
          best_val = val_loss;
          best_net = net;
          hist.best_epoch = epoch;
        }
        if (val_loss < reference_val - config.min_delta) {
          reference_val = val_loss;
          wait = 0;
        } else if (++wait >= config.patience) {
          break;
        }
      }
    }
  }

  if (config.early_stopping) {
    result.params = std::move(best_net);
  } else {
    result.params = std::move(net);
    hist.best_epoch = hist.stopped_epoch;
  }
  return result;
}

}  // namespace fnn
