#include "fnn/net.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace fnn;

namespace {

Network single_linear(double w, double b) {
  DenseLayer l;
  l.weights = Matrix::Constant(1, 1, w);
  l.bias = Vector::Constant(1, b);
  l.activation = Activation::linear;
  return {l};
}

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

double numeric_grad(Network& net, double& param, const Vector& x, const Vector& y, LossKind loss) {
  const double h = 1e-5, keep = param;
  param = keep + h;
  const double up = sample_loss(forward(net, x), y, loss);
  param = keep - h;
  const double down = sample_loss(forward(net, x), y, loss);
  param = keep;
  return (up - down) / (2 * h);
}

}  // namespace

TEST(Forward, ZeroNetworkGivesZero) {
  const std::vector<LayerSpec> spec{{3, Activation::linear}, {2, Activation::linear}};
  Network net = init_params(spec, 4, 1);
  for (auto& l : net) l.weights.setZero();
  EXPECT_EQ(forward(net, vec({1, 2, 3, 4})).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Forward, IdentityRelu) {
  DenseLayer l{Matrix::Identity(2, 2), Vector::Zero(2), Activation::relu, 0.0};
  const Vector out = forward({l}, vec({-1, 2}));
  EXPECT_EQ(out, vec({0, 2}));
}

TEST(Forward, HandComputedTwoLayerFixture) {
  DenseLayer a{Matrix(2, 2), vec({0.1, -0.2}), Activation::tanh, 0.0};
  a.weights << 0.5, -1.0, 2.0, 0.25;
  DenseLayer b{Matrix(1, 2), vec({0.3}), Activation::sigmoid, 0.0};
  b.weights << 1.5, -0.5;
  // x = (1, 2): z1 = (0.5 - 2 + 0.1, 2 + 0.5 - 0.2) = (-1.4, 2.3)
  const double h1 = std::tanh(-1.4), h2 = std::tanh(2.3);
  const double expected = 1.0 / (1.0 + std::exp(-(1.5 * h1 - 0.5 * h2 + 0.3)));
  EXPECT_NEAR(forward({a, b}, vec({1, 2}))[0], expected, 1e-12);
}

TEST(Forward, DimensionMismatch) {
  const std::vector<LayerSpec> spec{{2, Activation::linear}};
  EXPECT_THROW(forward(init_params(spec, 3, 1), vec({1, 2})), ValidationError);
}

TEST(Forward, SoftmaxRowsSumToOne) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 5.0);
  const std::vector<LayerSpec> spec{{8, Activation::relu}, {4, Activation::softmax}};
  const Network net = init_params(spec, 3, 9);
  Matrix X(50, 3);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  const Matrix P = forward_batch(net, X);
  EXPECT_GE(P.minCoeff(), 0.0);
  EXPECT_LT((P.rowwise().sum().array() - 1.0).abs().maxCoeff(), 1e-12);
}

TEST(Spec, Validation) {
  EXPECT_THROW(validate_spec(std::vector<LayerSpec>{}), ValidationError);
  EXPECT_THROW(validate_spec(std::vector<LayerSpec>{{0, Activation::linear}}), ValidationError);
  EXPECT_THROW(validate_spec(std::vector<LayerSpec>{{4, Activation::softmax}, {1, Activation::linear}}),
               ValidationError);
  EXPECT_THROW(validate_spec(std::vector<LayerSpec>{{4, Activation::relu, 1.0}, {1, Activation::linear}}),
               ValidationError);
  EXPECT_NO_THROW(validate_spec(std::vector<LayerSpec>{{4, Activation::relu, 0.5}, {2, Activation::softmax}}));
}

TEST(Backward, ZeroResidualGivesZeroGradient) {
  const Network net = single_linear(2.0, 1.0);
  const Gradients g = backward(net, vec({3}), vec({7}), LossKind::mse);
  EXPECT_EQ(g[0].weights(0, 0), 0.0);
  EXPECT_EQ(g[0].bias[0], 0.0);
}

TEST(Backward, SingleLinearNeuronClosedForm) {
  const double w = 1.5, b = -0.5, x = 2.0, y = 4.0;
  const Gradients g = backward(single_linear(w, b), vec({x}), vec({y}), LossKind::mse);
  EXPECT_NEAR(g[0].weights(0, 0), 2 * (w * x + b - y) * x, 1e-14);
  EXPECT_NEAR(g[0].bias[0], 2 * (w * x + b - y), 1e-14);
}

TEST(Backward, RandomThreeLayerMatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (LossKind loss : {LossKind::mse, LossKind::categorical_cross_entropy}) {
    const bool ce = loss == LossKind::categorical_cross_entropy;
    const std::vector<LayerSpec> spec{{6, Activation::tanh}, {5, Activation::sigmoid},
                                      {3, ce ? Activation::softmax : Activation::linear}};
    Network net = init_params(spec, 4, 3);
    for (auto& l : net) {
      for (Eigen::Index i = 0; i < l.bias.size(); ++i) l.bias[i] = 0.1 * n(rng);
    }
    const Vector x = vec({0.3, -1.2, 0.8, 2.0});
    const Vector y = ce ? vec({0, 1, 0}) : vec({0.5, -0.2, 1.0});
    const Gradients g = backward(net, x, y, loss);
    double worst = 0.0;
    for (std::size_t l = 0; l < net.size(); ++l) {
      for (Eigen::Index i = 0; i < net[l].weights.size(); ++i) {
        const double num = numeric_grad(net, net[l].weights.data()[i], x, y, loss);
        const double an = g[l].weights.data()[i];
        worst = std::max(worst, std::abs(num - an) / std::max({std::abs(num), std::abs(an), 1e-4}));
      }
    }
    EXPECT_LT(worst, 1e-5);
  }
}

TEST(Loss, Definitions) {
  EXPECT_NEAR(sample_loss(vec({1, 3}), vec({0, 1}), LossKind::mse), (1.0 + 4.0) / 2, 1e-15);
  EXPECT_NEAR(sample_loss(vec({0.25, 0.75}), vec({0, 1}), LossKind::categorical_cross_entropy),
              -std::log(0.75), 1e-15);
}

TEST(Init, SeededGlorotWithZeroBias) {
  const std::vector<LayerSpec> spec{{64, Activation::relu}, {1, Activation::linear}};
  const Network a = init_params(spec, 8, 42);
  const Network b = init_params(spec, 8, 42);
  EXPECT_EQ(a[0].weights, b[0].weights);
  EXPECT_EQ(a[1].weights, b[1].weights);
  EXPECT_EQ(a[0].bias.cwiseAbs().maxCoeff(), 0.0);
  const double limit = std::sqrt(6.0 / (8 + 64));
  EXPECT_LE(a[0].weights.cwiseAbs().maxCoeff(), limit);
  EXPECT_NE(init_params(spec, 8, 43)[0].weights, a[0].weights);
}

TEST(Init, EmpiricalVarianceMatchesGlorot) {
  const std::vector<LayerSpec> spec{{64, Activation::relu}};
  double sum = 0.0, sq = 0.0, count = 0.0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    const Matrix w = init_params(spec, 8, seed)[0].weights;
    sum += w.sum();
    sq += w.squaredNorm();
    count += static_cast<double>(w.size());
  }
  const double var = sq / count - (sum / count) * (sum / count);
  EXPECT_NEAR(var, 2.0 / (8 + 64), 0.1 * 2.0 / (8 + 64));
}

TEST(ParamCount, LayerFormula) {
  const std::vector<LayerSpec> spec{{64, Activation::relu}, {64, Activation::relu}, {2, Activation::softmax}};
  EXPECT_EQ(param_count(spec, 8), 64u * 8 + 64 + 64 * 64 + 64 + 64 * 2 + 2);
  EXPECT_EQ(param_count(init_params(spec, 8, 1)), 4866u);
}

TEST(Train, RecoversLinearRelation) {
  Matrix X(100, 1), Y(100, 1);
  for (int i = 0; i < 100; ++i) {
    X(i, 0) = -1.0 + 2.0 * i / 99.0;
    Y(i, 0) = 3 * X(i, 0) + 1;
  }
  TrainConfig cfg;
  cfg.epochs = 500;
  cfg.learn_rate = 0.05;
  cfg.validation_split = 0.0;
  cfg.early_stopping = false;
  cfg.batch_size = 16;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  const auto r = train(spec, cfg, X, Y);
  EXPECT_NEAR(r.params[0].weights(0, 0), 3.0, 0.05);
  EXPECT_NEAR(r.params[0].bias[0], 1.0, 0.05);
  EXPECT_EQ(r.history.stopped_epoch, 500);
  EXPECT_EQ(r.history.train_loss.size(), 500u);
}

TEST(Train, PatienceOneStopsAtEpochTwoWhenNothingImproves) {
  Matrix X = Matrix::Random(20, 2);
  Matrix Y = Matrix::Constant(20, 1, 1.0);
  TrainConfig cfg;
  cfg.learn_rate = 0.0;
  cfg.patience = 1;
  cfg.epochs = 50;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  const auto r = train(spec, cfg, X, Y);
  EXPECT_EQ(r.history.stopped_epoch, 2);
  EXPECT_EQ(r.history.val_loss.size(), 2u);
  EXPECT_EQ(r.history.train_loss.size(), 2u);
}

TEST(Train, DeterministicForFixedSeed) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix X(60, 3), Y(60, 1);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  Y.col(0) = X.col(0) - 2 * X.col(2);
  TrainConfig cfg;
  cfg.epochs = 20;
  const std::vector<LayerSpec> spec{{8, Activation::relu, 0.2}, {1, Activation::linear}};
  const auto a = train(spec, cfg, X, Y);
  const auto b = train(spec, cfg, X, Y);
  for (std::size_t l = 0; l < a.params.size(); ++l) {
    EXPECT_EQ(a.params[l].weights, b.params[l].weights);
    EXPECT_EQ(a.params[l].bias, b.params[l].bias);
  }
  EXPECT_EQ(a.history.val_loss, b.history.val_loss);
}

TEST(Train, LossDecreasesMonotonicallyOnNoiselessLinearData) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix X(200, 3), Y(200, 1);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  Y.col(0) = 0.5 * X.col(0) - X.col(1) + 2 * X.col(2) + Vector::Constant(200, 0.3);
  TrainConfig cfg;
  cfg.epochs = 60;
  cfg.learn_rate = 1e-3;
  cfg.validation_split = 0.0;
  cfg.early_stopping = false;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  const auto h = train(spec, cfg, X, Y).history.train_loss;
  for (std::size_t e = 5; e < h.size(); ++e) EXPECT_LT(h[e], h[e - 1]) << "epoch " << e + 1;
}

TEST(Train, EarlyStoppingReturnsBestValidationEpoch) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  Matrix X(80, 4), Y(80, 1);
  for (Eigen::Index i = 0; i < X.size(); ++i) X.data()[i] = n(rng);
  for (Eigen::Index i = 0; i < 80; ++i) Y(i, 0) = X(i, 0) + n(rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learn_rate = 0.02;
  cfg.patience = 5;
  const std::vector<LayerSpec> spec{{32, Activation::relu}, {1, Activation::linear}};
  const auto r = train(spec, cfg, X, Y);
  const auto& v = r.history.val_loss;
  const double best = *std::min_element(v.begin(), v.end());
  const Matrix Xv = X.bottomRows(16), Yv = Y.bottomRows(16);
  EXPECT_LE(mean_loss(r.params, Xv, Yv, LossKind::mse), best + 1e-12);
  EXPECT_EQ(v[static_cast<std::size_t>(r.history.best_epoch - 1)], best);
}

TEST(Train, ExplicitValidationSetIsUsed) {
  Matrix X = Matrix::Random(30, 2), Y = Matrix::Random(30, 1);
  TrainConfig cfg;
  cfg.epochs = 3;
  cfg.early_stopping = false;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  const auto r = train(spec, cfg, X, Y, ValidationSet{Matrix::Random(5, 2), Matrix::Random(5, 1)});
  EXPECT_EQ(r.history.val_loss.size(), 3u);
}

TEST(Train, InputErrors) {
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  TrainConfig cfg;
  EXPECT_THROW(train(spec, cfg, Matrix::Zero(1, 2), Matrix::Zero(1, 1)), ValidationError);
  cfg.validation_split = 0.0;  // early stopping without validation data
  EXPECT_THROW(train(spec, cfg, Matrix::Zero(10, 2), Matrix::Zero(10, 1)), ValidationError);
  TrainConfig ce;
  ce.loss = LossKind::categorical_cross_entropy;
  EXPECT_THROW(train(spec, ce, Matrix::Zero(10, 2), Matrix::Zero(10, 1)), ValidationError);
}

TEST(Train, DivergenceIsReportedWithEpoch) {
  Matrix X(40, 1), Y(40, 1);
  for (int i = 0; i < 40; ++i) {
    X(i, 0) = 1e200 * (i + 1);
    Y(i, 0) = 1.0;
  }
  TrainConfig cfg;
  cfg.epochs = 5;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  try {
    train(spec, cfg, X, Y);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("epoch"), std::string::npos);
  }
}

TEST(Train, DecayShrinksStepSize) {
  Matrix X = Matrix::Random(40, 2), Y = Matrix::Random(40, 1);
  TrainConfig slow;
  slow.epochs = 10;
  slow.early_stopping = false;
  slow.validation_split = 0.0;
  TrainConfig decayed = slow;
  decayed.decay_rate = 100.0;
  const std::vector<LayerSpec> spec{{1, Activation::linear}};
  const Network init = init_params(spec, 2, slow.seed);
  const auto moved = [&](const TrainConfig& c) {
    return (train(spec, c, X, Y).params[0].weights - init[0].weights).norm();
  };
  EXPECT_LT(moved(decayed), moved(slow));
}
