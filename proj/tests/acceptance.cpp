// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include "fnn/io.hpp"
#include "fnn/modelsel.hpp"
#include "fnn/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <unistd.h>

#ifndef FNN_CLI_PATH
#error "FNN_CLI_PATH must name the fnn executable"
#endif

namespace fs = std::filesystem;
using namespace fnn;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

// Collects sub-checks of one criterion into a single verdict.
struct Checker {
  Outcome out;
  void check(bool ok, const std::string& what) {
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += what + (ok ? "" : " [FAILED]");
    out.pass = out.pass && ok;
  }
};

std::vector<Eigen::Index> iota_rows(Eigen::Index n) {
  std::vector<Eigen::Index> rows(static_cast<std::size_t>(n));
  std::iota(rows.begin(), rows.end(), Eigen::Index{0});
  return rows;
}

// Seeded 75/25 split of 0..n-1.
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_rows(Eigen::Index n,
                                                                           std::uint64_t seed) {
  auto rows = iota_rows(n);
  std::mt19937_64 rng(seed);
  std::shuffle(rows.begin(), rows.end(), rng);
  const auto n_train = static_cast<std::size_t>(std::floor(0.75 * static_cast<double>(n)));
  std::vector<Eigen::Index> train(rows.begin(), rows.begin() + static_cast<long>(n_train));
  std::vector<Eigen::Index> test(rows.begin() + static_cast<long>(n_train), rows.end());
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {train, test};
}

double correlation(const Vector& a, const Vector& b) {
  const Vector ca = a.array() - a.mean();
  const Vector cb = b.array() - b.mean();
  return ca.dot(cb) / std::sqrt(ca.squaredNorm() * cb.squaredNorm());
}

// ---------------------------------------------------------------------------

// 1. The three reference configurations reproduce their parameter totals.
Outcome parameter_counts() {
  const auto start = Clock::now();
  Checker c;
  const Domain unit{0.0, 1.0};

  // Classification: one raw covariate with default weight basis, one scalar,
  // two classes.
  {
    SynthOptions o;
    o.n = 40;
    auto s = synth_classification(o);
    FnnConfig cfg;
    cfg.raw_data = true;
    cfg.domain_ranges = {unit};
    cfg.response_mode = ResponseMode::classification;
    cfg.train.epochs = 1;
    const auto model = fnn_fit(s.data, cfg);
    const auto text = format_summary(summarize(model.params));
    c.check(text.find("Total params: 4,866") != std::string::npos,
            "classification " + std::to_string(param_count(model.params)));
  }
  // Regression: three covariates, one B-spline spec of five terms repeated.
  {
    SynthOptions o;
    o.n = 40;
    auto s = synth_regression(o);
    auto& raw = std::get<std::vector<RawCurves>>(s.data.func_cov);
    raw = {raw[0], raw[0], raw[0]};
    FnnConfig cfg;
    cfg.raw_data = true;
    cfg.domain_ranges = {unit, unit, unit};
    cfg.weight_bases = {{BasisKind::bspline, 5}};
    cfg.activations = {Activation::relu, Activation::linear};
    cfg.train.epochs = 1;
    const auto model = fnn_fit(s.data, cfg);
    const auto text = format_summary(summarize(model.params));
    c.check(text.find("Total params: 5,249") != std::string::npos,
            "regression " + std::to_string(param_count(model.params)));
  }
  // Functional response with 11 coefficients, layers 128/128/32.
  {
    SynthOptions o;
    o.n = 40;
    auto s = synth_functional(o);
    FnnConfig cfg;
    cfg.raw_data = true;
    cfg.domain_ranges = {unit};
    cfg.response_mode = ResponseMode::functional;
    cfg.hidden_layers = 3;
    cfg.neurons = {128, 128, 32};
    cfg.activations = {Activation::relu, Activation::relu, Activation::relu};
    cfg.train.epochs = 1;
    const auto model = fnn_fit(s.data, cfg);
    const auto text = format_summary(summarize(model.params));
    c.check(text.find("Total params: 22,027") != std::string::npos,
            "functional " + std::to_string(param_count(model.params)));
  }
  const double t = seconds_since(start);
  c.check(t < 1.0, fmt("%.3fs < 1s", t));
  return c.out;
}

// 2. Simpson integral features against a 1e5-point trapezoid oracle.
Outcome quadrature_oracle() {
  const auto start = Clock::now();
  Checker c;
  const Domain d{0.0, 1.0};
  const std::size_t oracle_nodes = 100000;
  const auto grid = linspace(d.lo, d.hi, oracle_nodes);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> normal(0.0, 1.0);

  const auto check_pair = [&](const BasisSystem& curve_basis, const BasisSystem& weight_basis,
                              const std::string& label, int rule_points) {
    FunctionalDataSet fd;
    Matrix coefs(curve_basis.num_basis(), 50);
    for (Eigen::Index i = 0; i < coefs.size(); ++i) coefs.data()[i] = normal(rng);
    fd.covariates.push_back({curve_basis, coefs});
    const auto dm = integral_features(fd, {weight_basis}, std::nullopt, rule_points);

    const Matrix x = basis_eval(curve_basis, grid) * coefs;  // nodes x 50
    const Matrix phi = basis_eval(weight_basis, grid);       // nodes x M
    double max_err = 0.0;
    double max_ref = 0.0;
    for (Eigen::Index n = 0; n < 50; ++n) {
      for (Eigen::Index m = 0; m < phi.cols(); ++m) {
        const double ref = trapezoid(phi.col(m).cwiseProduct(x.col(n)), d);
        max_err = std::max(max_err, std::abs(dm.features(n, m) - ref));
        max_ref = std::max(max_ref, std::abs(ref));
      }
    }
    const double rel = max_err / max_ref;
    c.check(rel < 1e-6, label + fmt(" rel %.2e", rel));
  };
  // Band-limited Fourier curves at the default rule.
  check_pair(BasisSystem::fourier(11, d), BasisSystem::fourier(7, d), "fourier/fourier Q=101", 101);
  check_pair(BasisSystem::fourier(21, d), BasisSystem::fourier(9, d), "fourier/fourier Q=101", 101);
  // Cubic B-splines have third-derivative jumps at knots that fall between
  // Simpson nodes; 101 nodes leave errors near 1e-5, so they get a finer rule.
  check_pair(BasisSystem::bspline(15, d), BasisSystem::fourier(7, d), "bspline/fourier Q=1001", 1001);
  check_pair(BasisSystem::fourier(11, d), BasisSystem::bspline(5, d), "fourier/bspline Q=1001", 1001);
  const double t = seconds_since(start);
  c.check(t < 5.0, fmt("%.2fs < 5s", t));
  return c.out;
}

// 3. Analytic gradients against central finite differences.
Outcome gradient_check() {
  const auto start = Clock::now();
  Checker c;
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<int> depth(1, 3);
  std::uniform_int_distribution<int> width(1, 9);
  std::uniform_int_distribution<int> act(0, 3);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::Index fan_in = width(rng);
    std::vector<LayerSpec> spec;
    const int hidden = depth(rng) - 1;
    for (int l = 0; l < hidden; ++l) {
      spec.push_back({width(rng), static_cast<Activation>(act(rng)), 0.0});
    }
    const bool classify = trial % 2 == 1;
    const int outputs = classify ? 2 + trial % 3 : 1 + trial % 3;
    spec.push_back({outputs, classify ? Activation::softmax : static_cast<Activation>(act(rng)), 0.0});
    const LossKind loss = classify ? LossKind::categorical_cross_entropy : LossKind::mse;
    Network net = init_params(spec, fan_in, static_cast<std::uint64_t>(trial) + 5);
    for (auto& layer : net) {
      for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias[i] = 0.1 * normal(rng);
    }
    Vector x(fan_in);
    for (Eigen::Index i = 0; i < fan_in; ++i) x[i] = normal(rng);
    Vector y = Vector::Zero(outputs);
    if (classify) {
      y[trial % outputs] = 1.0;
    } else {
      for (Eigen::Index i = 0; i < outputs; ++i) y[i] = normal(rng);
    }
    const Gradients g = backward(net, x, y, loss);
    const auto f = [&] { return sample_loss(forward(net, x), y, loss); };
    const auto compare = [&](double& param, double analytic) {
      const double keep = param;
      param = keep + h;
      const double up = f();
      param = keep - h;
      const double down = f();
      param = keep;
      const double numeric = (up - down) / (2 * h);
      const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-4});
      worst = std::max(worst, std::abs(analytic - numeric) / denom);
    };
    for (std::size_t l = 0; l < net.size(); ++l) {
      for (Eigen::Index i = 0; i < net[l].weights.size(); ++i) {
        compare(net[l].weights.data()[i], g[l].weights.data()[i]);
      }
      for (Eigen::Index i = 0; i < net[l].bias.size(); ++i) {
        compare(net[l].bias[i], g[l].bias[i]);
      }
    }
  }
  c.check(worst < 1e-5, fmt("max rel err %.2e", worst));
  const double t = seconds_since(start);
  c.check(t < 30.0, fmt("%.2fs < 30s", t));
  return c.out;
}

// 4. Partition of unity, Fourier orthonormality, derivatives.
Outcome basis_properties() {
  Checker c;
  const Domain d{-2.0, 3.0};
  const auto t = linspace(d.lo, d.hi, 1000);
  double pou = 0.0;
  for (int order : {2, 3, 4, 5}) {
    for (int m : {order, order + 1, 8, 20}) {
      const Matrix b = basis_eval(BasisSystem::bspline(m, d, order), t);
      pou = std::max(pou, (b.rowwise().sum().array() - 1.0).abs().maxCoeff());
    }
  }
  c.check(pou < 1e-10, fmt("partition of unity %.1e", pou));

  const QuadratureRule rule(d, 1001);
  double off = 0.0;
  double diag = 0.0;
  for (int m : {1, 5, 11, 21}) {
    const Matrix phi = basis_eval(BasisSystem::fourier(m, d), rule.nodes());
    const Matrix gram = phi.transpose() * rule.weights().asDiagonal() * phi;
    for (Eigen::Index i = 0; i < gram.rows(); ++i) {
      for (Eigen::Index j = 0; j < gram.cols(); ++j) {
        if (i == j) diag = std::max(diag, std::abs(gram(i, j) - 1.0));
        else off = std::max(off, std::abs(gram(i, j)));
      }
    }
  }
  c.check(off < 1e-6 && diag < 1e-6, fmt("fourier off-diagonal %.1e", off));

  // Interior points away from B-spline knots, where derivatives are smooth.
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(d.lo + 0.01, d.hi - 0.01);
  std::vector<double> pts(200);
  for (auto& p : pts) p = u(rng);
  const double h = 1e-6;
  double worst = 0.0;
  for (const auto& sys : {BasisSystem::fourier(9, d), BasisSystem::bspline(10, d, 4),
                          BasisSystem::bspline(7, d, 3)}) {
    std::vector<double> up(pts), down(pts);
    for (std::size_t i = 0; i < pts.size(); ++i) {
      up[i] += h;
      down[i] -= h;
    }
    const Matrix fd = (basis_eval(sys, up) - basis_eval(sys, down)) / (2 * h);
    const Matrix an = basis_derivative(sys, pts);
    const double scale = an.cwiseAbs().maxCoeff();
    worst = std::max(worst, (fd - an).cwiseAbs().maxCoeff() / scale);
  }
  c.check(worst < 1e-4, fmt("derivative rel err %.1e", worst));
  return c.out;
}

// 5. Scalar-on-function regression recovers the response and beta*.
Outcome synthetic_regression() {
  const auto start = Clock::now();
  Checker c;
  SynthOptions o;
  o.n = 150;
  o.noise_sd = 0.05;
  o.seed = 11;
  const SynthData s = synth_regression(o);
  const auto [train, test] = split_rows(o.n, 5);
  FnnConfig cfg;
  cfg.raw_data = true;
  cfg.domain_ranges = {o.domain};
  const FnnData train_data = s.data.select(train);
  const FnnData test_data = s.data.select(test);
  const FnnModel model = fnn_fit(train_data, cfg);
  const Matrix pred = fnn_predict(model, test_data.func_cov, std::nullopt);
  const Vector y = test_data.resp.values.col(0);
  const double sse = (pred.col(0) - y).squaredNorm();
  const double sst = (y.array() - y.mean()).square().sum();
  const double r2 = 1.0 - sse / sst;
  c.check(r2 > 0.9, fmt("held-out R2 %.4f", r2));

  const auto grid = linspace(o.domain.lo, o.domain.hi, 200);
  const Vector beta_hat = fnn_weights(model).front().eval(grid);
  const Vector beta_star = basis_eval(s.beta_basis, grid) * s.beta_coefs;
  const double r = std::abs(correlation(beta_hat, beta_star));
  c.check(r > 0.8, fmt("|corr(beta_hat, beta*)| %.4f", r));
  const double t = seconds_since(start);
  c.check(t < 60.0, fmt("%.2fs < 60s", t));
  return c.out;
}

// 6. Two-class problem with a scalar covariate.
Outcome synthetic_classification() {
  const auto start = Clock::now();
  Checker c;
  SynthOptions o;
  o.n = 200;
  o.seed = 21;
  const SynthData s = synth_classification(o);
  const auto [train, test] = split_rows(o.n, 6);
  FnnConfig cfg;
  cfg.raw_data = true;
  cfg.domain_ranges = {o.domain};
  cfg.response_mode = ResponseMode::classification;
  const FnnData train_data = s.data.select(train);
  const FnnData test_data = s.data.select(test);
  const FnnModel model = fnn_fit(train_data, cfg);
  const Matrix prob = fnn_predict(model, test_data.func_cov, test_data.scalar_cov);
  const auto labels = predicted_labels(model, prob);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) hits += labels[i] == test_data.resp.labels[i];
  const double acc = static_cast<double>(hits) / static_cast<double>(labels.size());
  c.check(acc >= 0.95, fmt("test accuracy %.4f", acc));
  const double row_err = (prob.rowwise().sum().array() - 1.0).abs().maxCoeff();
  c.check(row_err <= 1e-12, fmt("max |row sum - 1| %.1e", row_err));
  const double t = seconds_since(start);
  c.check(t < 60.0, fmt("%.2fs < 60s", t));
  return c.out;
}

// 7. Cross-validated MSPE recomputed from the fold assignment.
Outcome cv_correctness() {
  const auto start = Clock::now();
  Checker c;
  SynthOptions o;
  o.n = 60;
  const SynthData s = synth_regression(o);
  FnnConfig cfg;
  cfg.raw_data = true;
  cfg.domain_ranges = {o.domain};
  cfg.neurons = {16, 16};
  cfg.train.epochs = 30;
  const CvResult cv = fnn_cv(cfg, s.data, 5, 3);

  // Independent pooled MSPE: walk observations, bucket squared errors by fold.
  const int k = cv.folds.nfolds;
  std::vector<double> sum(static_cast<std::size_t>(k), 0.0);
  std::vector<double> count(static_cast<std::size_t>(k), 0.0);
  for (Eigen::Index i = 0; i < o.n; ++i) {
    const auto f = static_cast<std::size_t>(cv.folds.assignments[static_cast<std::size_t>(i)]);
    double sq = 0.0;
    for (Eigen::Index j = 0; j < cv.predictions.cols(); ++j) {
      const double e = cv.predictions(i, j) - s.data.resp.values(i, j);
      sq += e * e;
    }
    sum[f] += sq;
    count[f] += 1.0;
  }
  // sum_k sum_{l in S_k} ||yhat_l - y_l||^2 / (|S_k| K), term by term.
  double total = 0.0;
  for (int f = 0; f < k; ++f) {
    const auto u = static_cast<std::size_t>(f);
    total += sum[u] / (count[u] * static_cast<double>(k));
  }
  c.check(total == cv.overall_mspe, fmt("external MSPE %.17g", total) + fmt(" vs %.17g", cv.overall_mspe));

  std::mt19937_64 rng(31337);
  std::uniform_int_distribution<Eigen::Index> n_dist(2, 300);
  bool ok = true;
  for (int trial = 0; trial < 500 && ok; ++trial) {
    const Eigen::Index n = n_dist(rng);
    const int folds = std::uniform_int_distribution<int>(2, static_cast<int>(std::min<Eigen::Index>(n, 20)))(rng);
    const std::uint64_t seed = rng();
    const FoldPlan plan = make_folds(n, folds, seed);
    ok = ok && plan.assignments.size() == static_cast<std::size_t>(n);
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    std::size_t lo = SIZE_MAX, hi = 0;
    for (int f = 0; f < folds; ++f) {
      const auto members = plan.members(f);
      const auto rest = plan.complement(f);
      ok = ok && !members.empty() && members.size() + rest.size() == static_cast<std::size_t>(n);
      lo = std::min(lo, members.size());
      hi = std::max(hi, members.size());
      for (auto i : members) ++seen[static_cast<std::size_t>(i)];
      std::vector<Eigen::Index> both;
      std::set_intersection(members.begin(), members.end(), rest.begin(), rest.end(),
                            std::back_inserter(both));
      ok = ok && both.empty();
    }
    ok = ok && hi - lo <= 1;
    ok = ok && std::all_of(seen.begin(), seen.end(), [](int v) { return v == 1; });
    ok = ok && make_folds(n, folds, seed).assignments == plan.assignments;
  }
  c.check(ok, "500 randomized fold partitions");
  const double t = seconds_since(start);
  c.check(t < 10.0, fmt("%.2fs < 10s", t));
  return c.out;
}

// 8. Grid search against the default config and an exhaustive re-evaluation.
Outcome tuning() {
  const auto start = Clock::now();
  Checker c;
  SynthOptions o;
  o.n = 150;
  o.seed = 11;
  const SynthData s = synth_regression(o);

  TuneList list;
  list.num_hidden_layers = {2};
  list.neurons = {64};
  list.epochs = {100};
  list.val_split = {0.2};
  list.patience = {15};
  list.learn_rate = {1e-3, 1e-2};
  list.num_basis = {5, 7};
  list.activation_choice = {Activation::relu, Activation::sigmoid};

  TuneSettings settings;
  settings.basis_choice = {BasisKind::fourier};
  settings.domain_ranges = {o.domain};
  settings.nfolds = 2;
  settings.raw_data = true;
  settings.seed = 1;

  settings.workers = 4;
  const TuneResult r4 = fnn_tune(list, s.data, ResponseMode::regression, settings);
  settings.workers = 1;
  const TuneResult r1 = fnn_tune(list, s.data, ResponseMode::regression, settings);

  FnnConfig defaults;
  defaults.raw_data = true;
  defaults.domain_ranges = {o.domain};
  const FoldPlan plan = make_folds(o.n, settings.nfolds, settings.seed);
  const double default_mspe = fnn_cv(defaults, s.data, plan).overall_mspe;
  c.check(r4.best_mspe() <= default_mspe,
          fmt("best %.5f", r4.best_mspe()) + fmt(" <= default %.5f", default_mspe));

  // Exhaustive re-evaluation with an independently enumerated grid.
  std::vector<TuneCandidate> grid;
  for (double lr : list.learn_rate) {
    for (int m : list.num_basis) {
      for (Activation a1 : list.activation_choice) {
        for (Activation a2 : list.activation_choice) {
          TuneCandidate cand;
          cand.hidden_layers = 2;
          cand.activations = {a1, a2};
          cand.num_basis = {m};
          cand.neurons = {64, 64};
          cand.epochs = 100;
          cand.val_split = 0.2;
          cand.patience = 15;
          cand.learn_rate = lr;
          grid.push_back(cand);
        }
      }
    }
  }
  bool same_set = grid.size() == r4.grid.size() &&
                  std::all_of(grid.begin(), grid.end(), [&](const TuneCandidate& g) {
                    return std::count(r4.grid.begin(), r4.grid.end(), g) == 1;
                  });
  c.check(same_set, std::to_string(r4.grid.size()) + " candidates enumerated");
  // Candidates see the curves smoothed once, exactly as a fit would smooth them.
  FnnData smoothed;
  {
    const auto& raw = std::get<std::vector<RawCurves>>(s.data.func_cov).front();
    const auto basis = default_smoothing_basis(raw.num_points(), o.domain);
    FunctionalDataSet fd;
    fd.covariates.push_back({basis, smooth_curves(raw, basis)});
    smoothed.func_cov = std::move(fd);
    smoothed.resp = s.data.resp;
  }
  bool matches = same_set;
  std::size_t best = 0;
  for (std::size_t i = 0; i < r4.grid.size() && matches; ++i) {
    const auto cfg = candidate_config(r4.grid[i], i, settings, ResponseMode::regression);
    const double mspe = fnn_cv(cfg, smoothed, plan).overall_mspe;
    matches = mspe == r4.mspe[i];
    if (mspe < r4.mspe[best]) best = i;
  }
  c.check(matches && best == r4.best_index, "exhaustive re-evaluation matches");
  c.check(r1.mspe == r4.mspe && r1.best_index == r4.best_index, "workers 1 == workers 4");
  const double t = seconds_since(start);
  c.check(t < 600.0, fmt("%.1fs < 600s", t));
  return c.out;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(FNN_CLI_PATH) + " " + args + " --quiet";
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& p) { return read_file(p.string()); }

struct CliFixture {
  fs::path dir;
  CliFixture() {
    dir = fs::temp_directory_path() / ("fnn_accept_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    run_cli("synth --kind regression --n 150 --seed 4 --out-dir " + dir.string());
  }
  ~CliFixture() { fs::remove_all(dir); }
  std::string fit_args(const std::string& model, const std::string& history) const {
    return "fit --raw-data --domain 0:1 --func-cov " + (dir / "curves.csv").string() +
           " --resp " + (dir / "resp.csv").string() + " --seed 7 --out " +
           (dir / model).string() + " --history " + (dir / history).string();
  }
};

// 9. Identical flags and seed give identical files.
Outcome determinism(const CliFixture& fx) {
  Checker c;
  const int a = run_cli(fx.fit_args("m1.json", "h1.csv"));
  const int b = run_cli(fx.fit_args("m2.json", "h2.csv"));
  c.check(a == 0 && b == 0, "both fits exit 0");
  c.check(slurp(fx.dir / "m1.json") == slurp(fx.dir / "m2.json"), "model files identical");
  c.check(slurp(fx.dir / "h1.csv") == slurp(fx.dir / "h2.csv"), "history tables identical");
  run_cli("weights --model " + (fx.dir / "m1.json").string() + " --out " + (fx.dir / "w1.csv").string());
  run_cli("weights --model " + (fx.dir / "m2.json").string() + " --out " + (fx.dir / "w2.csv").string());
  c.check(slurp(fx.dir / "w1.csv") == slurp(fx.dir / "w2.csv"), "weight tables identical");
  return c.out;
}

// 10. Wall-clock envelope for the CLI workflow.
Outcome runtime_envelope(const CliFixture& fx) {
  Checker c;
  auto start = Clock::now();
  const int fit = run_cli(fx.fit_args("rt.json", "rt_hist.csv"));
  const double t_fit = seconds_since(start);
  start = Clock::now();
  const int pred = run_cli("predict --raw-data --domain 0:1 --func-cov " +
                           (fx.dir / "curves.csv").string() + " --model " +
                           (fx.dir / "rt.json").string() + " --out " + (fx.dir / "pred.csv").string());
  const double t_pred = seconds_since(start);
  start = Clock::now();
  const int w = run_cli("weights --model " + (fx.dir / "rt.json").string() + " --out " +
                        (fx.dir / "rt_w.csv").string());
  const double t_w = seconds_since(start);
  c.check(fit == 0 && t_fit < 15.0, fmt("fit %.2fs < 15s", t_fit));
  c.check(pred == 0 && t_pred < 3.0, fmt("predict %.2fs < 3s", t_pred));
  c.check(w == 0 && t_w < 1.0, fmt("weights %.2fs < 1s", t_w));
  return c.out;
}

}  // namespace

int main() {
  const CliFixture fixture;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 parameter counts", parameter_counts},
      {"2 quadrature oracle", quadrature_oracle},
      {"3 gradient correctness", gradient_check},
      {"4 basis properties", basis_properties},
      {"5 synthetic regression", synthetic_regression},
      {"6 synthetic classification", synthetic_classification},
      {"7 cv correctness", cv_correctness},
      {"8 tuning", tuning},
      {"9 determinism", [&] { return determinism(fixture); }},
      {"10 runtime envelope", [&] { return runtime_envelope(fixture); }},
  };
  int failures = 0;
  for (const auto& [name, run] : criteria) {
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& e) {
      out = {false, std::string("threw: ") + e.what()};
    }
    failures += out.pass ? 0 : 1;
    std::cout << (out.pass ? "PASS " : "FAIL ") << name << ": " << out.detail << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
