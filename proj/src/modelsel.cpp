#include "fnn/modelsel.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

namespace fnn {

std::vector<Eigen::Index> FoldPlan::members(int k) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] == k) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

std::vector<Eigen::Index> FoldPlan::complement(int k) const {
  std::vector<Eigen::Index> out;
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    if (assignments[i] != k) out.push_back(static_cast<Eigen::Index>(i));
  }
  return out;
}

FoldPlan make_folds(Eigen::Index n, int nfolds, std::uint64_t seed) {
  if (nfolds < 2) {
    throw ValidationError("cross-validation needs at least 2 folds, got " +
                          std::to_string(nfolds));
  }
  if (nfolds > n) {
    throw ValidationError("cannot split " + std::to_string(n) + " observations into " +
                          std::to_string(nfolds) + " folds");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  FoldPlan plan;
  plan.nfolds = nfolds;
  plan.seed = seed;
  plan.assignments.assign(static_cast<std::size_t>(n), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    plan.assignments[static_cast<std::size_t>(order[pos])] =
        static_cast<int>(pos % static_cast<std::size_t>(nfolds));
  }
  return plan;
}

Matrix scoring_targets(const Response& resp, ResponseMode mode) {
  if (mode != ResponseMode::classification) return resp.values;
  std::vector<std::string> labels;
  for (const auto& l : resp.labels) {
    if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
  }
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(resp.labels.size()),
                            static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < resp.labels.size(); ++i) {
    const auto col = std::find(labels.begin(), labels.end(), resp.labels[i]) - labels.begin();
    out(static_cast<Eigen::Index>(i), col) = 1.0;
  }
  return out;
}

double pooled_mspe(const Matrix& predictions, const Matrix& targets,
                   const FoldPlan& folds, std::vector<double>* per_fold) {
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols() ||
      predictions.rows() != static_cast<Eigen::Index>(folds.assignments.size())) {
    throw ValidationError("predictions, targets and fold plan disagree in shape");
  }
  std::vector<double> sums(static_cast<std::size_t>(folds.nfolds), 0.0);
  std::vector<double> sizes(static_cast<std::size_t>(folds.nfolds), 0.0);
  for (Eigen::Index i = 0; i < predictions.rows(); ++i) {
    const auto k = static_cast<std::size_t>(folds.assignments[static_cast<std::size_t>(i)]);
    sums[k] += (predictions.row(i) - targets.row(i)).squaredNorm();
    sizes[k] += 1.0;
  }
  double total = 0.0;
  if (per_fold) per_fold->clear();
  for (std::size_t k = 0; k < sums.size(); ++k) {
    const double fold_mean = sums[k] / sizes[k];
    if (per_fold) per_fold->push_back(fold_mean);
    total += sums[k] / (sizes[k] * static_cast<double>(folds.nfolds));
  }
  return total;
}

CvResult fnn_cv(const FnnConfig& config, const FnnData& data, int nfolds,
                std::uint64_t fold_seed, const ProgressFn& progress) {
  return fnn_cv(config, data, make_folds(data.n_obs(), nfolds, fold_seed), progress);
}

CvResult fnn_cv(const FnnConfig& config, const FnnData& data,
                const FoldPlan& folds, const ProgressFn& progress) {
  const Eigen::Index n = data.n_obs();
  if (static_cast<Eigen::Index>(folds.assignments.size()) != n) {
    throw ValidationError("fold plan covers " + std::to_string(folds.assignments.size()) +
                          " observations, data has " + std::to_string(n));
  }
  CvResult result;
  result.folds = folds;
  result.targets = scoring_targets(data.resp, config.response_mode);
  if (result.targets.rows() != n) {
    throw ValidationError("response has " + std::to_string(result.targets.rows()) +
                          " observations, covariates have " + std::to_string(n));
  }
  // Global class order, so fold models with a different first-appearance
  // order still score against the right columns.
  std::vector<std::string> labels;
  if (config.response_mode == ResponseMode::classification) {
    for (const auto& l : data.resp.labels) {
      if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
    }
  }
  result.predictions = Matrix::Zero(n, result.targets.cols());

  for (int k = 0; k < folds.nfolds; ++k) {
    const auto test_rows = folds.members(k);
    const auto train_rows = folds.complement(k);
    const FnnData test = data.select(test_rows);
    Matrix pred;
    FnnModel model;
    try {
      model = fnn_fit(data.select(train_rows), config);
      pred = fnn_predict(model, test.func_cov, test.scalar_cov);
    } catch (const NumericalError& e) {
      throw NumericalError("fold " + std::to_string(k + 1) + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("fold " + std::to_string(k + 1) + ": " + e.what());
    }
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      const auto row = static_cast<Eigen::Index>(i);
      if (labels.empty()) {
        result.predictions.row(test_rows[i]) = pred.row(row);
        continue;
      }
      const auto& fold_labels = model.response.class_labels;
      for (std::size_t c = 0; c < fold_labels.size(); ++c) {
        const auto col = std::find(labels.begin(), labels.end(), fold_labels[c]) - labels.begin();
        result.predictions(test_rows[i], col) = pred(row, static_cast<Eigen::Index>(c));
      }
    }
    emit(progress, {ProgressEvent::Kind::fold_done, k + 1, folds.nfolds, 1.0});
  }
  result.overall_mspe =
      pooled_mspe(result.predictions, result.targets, folds, &result.per_fold_mspe);
  return result;
}

std::size_t grid_size(const TuneList& list, int hidden_layers,
                      std::size_t num_covariates) {
  auto pow = [](std::size_t base, std::size_t e) {
    std::size_t r = 1;
    for (std::size_t i = 0; i < e; ++i) r *= base;
    return r;
  };
  const auto layers = static_cast<std::size_t>(hidden_layers);
  return pow(list.neurons.size(), layers) * pow(list.activation_choice.size(), layers) *
         pow(list.num_basis.size(), num_covariates) * list.epochs.size() *
         list.val_split.size() * list.patience.size() * list.learn_rate.size();
}

std::vector<TuneCandidate> expand_grid(const TuneList& list,
                                       std::size_t num_covariates) {
  auto require = [](bool non_empty, const char* name) {
    if (!non_empty) throw ValidationError(std::string("tuning axis '") + name + "' is empty");
  };
  require(!list.num_hidden_layers.empty(), "num_hidden_layers");
  require(!list.neurons.empty(), "neurons");
  require(!list.epochs.empty(), "epochs");
  require(!list.val_split.empty(), "val_split");
  require(!list.patience.empty(), "patience");
  require(!list.learn_rate.empty(), "learn_rate");
  require(!list.num_basis.empty(), "num_basis");
  require(!list.activation_choice.empty(), "activation_choice");
  if (num_covariates == 0) throw ValidationError("tuning needs at least one covariate");

  std::vector<TuneCandidate> grid;
  for (int layers : list.num_hidden_layers) {
    if (layers < 0) throw ValidationError("hidden layer counts cannot be negative");
    const auto l = static_cast<std::size_t>(layers);
    // Odometer digits in declaration order; the last digit turns fastest.
    std::vector<std::size_t> radix;
    for (std::size_t i = 0; i < l; ++i) radix.push_back(list.neurons.size());
    radix.push_back(list.epochs.size());
    radix.push_back(list.val_split.size());
    radix.push_back(list.patience.size());
    radix.push_back(list.learn_rate.size());
    for (std::size_t i = 0; i < num_covariates; ++i) radix.push_back(list.num_basis.size());
    for (std::size_t i = 0; i < l; ++i) radix.push_back(list.activation_choice.size());

    std::vector<std::size_t> digit(radix.size(), 0);
    const std::size_t count = grid_size(list, layers, num_covariates);
    for (std::size_t c = 0; c < count; ++c) {
      TuneCandidate cand;
      cand.hidden_layers = layers;
      std::size_t d = 0;
      for (std::size_t i = 0; i < l; ++i) cand.neurons.push_back(list.neurons[digit[d++]]);
      cand.epochs = list.epochs[digit[d++]];
      cand.val_split = list.val_split[digit[d++]];
      cand.patience = list.patience[digit[d++]];
      cand.learn_rate = list.learn_rate[digit[d++]];
      for (std::size_t i = 0; i < num_covariates; ++i) {
        cand.num_basis.push_back(list.num_basis[digit[d++]]);
      }
      for (std::size_t i = 0; i < l; ++i) {
        cand.activations.push_back(list.activation_choice[digit[d++]]);
      }
      grid.push_back(std::move(cand));
      for (std::size_t i = radix.size(); i-- > 0;) {
        if (++digit[i] < radix[i]) break;
        digit[i] = 0;
      }
    }
  }
  return grid;
}

FnnConfig candidate_config(const TuneCandidate& candidate, std::size_t index,
                           const TuneSettings& settings, ResponseMode mode) {
  FnnConfig config;
  const std::size_t num_cov = candidate.num_basis.size();
  if (settings.basis_choice.size() != 1 && settings.basis_choice.size() != num_cov) {
    throw ValidationError("expected 1 or " + std::to_string(num_cov) +
                          " basis choices, got " +
                          std::to_string(settings.basis_choice.size()));
  }
  config.weight_bases.clear();
  for (std::size_t k = 0; k < num_cov; ++k) {
    const auto kind = settings.basis_choice.size() == 1 ? settings.basis_choice.front()
                                                        : settings.basis_choice[k];
    config.weight_bases.push_back({kind, candidate.num_basis[k]});
  }
  config.hidden_layers = candidate.hidden_layers;
  config.neurons = candidate.neurons;
  config.activations = candidate.activations;
  config.response_mode = mode;
  config.domain_ranges = settings.domain_ranges;
  config.raw_data = false;
  config.rule_points = settings.rule_points;
  config.train.epochs = candidate.epochs;
  config.train.batch_size = settings.batch_size;
  config.train.learn_rate = candidate.learn_rate;
  config.train.decay_rate = settings.decay_rate;
  config.train.validation_split = candidate.val_split;
  config.train.early_stopping = true;
  config.train.patience = candidate.patience;
  config.train.seed = settings.seed + index;
  return config;
}

TuneResult fnn_tune(const TuneList& list, const FnnData& data,
                    ResponseMode mode, const TuneSettings& settings,
                    const ProgressFn& progress) {
  const std::size_t num_cov = num_covariates(data.func_cov);
  if (settings.domain_ranges.size() != num_cov) {
    throw ValidationError("got " + std::to_string(settings.domain_ranges.size()) +
                          " domain ranges for " + std::to_string(num_cov) +
                          " functional covariates");
  }
  const bool is_raw = std::holds_alternative<std::vector<RawCurves>>(data.func_cov);
  if (is_raw != settings.raw_data) {
    throw ValidationError(settings.raw_data
                              ? "raw-data tuning expects sampled curves"
                              : "tuning expects a coefficient tensor unless raw data is set");
  }

  // Raw curves are smoothed once, not per candidate.
  FnnData prepared;
  const FnnData* source = &data;
  if (is_raw) {
    FunctionalDataSet fd;
    const auto& raw = std::get<std::vector<RawCurves>>(data.func_cov);
    for (std::size_t k = 0; k < raw.size(); ++k) {
      const auto basis = default_smoothing_basis(raw[k].num_points(), settings.domain_ranges[k]);
      fd.covariates.push_back({basis, smooth_curves(raw[k], basis)});
    }
    prepared.func_cov = std::move(fd);
    prepared.scalar_cov = data.scalar_cov;
    prepared.resp = data.resp;
    source = &prepared;
  }

  TuneResult result;
  result.grid = expand_grid(list, num_cov);
  result.folds = make_folds(source->n_obs(), settings.nfolds, settings.seed);
  const std::size_t total = result.grid.size();
  result.mspe.assign(total, std::numeric_limits<double>::infinity());
  result.failures.assign(total, std::string());

  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::size_t done = 0;
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        const FnnConfig config = candidate_config(result.grid[i], i, settings, mode);
        const double mspe = fnn_cv(config, *source, result.folds).overall_mspe;
        if (std::isfinite(mspe)) {
          result.mspe[i] = mspe;
        } else {
          result.failures[i] = "non-finite MSPE";
        }
      } catch (const std::exception& e) {
        result.failures[i] = e.what();
      }
      std::lock_guard<std::mutex> lock(progress_mutex);
      ++done;
      emit(progress, {ProgressEvent::Kind::tune, static_cast<int>(done),
                      static_cast<int>(total),
                      static_cast<double>(done) / static_cast<double>(total)});
    }
  };
  const auto threads = static_cast<std::size_t>(std::max(1, settings.workers));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(threads, total); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  bool any = false;
  for (std::size_t i = 0; i < total; ++i) {
    if (!std::isfinite(result.mspe[i])) continue;
    if (!any || result.mspe[i] < result.mspe[result.best_index]) result.best_index = i;
    any = true;
  }
  if (!any) {
    throw NumericalError("every tuning candidate failed; first error: " +
                         (total > 0 ? result.failures.front() : std::string("empty grid")));
  }
  for (int layers : list.num_hidden_layers) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < total; ++i) {
      if (result.grid[i].hidden_layers != layers || !std::isfinite(result.mspe[i])) continue;
      if (!best || result.mspe[i] < result.mspe[*best]) best = i;
    }
    if (best) result.best_per_layers.emplace_back(layers, *best);
  }
  return result;
}

}  // namespace fnn
