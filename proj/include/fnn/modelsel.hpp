#pragma once

#include "fnn/model.hpp"

#include <cstdint>

namespace fnn {

struct FoldPlan {
  int nfolds = 0;
  std::uint64_t seed = 0;
  /// Fold (0-based) of every observation.
  std::vector<int> assignments;

  /// Observations of fold k in increasing order.
  std::vector<Eigen::Index> members(int k) const;
  /// Observations outside fold k in increasing order.
  std::vector<Eigen::Index> complement(int k) const;
};

/// Seeded uniform shuffle of 0..n-1 followed by round-robin assignment.
FoldPlan make_folds(Eigen::Index n, int nfolds, std::uint64_t seed);

struct CvResult {
  double overall_mspe = 0.0;
  std::vector<double> per_fold_mspe;
  FoldPlan folds;
  /// Out-of-fold predictions for every observation (N x R).
  Matrix predictions;
  /// Numeric targets the predictions were scored against (one-hot for classes).
  Matrix targets;
};

/// Targets used for scoring: the response values, or one-hot columns in
/// first-appearance order for class labels.
Matrix scoring_targets(const Response& resp, ResponseMode mode);

/// sum_k sum_{l in S_k} ||yhat_l - y_l||^2 / (|S_k| K), together with the
/// per-fold means.
double pooled_mspe(const Matrix& predictions, const Matrix& targets,
                   const FoldPlan& folds, std::vector<double>* per_fold = nullptr);

/// Trains on the complement of every fold and scores its held-out rows.
/// Emits a fold_done progress event after each fold.
CvResult fnn_cv(const FnnConfig& config, const FnnData& data, int nfolds,
                std::uint64_t fold_seed, const ProgressFn& progress = {});
CvResult fnn_cv(const FnnConfig& config, const FnnData& data,
                const FoldPlan& folds, const ProgressFn& progress = {});

/// Hyperparameter axes, named after the tuning list they mirror.
struct TuneList {
  std::vector<int> num_hidden_layers;
  std::vector<int> neurons;
  std::vector<int> epochs;
  std::vector<double> val_split;
  std::vector<int> patience;
  std::vector<double> learn_rate;
  std::vector<int> num_basis;
  std::vector<Activation> activation_choice;
};

/// One fully resolved grid row.
struct TuneCandidate {
  int hidden_layers = 0;
  std::vector<Activation> activations;  // per layer
  std::vector<int> num_basis;           // per covariate
  std::vector<int> neurons;             // per layer
  int epochs = 0;
  double val_split = 0.0;
  int patience = 0;
  double learn_rate = 0.0;

  bool operator==(const TuneCandidate&) const = default;
};

/// Number of candidates for a given layer count.
std::size_t grid_size(const TuneList& list, int hidden_layers,
                      std::size_t num_covariates);

/// Cartesian product per layer count, per-layer replication of neurons and
/// activations, per-covariate replication of num_basis. Axes vary
/// lexicographically in declaration order (the earliest axis varies slowest).
std::vector<TuneCandidate> expand_grid(const TuneList& list,
                                       std::size_t num_covariates);

struct TuneSettings {
  std::vector<BasisKind> basis_choice;  // one per covariate, or a single entry
  std::vector<Domain> domain_ranges;
  int batch_size = 32;
  double decay_rate = 0.0;
  int nfolds = 5;
  int workers = 4;
  bool raw_data = false;
  std::uint64_t seed = 1;
  int rule_points = QuadratureRule::kDefaultPoints;
};

/// Config a candidate is trained with: early stopping on, candidate values
/// for every tuned knob, settings for the rest, train seed = seed + index.
FnnConfig candidate_config(const TuneCandidate& candidate, std::size_t index,
                           const TuneSettings& settings, ResponseMode mode);

struct TuneResult {
  std::vector<TuneCandidate> grid;
  std::vector<double> mspe;           // +inf for failed candidates
  std::vector<std::string> failures;  // empty message when the candidate ran
  std::size_t best_index = 0;
  /// (hidden layer count, best candidate index) per layer choice.
  std::vector<std::pair<int, std::size_t>> best_per_layers;
  FoldPlan folds;

  const TuneCandidate& best() const { return grid[best_index]; }
  double best_mspe() const { return mspe[best_index]; }
};

/// Grid search: every candidate is scored by fnn_cv on one shared fold plan
/// and the lowest MSPE wins (earliest index on ties). Results do not depend on
/// the worker count.
TuneResult fnn_tune(const TuneList& list, const FnnData& data,
                    ResponseMode mode, const TuneSettings& settings,
                    const ProgressFn& progress = {});

}  // namespace fnn
