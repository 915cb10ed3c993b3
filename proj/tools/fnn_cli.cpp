// Command-line front end: fit | predict | cv | tune | weights | curves | synth.
//
// Exit codes: 0 success, 1 validation or usage error, 2 numerical failure.
// Progress and reports go to stderr/stdout; data only to the files named by
// the flags.

#include "fnn/io.hpp"
#include "fnn/modelsel.hpp"
#include "fnn/synth.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>

namespace {

using namespace fnn;

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct SharedOptions {
  std::vector<std::string> func_cov;
  std::string scalar_cov;
  std::string resp;
  std::string mode = "regression";
  std::vector<std::string> domains;
  bool raw_data = false;
  std::uint64_t seed = 1;
  bool quiet = false;
  std::string out;
};

struct FitOptions {
  std::vector<std::string> basis{"fourier"};
  std::vector<int> num_basis{7};
  int hidden_layers = 2;
  std::vector<int> neurons;              // empty: library default
  std::vector<std::string> activations;  // empty: library default
  std::vector<double> dropout;
  int epochs = 100;
  double learn_rate = 1e-3;
  double decay_rate = 0.0;
  int batch_size = 32;
  double val_split = 0.2;
  bool early_stopping = true;
  int patience = 15;
  int rule_points = QuadratureRule::kDefaultPoints;
  std::string history;
};

void add_shared(CLI::App* app, SharedOptions& o, bool needs_resp) {
  app->add_option("--func-cov", o.func_cov, "Functional covariate file (repeatable)")
      ->required()
      ->check(CLI::ExistingFile);
  app->add_option("--scalar-cov", o.scalar_cov, "Scalar covariate table (N x J)")
      ->check(CLI::ExistingFile);
  if (needs_resp) {
    app->add_option("--resp", o.resp, "Response file")->required()->check(CLI::ExistingFile);
    app->add_option("--mode", o.mode, "regression | classification | functional")
        ->check(CLI::IsMember({"regression", "classification", "functional"}));
  }
  app->add_option("--domain", o.domains, "Domain range a:b per covariate (repeatable)");
  app->add_flag("--raw-data", o.raw_data, "Covariate files hold sampled curves");
  app->add_option("--seed", o.seed, "Random seed");
  app->add_flag("--quiet", o.quiet, "Suppress all non-error output");
  app->add_option("--out", o.out, "Output file");
}

void add_fit(CLI::App* app, FitOptions& f) {
  app->add_option("--basis", f.basis, "Weight basis kind per covariate (fourier | bspline)");
  app->add_option("--num-basis", f.num_basis, "Weight basis size per covariate");
  app->add_option("--hidden-layers", f.hidden_layers, "Number of hidden layers");
  app->add_option("--neurons", f.neurons, "Units per hidden layer");
  app->add_option("--activations", f.activations, "Activation per hidden layer");
  app->add_option("--dropout", f.dropout, "Dropout rate per hidden layer");
  app->add_option("--epochs", f.epochs, "Training epochs");
  app->add_option("--learn-rate", f.learn_rate, "Learning rate");
  app->add_option("--decay-rate", f.decay_rate, "Learning-rate decay");
  app->add_option("--batch-size", f.batch_size, "Mini-batch size");
  app->add_option("--val-split", f.val_split, "Validation fraction (tail rows)");
  app->add_option("--early-stopping", f.early_stopping, "Stop on validation plateau (true|false)");
  app->add_option("--patience", f.patience, "Early-stopping patience");
  app->add_option("--rule-points", f.rule_points, "Simpson nodes per covariate");
}

Domain parse_domain(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) {
    throw ValidationError("domain '" + text + "' must look like a:b");
  }
  try {
    std::size_t used = 0;
    const double lo = std::stod(text.substr(0, colon), &used);
    if (used != colon) throw std::invalid_argument("lo");
    const std::string hi_text = text.substr(colon + 1);
    const double hi = std::stod(hi_text, &used);
    if (used != hi_text.size()) throw std::invalid_argument("hi");
    return make_domain(lo, hi);
  } catch (const std::logic_error&) {
    throw ValidationError("domain '" + text + "' must look like a:b");
  }
}

std::vector<Domain> parse_domains(const std::vector<std::string>& texts) {
  std::vector<Domain> out;
  for (const auto& t : texts) out.push_back(parse_domain(t));
  return out;
}

FunctionalInput load_func_cov(const SharedOptions& o) {
  if (o.raw_data) {
    std::vector<RawCurves> raw;
    for (const auto& path : o.func_cov) raw.push_back(load_curves(path));
    return raw;
  }
  FunctionalDataSet fd;
  for (const auto& path : o.func_cov) {
    auto part = load_tensor(path);
    for (auto& c : part.covariates) fd.covariates.push_back(std::move(c));
  }
  fd.validate();
  return fd;
}

// Tensor files carry their own domains; raw curves need --domain.
std::vector<Domain> resolve_domains(const SharedOptions& o, const FunctionalInput& input) {
  auto domains = parse_domains(o.domains);
  const std::size_t k = num_covariates(input);
  if (domains.empty() && !o.raw_data) {
    for (const auto& c : std::get<FunctionalDataSet>(input).covariates) {
      domains.push_back(c.basis.domain());
    }
  }
  if (domains.size() == 1 && k > 1) domains.assign(k, domains.front());
  if (domains.size() != k) {
    throw ValidationError("got " + std::to_string(domains.size()) + " --domain values for " +
                          std::to_string(k) + " functional covariates");
  }
  return domains;
}

FnnData load_data(const SharedOptions& o, ResponseMode mode, bool with_resp) {
  FnnData data;
  data.func_cov = load_func_cov(o);
  if (!o.scalar_cov.empty()) data.scalar_cov = load_matrix(o.scalar_cov);
  if (with_resp) {
    if (mode == ResponseMode::classification) {
      data.resp = Response::classes(load_labels(o.resp));
    } else {
      Matrix y = load_matrix(o.resp);
      if (mode == ResponseMode::regression && y.cols() != 1) {
        throw ValidationError(o.resp + ": regression response needs exactly one column");
      }
      data.resp = mode == ResponseMode::regression ? Response::scalar(y.col(0))
                                                   : Response::functional(std::move(y));
    }
  }
  return data;
}

FnnConfig build_config(const SharedOptions& o, const FitOptions& f,
                       const std::vector<Domain>& domains) {
  FnnConfig c;
  c.weight_bases.clear();
  const std::size_t n = std::max(f.basis.size(), f.num_basis.size());
  for (std::size_t k = 0; k < n; ++k) {
    const auto& kind = f.basis.size() == 1 ? f.basis.front() : f.basis.at(k);
    const int m = f.num_basis.size() == 1 ? f.num_basis.front() : f.num_basis.at(k);
    c.weight_bases.push_back({parse_basis_kind(kind), m});
  }
  if (f.basis.size() > 1 && f.num_basis.size() > 1 && f.basis.size() != f.num_basis.size()) {
    throw ValidationError("--basis and --num-basis list lengths differ");
  }
  c.hidden_layers = f.hidden_layers;
  const auto layers = static_cast<std::size_t>(std::max(f.hidden_layers, 0));
  c.neurons = f.neurons.empty() ? std::vector<int>(layers, 64) : f.neurons;
  c.activations.assign(f.activations.empty() ? layers : 0, Activation::relu);
  for (const auto& a : f.activations) c.activations.push_back(parse_activation(a));
  c.dropout = f.dropout;
  c.response_mode = parse_response_mode(o.mode);
  c.domain_ranges = domains;
  c.raw_data = o.raw_data;
  c.rule_points = f.rule_points;
  c.train.epochs = f.epochs;
  c.train.learn_rate = f.learn_rate;
  c.train.decay_rate = f.decay_rate;
  c.train.batch_size = f.batch_size;
  c.train.validation_split = f.val_split;
  c.train.early_stopping = f.early_stopping;
  c.train.patience = f.patience;
  c.train.seed = o.seed;
  return c;
}

// Renders progress events in the style "|+++...+| 100".
class ProgressPrinter {
 public:
  explicit ProgressPrinter(bool quiet) : quiet_(quiet) {}

  ProgressFn fn() {
    if (quiet_) return {};
    return [this](const ProgressEvent& ev) { on_event(ev); };
  }

 private:
  void on_event(const ProgressEvent& ev) {
    std::lock_guard<std::mutex> lock(mutex_);
    switch (ev.kind) {
      case ProgressEvent::Kind::integrals:
        if (ev.index == 1 && ev.fraction == 0.0) std::cerr << "Evaluating Integrals:\n";
        if (ev.fraction >= 1.0) std::cerr << bar(1.0) << "\n";
        break;
      case ProgressEvent::Kind::fold_done:
        std::cerr << "Folds Done: " << ev.index << "\n";
        break;
      case ProgressEvent::Kind::tune:
        std::cerr << "\r" << bar(ev.fraction) << (ev.index == ev.total ? "\n" : "")
                  << std::flush;
        break;
    }
  }

  static std::string bar(double fraction) {
    const int width = 50;
    const int filled = static_cast<int>(fraction * width + 1e-9);
    return "  |" + std::string(static_cast<std::size_t>(filled), '+') +
           std::string(static_cast<std::size_t>(width - filled), ' ') + "| " +
           std::to_string(static_cast<int>(fraction * 100 + 1e-9));
  }

  bool quiet_;
  std::mutex mutex_;
};

Reporter make_reporter(ProgressPrinter& printer, bool quiet) {
  Reporter r;
  r.progress = printer.fn();
  if (!quiet) r.warning = [](const std::string& w) { std::cerr << "Warning: " << w << "\n"; };
  return r;
}

std::string format_list(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? " " : "") + items[i];
  return out;
}

template <typename T>
std::vector<std::string> to_strings(const std::vector<T>& values) {
  std::vector<std::string> out;
  for (const auto& v : values) {
    if constexpr (std::is_same_v<T, Activation>) {
      out.emplace_back(to_string(v));
    } else if constexpr (std::is_floating_point_v<T>) {
      out.push_back(format_double(v));
    } else {
      out.push_back(std::to_string(v));
    }
  }
  return out;
}

int run_fit(const SharedOptions& o, const FitOptions& f) {
  if (o.out.empty()) throw ValidationError("fit needs --out for the model file");
  const auto mode = parse_response_mode(o.mode);
  const FnnData data = load_data(o, mode, true);
  const FnnConfig config = build_config(o, f, resolve_domains(o, data.func_cov));
  ProgressPrinter printer(o.quiet);
  const FnnModel model = fnn_fit(data, config, make_reporter(printer, o.quiet));
  save_model(model, o.out);
  if (!f.history.empty()) emit_plots(model, PlotKind::history, f.history);
  if (!o.quiet) std::cerr << format_summary(summarize(model.params));
  return 0;
}

int run_predict(const SharedOptions& o, const std::string& model_path) {
  if (o.out.empty()) throw ValidationError("predict needs --out for the predictions");
  const FnnModel model = load_model(model_path);
  FnnData data = load_data(o, model.config.response_mode, false);
  if (!o.domains.empty() && parse_domains(o.domains) != model.config.domain_ranges) {
    throw DomainError("--domain does not match the domains the model was trained on");
  }
  ProgressPrinter printer(o.quiet);
  const Matrix pred = fnn_predict(model, data.func_cov, data.scalar_cov, printer.fn());
  std::vector<std::string> header;
  if (model.config.response_mode == ResponseMode::classification) {
    for (const auto& l : model.response.class_labels) header.push_back("p_" + l);
  } else if (model.config.response_mode == ResponseMode::functional) {
    for (Eigen::Index j = 0; j < pred.cols(); ++j) header.push_back("c_" + std::to_string(j + 1));
  } else {
    header.push_back("yhat");
  }
  write_matrix(pred, o.out, header);
  return 0;
}

int run_cv(const SharedOptions& o, const FitOptions& f, int nfolds,
           const std::string& folds_out) {
  const auto mode = parse_response_mode(o.mode);
  const FnnData data = load_data(o, mode, true);
  const FnnConfig config = build_config(o, f, resolve_domains(o, data.func_cov));
  ProgressPrinter printer(o.quiet);
  const CvResult cv = fnn_cv(config, data, nfolds, o.seed, printer.fn());
  if (!o.out.empty()) {
    std::string table = "fold,size,mspe\n";
    for (int k = 0; k < cv.folds.nfolds; ++k) {
      table += std::to_string(k + 1) + "," + std::to_string(cv.folds.members(k).size()) + "," +
               format_double(cv.per_fold_mspe[static_cast<std::size_t>(k)]) + "\n";
    }
    table += "overall," + std::to_string(cv.folds.assignments.size()) + "," +
             format_double(cv.overall_mspe) + "\n";
    write_file(o.out, table);
  }
  if (!folds_out.empty()) {
    std::string table = "observation,fold\n";
    for (std::size_t i = 0; i < cv.folds.assignments.size(); ++i) {
      table += std::to_string(i + 1) + "," + std::to_string(cv.folds.assignments[i] + 1) + "\n";
    }
    write_file(folds_out, table);
  }
  if (!o.quiet) {
    std::cout << "Overall MSPE: " << format_double(cv.overall_mspe) << "\n";
    for (std::size_t k = 0; k < cv.per_fold_mspe.size(); ++k) {
      std::cout << "Fold " << k + 1 << " MSPE: " << format_double(cv.per_fold_mspe[k]) << "\n";
    }
  }
  return 0;
}

int run_tune(const SharedOptions& o, const std::string& grid_path, int workers, int nfolds,
             const std::vector<std::string>& basis, int batch_size, double decay_rate) {
  const auto mode = parse_response_mode(o.mode);
  const TuneList list = load_grid(grid_path);
  const FnnData data = load_data(o, mode, true);
  TuneSettings settings;
  for (const auto& b : basis) settings.basis_choice.push_back(parse_basis_kind(b));
  settings.domain_ranges = resolve_domains(o, data.func_cov);
  settings.batch_size = batch_size;
  settings.decay_rate = decay_rate;
  settings.nfolds = nfolds;
  settings.workers = workers;
  settings.raw_data = o.raw_data;
  settings.seed = o.seed;
  ProgressPrinter printer(o.quiet);
  const TuneResult result = fnn_tune(list, data, mode, settings, printer.fn());

  if (!o.out.empty()) {
    int max_layers = 0;
    for (int l : list.num_hidden_layers) max_layers = std::max(max_layers, l);
    const std::size_t k = num_covariates(data.func_cov);
    std::vector<std::string> header;
    for (int l = 1; l <= max_layers; ++l) header.push_back("L" + std::to_string(l) + "_Act");
    for (std::size_t c = 1; c <= k; ++c) header.push_back("FW_" + std::to_string(c));
    for (int l = 1; l <= max_layers; ++l) header.push_back("L" + std::to_string(l) + "_N");
    for (const char* h : {"Epochs", "ValSplit", "Patience", "LearnRate", "MSPE"}) header.push_back(h);
    std::string table = format_list(header);
    std::replace(table.begin(), table.end(), ' ', ',');
    table += "\n";
    for (std::size_t i = 0; i < result.grid.size(); ++i) {
      const auto& c = result.grid[i];
      std::vector<std::string> row;
      for (int l = 0; l < max_layers; ++l) {
        row.push_back(l < c.hidden_layers ? std::string(to_string(c.activations[static_cast<std::size_t>(l)])) : "");
      }
      for (int m : c.num_basis) row.push_back(std::to_string(m));
      for (int l = 0; l < max_layers; ++l) {
        row.push_back(l < c.hidden_layers ? std::to_string(c.neurons[static_cast<std::size_t>(l)]) : "");
      }
      row.push_back(std::to_string(c.epochs));
      row.push_back(format_double(c.val_split));
      row.push_back(std::to_string(c.patience));
      row.push_back(format_double(c.learn_rate));
      row.push_back(std::isfinite(result.mspe[i]) ? format_double(result.mspe[i]) : "inf");
      for (std::size_t j = 0; j < row.size(); ++j) table += (j ? "," : "") + row[j];
      table += "\n";
    }
    write_file(o.out, table);
  }
  if (!o.quiet) {
    const auto& b = result.best();
    std::cout << "$MSPE\n" << format_double(result.best_mspe()) << "\n\n"
              << "$num_basis\n" << format_list(to_strings(b.num_basis)) << "\n\n"
              << "$hidden_layers\n" << b.hidden_layers << "\n\n"
              << "$neurons_per_layer\n" << format_list(to_strings(b.neurons)) << "\n\n"
              << "$activations_in_layers\n" << format_list(to_strings(b.activations)) << "\n\n"
              << "$epochs\n" << b.epochs << "\n\n"
              << "$val_split\n" << format_double(b.val_split) << "\n\n"
              << "$patience_param\n" << b.patience << "\n\n"
              << "$learn_rate\n" << format_double(b.learn_rate) << "\n";
    for (const auto& [layers, index] : result.best_per_layers) {
      std::cout << "\nbest with " << layers << " hidden layers: candidate " << index + 1
                << " (MSPE " << format_double(result.mspe[index]) << ")\n";
    }
  }
  return 0;
}

int run_synth(const std::string& kind, const SynthOptions& options, const std::string& dir,
              bool quiet) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  SynthData s;
  if (kind == "regression") s = synth_regression(options);
  else if (kind == "classification") s = synth_classification(options);
  else s = synth_functional(options);

  const auto path = [&](const char* name) { return (fs::path(dir) / name).string(); };
  write_curves(std::get<std::vector<RawCurves>>(s.data.func_cov).front(), path("curves.csv"));
  write_tensor(s.tensor, path("tensor.csv"));
  if (s.mode == ResponseMode::classification) {
    write_labels(s.data.resp.labels, path("resp.csv"));
  } else {
    write_matrix(s.data.resp.values, path("resp.csv"));
  }
  if (s.data.scalar_cov) write_matrix(*s.data.scalar_cov, path("scalar.csv"));
  const auto grid = linspace(options.domain.lo, options.domain.hi, kWeightGridPoints);
  const Vector beta = basis_eval(s.beta_basis, grid) * s.beta_coefs;
  Matrix table(static_cast<Eigen::Index>(grid.size()), 2);
  for (std::size_t q = 0; q < grid.size(); ++q) {
    table(static_cast<Eigen::Index>(q), 0) = grid[q];
    table(static_cast<Eigen::Index>(q), 1) = beta[static_cast<Eigen::Index>(q)];
  }
  write_matrix(table, path("beta.csv"), {"t", "beta"});
  if (!quiet) std::cerr << "wrote " << kind << " dataset (" << options.n << " observations) to " << dir << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional neural networks: fit, predict, cross-validate and tune"};
  app.require_subcommand(1);

  SharedOptions shared;
  FitOptions fit_opts;

  auto* fit = app.add_subcommand("fit", "Train a model and write it to --out");
  add_shared(fit, shared, true);
  add_fit(fit, fit_opts);
  fit->add_option("--history", fit_opts.history, "Write the training-history table here");

  std::string model_path;
  auto* predict = app.add_subcommand("predict", "Predict with a saved model");
  add_shared(predict, shared, false);
  predict->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);

  int nfolds = 5;
  std::string folds_out;
  auto* cv = app.add_subcommand("cv", "k-fold cross-validated MSPE");
  add_shared(cv, shared, true);
  add_fit(cv, fit_opts);
  cv->add_option("--nfolds", nfolds, "Number of folds");
  cv->add_option("--folds-out", folds_out, "Write the fold assignment of every observation");

  std::string grid_path;
  int workers = 4;
  int batch_size = 32;
  double decay_rate = 0.0;
  std::vector<std::string> tune_basis{"fourier"};
  auto* tune = app.add_subcommand("tune", "Grid search over a tuning list");
  add_shared(tune, shared, true);
  tune->add_option("--grid", grid_path, "Grid file")->required()->check(CLI::ExistingFile);
  tune->add_option("--workers", workers, "Concurrent candidate evaluations");
  tune->add_option("--nfolds", nfolds, "Number of folds");
  tune->add_option("--basis", tune_basis, "Weight basis kind per covariate");
  tune->add_option("--batch-size", batch_size, "Mini-batch size");
  tune->add_option("--decay-rate", decay_rate, "Learning-rate decay");

  std::string weights_kind = "weights";
  auto* weights = app.add_subcommand("weights", "Emit functional weights or training history");
  weights->add_option("--model", model_path, "Model file")->required()->check(CLI::ExistingFile);
  weights->add_option("--kind", weights_kind, "weights | history")
      ->check(CLI::IsMember({"weights", "history"}));
  weights->add_option("--out", shared.out, "Output table")->required();
  weights->add_flag("--quiet", shared.quiet, "Suppress all non-error output");

  std::string pred_path;
  std::string curve_domain = "0:1";
  double step = 0.05;
  std::string curve_basis = "fourier";
  auto* curves = app.add_subcommand("curves", "Evaluate predicted response coefficients");
  curves->add_option("--pred", pred_path, "Prediction table (N x M_resp, with header)")
      ->required()
      ->check(CLI::ExistingFile);
  curves->add_option("--domain", curve_domain, "Response domain a:b");
  curves->add_option("--step", step, "Grid step");
  curves->add_option("--basis", curve_basis, "Response basis kind");
  curves->add_option("--out", shared.out, "Output table")->required();
  curves->add_flag("--quiet", shared.quiet, "Suppress all non-error output");

  std::string synth_kind = "regression";
  std::string synth_dir;
  SynthOptions synth_opts;
  auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic dataset");
  synth->add_option("--kind", synth_kind, "regression | classification | functional")
      ->check(CLI::IsMember({"regression", "classification", "functional"}));
  synth->add_option("--n", synth_opts.n, "Observations");
  synth->add_option("--points", synth_opts.points, "Sample points per curve");
  synth->add_option("--noise", synth_opts.noise_sd, "Response noise standard deviation");
  synth->add_option("--seed", synth_opts.seed, "Random seed");
  synth->add_option("--out-dir", synth_dir, "Output directory")->required();
  synth->add_flag("--quiet", shared.quiet, "Suppress all non-error output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitValidation;
  }

  try {
    if (*fit) return run_fit(shared, fit_opts);
    if (*predict) return run_predict(shared, model_path);
    if (*cv) return run_cv(shared, fit_opts, nfolds, folds_out);
    if (*tune) {
      return run_tune(shared, grid_path, workers, nfolds, tune_basis, batch_size, decay_rate);
    }
    if (*weights) {
      emit_plots(load_model(model_path), parse_plot_kind(weights_kind), shared.out);
      return 0;
    }
    if (*curves) {
      Matrix pred = [&] {
        auto rows = read_file(pred_path);
        // Drop the header row written by predict.
        const auto nl = rows.find('\n');
        const std::string body = nl == std::string::npos ? "" : rows.substr(nl + 1);
        const std::string tmp = pred_path + ".body.tmp";
        write_file(tmp, body);
        Matrix m;
        try {
          m = load_matrix(tmp);
        } catch (...) {
          std::remove(tmp.c_str());
          throw;
        }
        std::remove(tmp.c_str());
        return m;
      }();
      emit_plots(curve_predictions(pred, parse_domain(curve_domain), step,
                                   parse_basis_kind(curve_basis)),
                 shared.out);
      return 0;
    }
    if (*synth) return run_synth(synth_kind, synth_opts, synth_dir, shared.quiet);
  } catch (const NumericalError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}
