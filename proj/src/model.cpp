#include "fnn/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fnn {

namespace {

template <typename T>
std::vector<T> broadcast(const std::vector<T>& values, std::size_t count,
                         const std::string& what, Warnings* warnings) {
  if (values.size() == count) return values;
  if (values.size() == 1) {
    if (count > 1 && warnings) {
      warnings->push_back("only one " + what + " was specified; it will be repeated for all " +
                          std::to_string(count));
    }
    return std::vector<T>(count, values.front());
  }
  throw ValidationError("expected " + std::to_string(count) + " " + what +
                        " entries, got " + std::to_string(values.size()));
}

void check_raw_mode(const FunctionalInput& input, bool raw_data) {
  const bool is_raw = std::holds_alternative<std::vector<RawCurves>>(input);
  if (is_raw != raw_data) {
    throw ValidationError(raw_data
                              ? "raw-data mode expects sampled curves, got a coefficient tensor"
                              : "coefficient-tensor mode expects a coefficient tensor, got "
                                "sampled curves (set raw data mode)");
  }
}

void check_domains(const FunctionalDataSet& fd, const std::vector<Domain>& domains) {
  for (std::size_t k = 0; k < fd.num_covariates(); ++k) {
    if (!(fd.covariates[k].basis.domain() == domains[k])) {
      throw DomainError("covariate " + std::to_string(k + 1) +
                        " is defined on a different domain than its domain range");
    }
  }
}

// Raw curves are smoothed onto `bases` (filled from defaults when empty).
FunctionalDataSet to_tensor(const FunctionalInput& input,
                            const std::vector<Domain>& domains,
                            std::vector<BasisSystem>& bases) {
  if (const auto* fd = std::get_if<FunctionalDataSet>(&input)) {
    fd->validate();
    check_domains(*fd, domains);
    return *fd;
  }
  const auto& raw = std::get<std::vector<RawCurves>>(input);
  if (raw.empty()) throw ValidationError("no functional covariates supplied");
  const bool fill = bases.empty();
  FunctionalDataSet out;
  for (std::size_t k = 0; k < raw.size(); ++k) {
    raw[k].validate(domains[k]);
    if (fill) bases.push_back(default_smoothing_basis(raw[k].num_points(), domains[k]));
    out.covariates.push_back({bases[k], smooth_curves(raw[k], bases[k])});
  }
  out.validate();
  return out;
}

std::string with_commas(std::size_t n) {
  std::string digits = std::to_string(n);
  std::string out;
  int count = 0;
  for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
    if (count > 0 && count % 3 == 0) out.push_back(',');
    out.push_back(*it);
    ++count;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string_view to_string(ResponseMode mode) {
  switch (mode) {
    case ResponseMode::regression: return "regression";
    case ResponseMode::classification: return "classification";
    case ResponseMode::functional: return "functional";
  }
  return "regression";
}

ResponseMode parse_response_mode(std::string_view name) {
  for (auto m : {ResponseMode::regression, ResponseMode::classification,
                 ResponseMode::functional}) {
    if (name == to_string(m)) return m;
  }
  throw ValidationError("unknown response mode '" + std::string(name) + "'");
}

Eigen::Index n_obs(const FunctionalInput& input) {
  if (const auto* fd = std::get_if<FunctionalDataSet>(&input)) return fd->n_obs();
  const auto& raw = std::get<std::vector<RawCurves>>(input);
  return raw.empty() ? 0 : raw.front().num_obs();
}

std::size_t num_covariates(const FunctionalInput& input) {
  if (const auto* fd = std::get_if<FunctionalDataSet>(&input)) {
    return fd->num_covariates();
  }
  return std::get<std::vector<RawCurves>>(input).size();
}

Response Response::scalar(const Vector& y) {
  Response r;
  r.values = y;
  return r;
}

Response Response::classes(std::vector<std::string> labels) {
  Response r;
  r.labels = std::move(labels);
  return r;
}

Response Response::functional(Matrix coefs) {
  Response r;
  r.values = std::move(coefs);
  return r;
}

Eigen::Index Response::size() const {
  return labels.empty() ? values.rows() : static_cast<Eigen::Index>(labels.size());
}

FnnData FnnData::select(std::span<const Eigen::Index> rows) const {
  FnnData out;
  if (const auto* fd = std::get_if<FunctionalDataSet>(&func_cov)) {
    out.func_cov = fd->select(rows);
  } else {
    std::vector<RawCurves> raw;
    for (const auto& c : std::get<std::vector<RawCurves>>(func_cov)) {
      RawCurves sub;
      sub.argvals = c.argvals;
      sub.values.resize(static_cast<Eigen::Index>(rows.size()), c.values.cols());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        sub.values.row(static_cast<Eigen::Index>(i)) = c.values.row(rows[i]);
      }
      raw.push_back(std::move(sub));
    }
    out.func_cov = std::move(raw);
  }
  auto take = [&](const Matrix& m) {
    Matrix sub(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      sub.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    }
    return sub;
  };
  if (scalar_cov) out.scalar_cov = take(*scalar_cov);
  if (!resp.labels.empty()) {
    for (auto r : rows) out.resp.labels.push_back(resp.labels[static_cast<std::size_t>(r)]);
  } else {
    out.resp.values = take(resp.values);
  }
  return out;
}

std::vector<LayerSpec> resolve_layers(const FnnConfig& config,
                                      const OutputSpec& output,
                                      Warnings* warnings) {
  if (config.hidden_layers < 0) {
    throw ValidationError("hidden layer count cannot be negative");
  }
  const auto count = static_cast<std::size_t>(config.hidden_layers);
  std::vector<LayerSpec> layers;
  if (count > 0) {
    const auto neurons = broadcast(config.neurons, count, "neurons-per-layer value", warnings);
    const auto acts = broadcast(config.activations, count, "activation", warnings);
    const auto drops = config.dropout.empty()
                           ? std::vector<double>(count, 0.0)
                           : broadcast(config.dropout, count, "dropout rate", warnings);
    for (std::size_t l = 0; l < count; ++l) {
      layers.push_back({neurons[l], acts[l], drops[l]});
    }
  }
  layers.push_back({output.units, output.activation, 0.0});
  validate_spec(layers);
  return layers;
}

std::vector<BasisSystem> resolve_weight_bases(const FnnConfig& config,
                                              std::size_t num_covariates,
                                              Warnings* warnings) {
  if (config.domain_ranges.size() != num_covariates) {
    throw ValidationError("got " + std::to_string(config.domain_ranges.size()) +
                          " domain ranges for " + std::to_string(num_covariates) +
                          " functional covariates");
  }
  if (config.weight_bases.size() == 1 && num_covariates > 1 && warnings) {
    warnings->push_back(
        "basis information was specified for one functional covariate only; "
        "it will be repeated for all functional covariates");
  }
  const auto specs = broadcast(config.weight_bases, num_covariates,
                               "weight basis", nullptr);
  std::vector<BasisSystem> out;
  for (std::size_t k = 0; k < num_covariates; ++k) {
    out.push_back(BasisSystem::make(specs[k].kind, specs[k].num_basis,
                                    config.domain_ranges[k], specs[k].order,
                                    warnings));
  }
  return out;
}

FnnModel fnn_fit(const FnnData& data, const FnnConfig& config,
                 const Reporter& reporter) {
  FnnModel model;
  model.config = config;
  Warnings& warnings = model.warnings;
  auto flush_warnings = [&, shown = std::size_t{0}]() mutable {
    for (; shown < warnings.size(); ++shown) {
      if (reporter.warning) reporter.warning(warnings[shown]);
    }
  };

  check_raw_mode(data.func_cov, config.raw_data);
  const std::size_t num_cov = num_covariates(data.func_cov);
  if (num_cov == 0) throw ValidationError("no functional covariates supplied");
  const Eigen::Index n = data.n_obs();
  if (data.resp.size() != n) {
    throw ValidationError("response has " + std::to_string(data.resp.size()) +
                          " observations but functional covariates have " +
                          std::to_string(n));
  }
  if (data.scalar_cov && data.scalar_cov->rows() != n) {
    throw ValidationError("scalar covariates have " +
                          std::to_string(data.scalar_cov->rows()) +
                          " observations but functional covariates have " +
                          std::to_string(n));
  }
  if (const auto* raw = std::get_if<std::vector<RawCurves>>(&data.func_cov)) {
    for (const auto& c : *raw) {
      if (c.num_obs() != n) {
        throw ValidationError("functional covariates disagree on the number of observations");
      }
    }
  }

  model.weight_bases = resolve_weight_bases(config, num_cov, &warnings);

  // Response encoding and output layer.
  OutputSpec output;
  Matrix targets;
  switch (config.response_mode) {
    case ResponseMode::regression:
      if (data.resp.values.cols() != 1 || !data.resp.labels.empty()) {
        throw ValidationError("regression expects a single numeric response column");
      }
      targets = data.resp.values;
      break;
    case ResponseMode::classification: {
      if (data.resp.labels.empty()) {
        throw ValidationError("classification expects class labels");
      }
      auto& labels = model.response.class_labels;
      for (const auto& l : data.resp.labels) {
        if (std::find(labels.begin(), labels.end(), l) == labels.end()) labels.push_back(l);
      }
      if (labels.size() < 2) {
        throw ValidationError("classification needs at least two classes, found " +
                              std::to_string(labels.size()));
      }
      targets = Matrix::Zero(n, static_cast<Eigen::Index>(labels.size()));
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto& l = data.resp.labels[static_cast<std::size_t>(i)];
        targets(i, std::find(labels.begin(), labels.end(), l) - labels.begin()) = 1.0;
      }
      output = {static_cast<int>(labels.size()), Activation::softmax,
                LossKind::categorical_cross_entropy};
      break;
    }
    case ResponseMode::functional:
      if (data.resp.values.cols() < 1 || !data.resp.labels.empty()) {
        throw ValidationError("functional response expects a coefficient matrix");
      }
      targets = data.resp.values;
      output.units = static_cast<int>(targets.cols());
      break;
  }
  if (!targets.allFinite()) throw ValidationError("response contains non-finite values");
  model.response.num_outputs = output.units;
  model.config.train.loss = output.loss;

  const auto layers = resolve_layers(config, output, &warnings);
  flush_warnings();

  FunctionalDataSet fd = to_tensor(data.func_cov, config.domain_ranges, model.smoothing_bases);
  if (config.raw_data) model.smoothed_data = fd;

  const DesignMatrix dm = integral_features(fd, model.weight_bases, data.scalar_cov,
                                            config.rule_points, reporter.progress);
  model.column_map = dm.column_map;
  model.standardization = dm.standardization;
  model.num_scalars = data.scalar_cov ? data.scalar_cov->cols() : 0;

  const Matrix inputs = standardize(dm, dm.features);
  TrainResult trained = train(layers, model.config.train, inputs, targets);
  model.params = std::move(trained.params);
  model.history = std::move(trained.history);
  return model;
}

Matrix fnn_predict(const FnnModel& model, const FunctionalInput& func_cov,
                   const std::optional<Matrix>& scalar_cov,
                   const ProgressFn& progress) {
  check_raw_mode(func_cov, model.config.raw_data);
  if (num_covariates(func_cov) != model.num_covariates()) {
    throw ValidationError("model was trained on " + std::to_string(model.num_covariates()) +
                          " functional covariates, got " +
                          std::to_string(num_covariates(func_cov)));
  }
  const Eigen::Index scalars = scalar_cov ? scalar_cov->cols() : 0;
  if (scalars != model.num_scalars) {
    throw ValidationError("model was trained on " + std::to_string(model.num_scalars) +
                          " scalar covariates, got " + std::to_string(scalars));
  }
  std::vector<BasisSystem> bases = model.smoothing_bases;
  if (model.config.raw_data && bases.size() != model.num_covariates()) {
    throw ValidationError("model is missing its smoothing bases");
  }
  const FunctionalDataSet fd = to_tensor(func_cov, model.config.domain_ranges, bases);
  if (scalar_cov && scalar_cov->rows() != fd.n_obs()) {
    throw ValidationError("scalar covariates and functional covariates disagree on N");
  }
  const DesignMatrix dm = integral_features(fd, model.weight_bases, scalar_cov,
                                            model.config.rule_points, progress);
  return forward_batch(model.params, standardize(model.standardization, dm.features));
}

std::vector<std::string> predicted_labels(const FnnModel& model,
                                          const Matrix& probabilities) {
  const auto& labels = model.response.class_labels;
  if (labels.empty() || probabilities.cols() != static_cast<Eigen::Index>(labels.size())) {
    throw ValidationError("predictions do not match the model's class labels");
  }
  std::vector<std::string> out;
  for (Eigen::Index i = 0; i < probabilities.rows(); ++i) {
    Eigen::Index best = 0;
    probabilities.row(i).maxCoeff(&best);
    out.push_back(labels[static_cast<std::size_t>(best)]);
  }
  return out;
}

Vector FunctionalWeight::eval(std::span<const double> t) const {
  return basis_eval(basis, t) * coefficients;
}

std::vector<FunctionalWeight> fnn_weights(const FnnModel& model) {
  if (model.params.empty()) throw ValidationError("model has no trained layers");
  const Matrix& w = model.params.front().weights;
  if (w.cols() != static_cast<Eigen::Index>(model.column_map.size()) ||
      model.standardization.scale.size() != w.cols()) {
    throw ValidationError("model's first layer does not match its column map");
  }
  std::vector<FunctionalWeight> out;
  for (std::size_t k = 0; k < model.weight_bases.size(); ++k) {
    out.push_back({static_cast<int>(k), model.weight_bases[k],
                   Vector::Zero(model.weight_bases[k].num_basis())});
  }
  const auto units = static_cast<double>(w.rows());
  for (Eigen::Index d = 0; d < w.cols(); ++d) {
    const auto& src = model.column_map[static_cast<std::size_t>(d)];
    if (src.kind != ColumnSource::Kind::functional) continue;
    out[static_cast<std::size_t>(src.covariate)].coefficients[src.index] =
        w.col(d).sum() / units / model.standardization.scale[d];
  }
  return out;
}

CurveTable curve_predictions(const Matrix& predictions, Domain domain,
                             double step, BasisKind kind, int order) {
  domain = make_domain(domain.lo, domain.hi);
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw ValidationError("step size must be a positive number");
  }
  const double span = domain.length() / step;
  const auto intervals = static_cast<std::size_t>(std::floor(span + 1e-9));
  if (intervals < 1) {
    throw ValidationError("step size is larger than the domain; need at least 2 grid points");
  }
  CurveTable table;
  for (std::size_t i = 0; i <= intervals; ++i) {
    table.t.push_back(std::min(domain.lo + static_cast<double>(i) * step, domain.hi));
  }
  const auto basis = BasisSystem::make(kind, static_cast<int>(predictions.cols()), domain, order);
  if (basis.num_basis() != predictions.cols()) {
    throw ValidationError("a " + std::string(to_string(kind)) + " basis cannot have " +
                          std::to_string(predictions.cols()) + " functions");
  }
  table.values = predictions * basis_eval(basis, table.t).transpose();
  return table;
}

ModelSummary summarize(const Network& net) {
  ModelSummary s;
  for (std::size_t l = 0; l < net.size(); ++l) {
    const auto params = static_cast<std::size_t>(net[l].weights.size() + net[l].bias.size());
    s.rows.push_back({l == 0 ? "dense" : "dense_" + std::to_string(l), net[l].units(), params});
    s.total_params += params;
  }
  return s;
}

std::string format_summary(const ModelSummary& summary) {
  const std::string thin(80, '_');
  const std::string thick(80, '=');
  std::ostringstream os;
  os << "Model\n" << thin << "\n"
     << pad("Layer (type)", 34) << pad("Output Shape", 30) << "Param #\n"
     << thick << "\n";
  for (std::size_t i = 0; i < summary.rows.size(); ++i) {
    const auto& r = summary.rows[i];
    os << pad(r.name + " (Dense)", 34) << pad("(None, " + std::to_string(r.units) + ")", 30)
       << r.params << "\n"
       << (i + 1 == summary.rows.size() ? thick : thin) << "\n";
  }
  os << "Total params: " << with_commas(summary.total_params) << "\n"
     << "Trainable params: " << with_commas(summary.total_params) << "\n"
     << "Non-trainable params: 0\n"
     << thin << "\n";
  return os.str();
}

}  // namespace fnn
