#include "fnn/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fnn {

using nlohmann::json;

namespace {

struct Row {
  std::size_t line = 0;
  std::vector<std::string> cells;
};

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t')) --e;
  return std::string(s.substr(b, e - b));
}

// Non-empty lines split on commas.
std::vector<Row> read_rows(const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<Row> rows;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    Row row{number, {}};
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      row.cells.push_back(trim(std::string_view(line).substr(
          start, comma == std::string::npos ? std::string::npos : comma - start)));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

double parse_number(const std::string& path, const Row& row, std::size_t col) {
  const std::string& cell = row.cells[col];
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(path, row.line, col + 1, "expected a finite number, got '" + cell + "'");
  }
  return value;
}

std::vector<double> parse_numbers(const std::string& path, const Row& row,
                                  std::size_t expected) {
  if (expected != 0 && row.cells.size() != expected) {
    throw ParseError(path, row.line, std::min(row.cells.size(), expected) + 1,
                     "ragged row: expected " + std::to_string(expected) +
                         " cells, found " + std::to_string(row.cells.size()));
  }
  std::vector<double> out;
  out.reserve(row.cells.size());
  for (std::size_t c = 0; c < row.cells.size(); ++c) out.push_back(parse_number(path, row, c));
  return out;
}

std::string join_row(const double* values, Eigen::Index n, Eigen::Index stride) {
  std::string out;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (j) out.push_back(',');
    out += format_double(values[j * stride]);
  }
  return out;
}

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto& data = j.at("data");
  if (rows < 0 || cols < 0 || data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ValidationError("corrupt model file: matrix size mismatch");
  }
  Matrix m(rows, cols);
  std::size_t k = 0;
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = data.at(k++).get<double>();
  }
  return m;
}

json vector_to_json(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

Vector vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json basis_to_json(const BasisSystem& b) {
  return {{"kind", to_string(b.kind())}, {"num_basis", b.num_basis()},
          {"lo", b.domain().lo},         {"hi", b.domain().hi},
          {"order", b.order()}};
}

BasisSystem basis_from_json(const json& j) {
  const auto kind = parse_basis_kind(j.at("kind").get<std::string>());
  const Domain d{j.at("lo").get<double>(), j.at("hi").get<double>()};
  return kind == BasisKind::fourier
             ? BasisSystem::fourier(j.at("num_basis").get<int>(), d)
             : BasisSystem::bspline(j.at("num_basis").get<int>(), d, j.at("order").get<int>());
}

json config_to_json(const FnnConfig& c) {
  json bases = json::array();
  for (const auto& w : c.weight_bases) {
    bases.push_back({{"kind", to_string(w.kind)}, {"num_basis", w.num_basis}, {"order", w.order}});
  }
  json acts = json::array();
  for (auto a : c.activations) acts.push_back(to_string(a));
  json domains = json::array();
  for (const auto& d : c.domain_ranges) domains.push_back({d.lo, d.hi});
  const auto& t = c.train;
  return {{"weight_bases", bases},
          {"hidden_layers", c.hidden_layers},
          {"neurons", c.neurons},
          {"activations", acts},
          {"dropout", c.dropout},
          {"response_mode", to_string(c.response_mode)},
          {"domain_ranges", domains},
          {"raw_data", c.raw_data},
          {"rule_points", c.rule_points},
          {"train",
           {{"epochs", t.epochs},
            {"batch_size", t.batch_size},
            {"learn_rate", t.learn_rate},
            {"decay_rate", t.decay_rate},
            {"validation_split", t.validation_split},
            {"early_stopping", t.early_stopping},
            {"patience", t.patience},
            {"seed", t.seed},
            {"loss", to_string(t.loss)},
            {"shuffle_before_split", t.shuffle_before_split},
            {"min_delta", t.min_delta}}}};
}

FnnConfig config_from_json(const json& j) {
  FnnConfig c;
  c.weight_bases.clear();
  for (const auto& w : j.at("weight_bases")) {
    c.weight_bases.push_back({parse_basis_kind(w.at("kind").get<std::string>()),
                              w.at("num_basis").get<int>(), w.at("order").get<int>()});
  }
  c.hidden_layers = j.at("hidden_layers").get<int>();
  c.neurons = j.at("neurons").get<std::vector<int>>();
  c.activations.clear();
  for (const auto& a : j.at("activations")) c.activations.push_back(parse_activation(a.get<std::string>()));
  c.dropout = j.at("dropout").get<std::vector<double>>();
  c.response_mode = parse_response_mode(j.at("response_mode").get<std::string>());
  for (const auto& d : j.at("domain_ranges")) {
    c.domain_ranges.push_back(make_domain(d.at(0).get<double>(), d.at(1).get<double>()));
  }
  c.raw_data = j.at("raw_data").get<bool>();
  c.rule_points = j.at("rule_points").get<int>();
  const auto& t = j.at("train");
  c.train.epochs = t.at("epochs").get<int>();
  c.train.batch_size = t.at("batch_size").get<int>();
  c.train.learn_rate = t.at("learn_rate").get<double>();
  c.train.decay_rate = t.at("decay_rate").get<double>();
  c.train.validation_split = t.at("validation_split").get<double>();
  c.train.early_stopping = t.at("early_stopping").get<bool>();
  c.train.patience = t.at("patience").get<int>();
  c.train.seed = t.at("seed").get<std::uint64_t>();
  c.train.loss = parse_loss(t.at("loss").get<std::string>());
  c.train.shuffle_before_split = t.at("shuffle_before_split").get<bool>();
  c.train.min_delta = t.at("min_delta").get<double>();
  return c;
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out.push_back(',');
    out += cells[i];
  }
  out.push_back('\n');
  return out;
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\''))) {
    return s.substr(1, s.size() - 2);
  }
  return s;
}

}  // namespace

std::string format_double(double v) {
  if (v == 0.0) return "0";  // also folds -0
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << contents;
  if (!out) throw ValidationError("failed writing '" + path + "'");
}

RawCurves load_curves(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ValidationError(path + ": empty curve file");
  RawCurves curves;
  curves.argvals = parse_numbers(path, rows.front(), 0);
  for (std::size_t i = 1; i < curves.argvals.size(); ++i) {
    if (!(curves.argvals[i] > curves.argvals[i - 1])) {
      throw ParseError(path, rows.front().line, i + 1, "argvals must be strictly increasing");
    }
  }
  if (rows.size() == 1) throw ValidationError(path + ": no observations (header only)");
  const std::size_t p = curves.argvals.size();
  curves.values.resize(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(p));
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto vals = parse_numbers(path, rows[r], p);
    for (std::size_t c = 0; c < p; ++c) {
      curves.values(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) = vals[c];
    }
  }
  curves.validate();
  return curves;
}

void write_curves(const RawCurves& curves, const std::string& path) {
  curves.validate();
  std::string out = join_row(curves.argvals.data(),
                             static_cast<Eigen::Index>(curves.argvals.size()), 1) + "\n";
  for (Eigen::Index i = 0; i < curves.values.rows(); ++i) {
    const Vector row = curves.values.row(i);
    out += join_row(row.data(), row.size(), 1) + "\n";
  }
  write_file(path, out);
}

FunctionalDataSet load_tensor(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ValidationError(path + ": empty tensor file");
  FunctionalDataSet fd;
  std::size_t r = 0;
  std::size_t n = 0;
  while (r < rows.size()) {
    const Row& head = rows[r];
    if (head.cells.empty() || head.cells[0] != "covariate") {
      throw ParseError(path, head.line, 1, "expected a 'covariate' separator record");
    }
    if (head.cells.size() != 6 && head.cells.size() != 7) {
      throw ParseError(path, head.line, 1,
                       "separator record needs covariate,k,kind,num_basis,lo,hi[,order]");
    }
    const auto k = static_cast<std::size_t>(parse_number(path, head, 1));
    if (k != fd.covariates.size() + 1) {
      throw ParseError(path, head.line, 2, "covariates must be numbered 1, 2, ... in order");
    }
    BasisKind kind;
    try {
      kind = parse_basis_kind(head.cells[2]);
    } catch (const ValidationError& e) {
      throw ParseError(path, head.line, 3, e.what());
    }
    const double m_raw = parse_number(path, head, 3);
    const int m = static_cast<int>(m_raw);
    if (m < 1 || static_cast<double>(m) != m_raw) {
      throw ParseError(path, head.line, 4, "num_basis must be a positive integer");
    }
    const Domain domain{parse_number(path, head, 4), parse_number(path, head, 5)};
    const int order = head.cells.size() == 7 ? static_cast<int>(parse_number(path, head, 6))
                                             : BasisSystem::kDefaultOrder;
    BasisSystem basis = [&] {
      try {
        if (kind == BasisKind::fourier && m % 2 == 0) {
          throw ValidationError("fourier tensors need an odd num_basis");
        }
        return BasisSystem::make(kind, m, domain, order);
      } catch (const ValidationError& e) {
        throw ParseError(path, head.line, 4, e.what());
      }
    }();
    ++r;
    if (r + static_cast<std::size_t>(m) > rows.size()) {
      throw ParseError(path, rows.back().line + 1, 1,
                       "truncated block: covariate " + std::to_string(k) + " needs " +
                           std::to_string(m) + " coefficient rows");
    }
    if (n == 0) n = rows[r].cells.size();
    Matrix coefs(m, static_cast<Eigen::Index>(n));
    for (int i = 0; i < m; ++i, ++r) {
      if (rows[r].cells.front() == "covariate") {
        throw ParseError(path, rows[r].line, 1,
                         "covariate " + std::to_string(k) + " has fewer than " +
                             std::to_string(m) + " coefficient rows");
      }
      const auto vals = parse_numbers(path, rows[r], n);
      for (std::size_t c = 0; c < n; ++c) coefs(i, static_cast<Eigen::Index>(c)) = vals[c];
    }
    fd.covariates.push_back({std::move(basis), std::move(coefs)});
  }
  fd.validate();
  return fd;
}

void write_tensor(const FunctionalDataSet& fd, const std::string& path) {
  fd.validate();
  std::string out;
  for (std::size_t k = 0; k < fd.covariates.size(); ++k) {
    const auto& c = fd.covariates[k];
    std::vector<std::string> head{"covariate", std::to_string(k + 1),
                                  std::string(to_string(c.basis.kind())),
                                  std::to_string(c.basis.num_basis()),
                                  format_double(c.basis.domain().lo),
                                  format_double(c.basis.domain().hi)};
    if (c.basis.kind() == BasisKind::bspline) head.push_back(std::to_string(c.basis.order()));
    out += csv_line(head);
    for (Eigen::Index i = 0; i < c.coefs.rows(); ++i) {
      const Vector row = c.coefs.row(i);
      out += join_row(row.data(), row.size(), 1) + "\n";
    }
  }
  write_file(path, out);
}

Matrix load_matrix(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ValidationError(path + ": no rows");
  const std::size_t width = rows.front().cells.size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto vals = parse_numbers(path, rows[r], width);
    for (std::size_t c = 0; c < width; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = vals[c];
    }
  }
  return m;
}

void write_matrix(const Matrix& m, const std::string& path,
                  const std::vector<std::string>& header) {
  std::string out;
  if (!header.empty()) out += csv_line(header);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const Vector row = m.row(i);
    out += join_row(row.data(), row.size(), 1) + "\n";
  }
  write_file(path, out);
}

std::vector<std::string> load_labels(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw ValidationError(path + ": no labels");
  std::vector<std::string> labels;
  for (const auto& row : rows) {
    if (row.cells.size() != 1) {
      throw ParseError(path, row.line, 2, "expected one label per line");
    }
    labels.push_back(row.cells.front());
  }
  return labels;
}

void write_labels(const std::vector<std::string>& labels, const std::string& path) {
  std::string out;
  for (const auto& l : labels) out += l + "\n";
  write_file(path, out);
}

std::string model_to_string(const FnnModel& model) {
  json j;
  j["format_version"] = kModelFormatVersion;
  j["config"] = config_to_json(model.config);
  j["smoothing_bases"] = json::array();
  for (const auto& b : model.smoothing_bases) j["smoothing_bases"].push_back(basis_to_json(b));
  j["weight_bases"] = json::array();
  for (const auto& b : model.weight_bases) j["weight_bases"].push_back(basis_to_json(b));
  j["column_map"] = json::array();
  for (const auto& c : model.column_map) {
    j["column_map"].push_back(
        {{"kind", c.kind == ColumnSource::Kind::functional ? "functional" : "scalar"},
         {"covariate", c.covariate},
         {"index", c.index}});
  }
  j["standardization"] = {{"mean", vector_to_json(model.standardization.mean)},
                          {"scale", vector_to_json(model.standardization.scale)}};
  j["num_scalars"] = model.num_scalars;
  j["layers"] = json::array();
  for (const auto& layer : model.params) {
    j["layers"].push_back({{"activation", to_string(layer.activation)},
                           {"dropout_rate", layer.dropout_rate},
                           {"weights", matrix_to_json(layer.weights)},
                           {"bias", vector_to_json(layer.bias)}});
  }
  j["history"] = {{"train_loss", model.history.train_loss},
                  {"val_loss", model.history.val_loss},
                  {"train_mse", model.history.train_mse},
                  {"stopped_epoch", model.history.stopped_epoch},
                  {"best_epoch", model.history.best_epoch}};
  j["response"] = {{"class_labels", model.response.class_labels},
                   {"num_outputs", model.response.num_outputs}};
  j["warnings"] = model.warnings;
  return j.dump(1) + "\n";
}

FnnModel model_from_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupt model file: ") + e.what());
  }
  try {
    if (!j.is_object() || !j.contains("format_version")) {
      throw ValidationError("corrupt model file: missing format_version");
    }
    const int version = j.at("format_version").get<int>();
    if (version != kModelFormatVersion) {
      throw ValidationError("unsupported model format version " + std::to_string(version) +
                            " (this build reads version " +
                            std::to_string(kModelFormatVersion) + ")");
    }
    FnnModel m;
    m.config = config_from_json(j.at("config"));
    for (const auto& b : j.at("smoothing_bases")) m.smoothing_bases.push_back(basis_from_json(b));
    for (const auto& b : j.at("weight_bases")) m.weight_bases.push_back(basis_from_json(b));
    for (const auto& c : j.at("column_map")) {
      const auto kind = c.at("kind").get<std::string>();
      if (kind != "functional" && kind != "scalar") {
        throw ValidationError("corrupt model file: bad column kind '" + kind + "'");
      }
      m.column_map.push_back({kind == "functional" ? ColumnSource::Kind::functional
                                                   : ColumnSource::Kind::scalar,
                              c.at("covariate").get<int>(), c.at("index").get<int>()});
    }
    m.standardization.mean = vector_from_json(j.at("standardization").at("mean"));
    m.standardization.scale = vector_from_json(j.at("standardization").at("scale"));
    m.num_scalars = j.at("num_scalars").get<Eigen::Index>();
    auto fan_in = static_cast<Eigen::Index>(m.column_map.size());
    for (const auto& l : j.at("layers")) {
      DenseLayer layer;
      layer.activation = parse_activation(l.at("activation").get<std::string>());
      layer.dropout_rate = l.at("dropout_rate").get<double>();
      layer.weights = matrix_from_json(l.at("weights"));
      layer.bias = vector_from_json(l.at("bias"));
      if (layer.weights.cols() != fan_in || layer.bias.size() != layer.weights.rows()) {
        throw ValidationError("corrupt model file: inconsistent layer shapes");
      }
      fan_in = layer.weights.rows();
      m.params.push_back(std::move(layer));
    }
    const auto& h = j.at("history");
    m.history.train_loss = h.at("train_loss").get<std::vector<double>>();
    m.history.val_loss = h.at("val_loss").get<std::vector<double>>();
    m.history.train_mse = h.at("train_mse").get<std::vector<double>>();
    m.history.stopped_epoch = h.at("stopped_epoch").get<int>();
    m.history.best_epoch = h.at("best_epoch").get<int>();
    m.response.class_labels = j.at("response").at("class_labels").get<std::vector<std::string>>();
    m.response.num_outputs = j.at("response").at("num_outputs").get<int>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (m.params.empty() ||
        m.standardization.mean.size() != static_cast<Eigen::Index>(m.column_map.size()) ||
        m.standardization.scale.size() != m.standardization.mean.size() ||
        m.weight_bases.size() != m.config.domain_ranges.size()) {
      throw ValidationError("corrupt model file: inconsistent model metadata");
    }
    return m;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("corrupt model file: ") + e.what());
  }
}

void save_model(const FnnModel& model, const std::string& path) {
  write_file(path, model_to_string(model));
}

FnnModel load_model(const std::string& path) {
  try {
    return model_from_string(read_file(path));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

PlotKind parse_plot_kind(std::string_view name) {
  if (name == "history") return PlotKind::history;
  if (name == "weights") return PlotKind::weights;
  if (name == "curves") return PlotKind::curves;
  throw ValidationError("unknown plot kind '" + std::string(name) +
                        "' (expected history, weights or curves)");
}

void emit_plots(const FnnModel& model, PlotKind kind, const std::string& path) {
  std::string out;
  if (kind == PlotKind::history) {
    const auto& h = model.history;
    const bool ce = model.config.train.loss == LossKind::categorical_cross_entropy;
    std::vector<std::string> header{"epoch", "train_loss", "val_loss"};
    if (ce) header.push_back("train_mse");
    out += csv_line(header);
    for (int e = 0; e < h.stopped_epoch; ++e) {
      const auto i = static_cast<std::size_t>(e);
      std::vector<std::string> row{std::to_string(e + 1), format_double(h.train_loss.at(i)),
                                   i < h.val_loss.size() ? format_double(h.val_loss[i]) : ""};
      if (ce) row.push_back(format_double(h.train_mse.at(i)));
      out += csv_line(row);
    }
  } else if (kind == PlotKind::weights) {
    out += "covariate,t,beta\n";
    for (const auto& w : fnn_weights(model)) {
      const auto& d = w.basis.domain();
      const auto grid = linspace(d.lo, d.hi, kWeightGridPoints);
      const Vector beta = w.eval(grid);
      for (std::size_t q = 0; q < grid.size(); ++q) {
        out += csv_line({std::to_string(w.covariate + 1), format_double(grid[q]),
                         format_double(beta[static_cast<Eigen::Index>(q)])});
      }
    }
  } else {
    throw ValidationError("curve tables are emitted from predictions, not from a model");
  }
  write_file(path, out);
}

void emit_plots(const CurveTable& curves, const std::string& path) {
  std::vector<std::string> header{"t"};
  for (Eigen::Index n = 0; n < curves.values.rows(); ++n) {
    header.push_back("yhat_" + std::to_string(n + 1));
  }
  std::string out = csv_line(header);
  for (std::size_t q = 0; q < curves.t.size(); ++q) {
    std::vector<std::string> row{format_double(curves.t[q])};
    for (Eigen::Index n = 0; n < curves.values.rows(); ++n) {
      row.push_back(format_double(curves.values(n, static_cast<Eigen::Index>(q))));
    }
    out += csv_line(row);
  }
  write_file(path, out);
}

TuneList parse_grid(const std::string& text, const std::string& source) {
  TuneList list;
  std::vector<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source, number, 1, "expected 'key = [values]'");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    std::string value = trim(std::string_view(body).substr(eq + 1));
    const std::size_t value_col = body.find_first_not_of(" \t", eq + 1) + 1;
    if (!value.empty() && value.front() == '[') {
      if (value.back() != ']') throw ParseError(source, number, value_col, "unterminated list");
      value = value.substr(1, value.size() - 2);
    }
    std::vector<std::string> items;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = unquote(trim(item));
      if (item.empty()) throw ParseError(source, number, value_col, "empty list item");
      items.push_back(item);
    }
    if (items.empty()) throw ParseError(source, number, value_col, "axis '" + key + "' is empty");
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw ParseError(source, number, 1, "duplicate key '" + key + "'");
    }
    seen.push_back(key);

    auto number_of = [&](const std::string& s) {
      Row row{number, {s}};
      return parse_number(source, row, 0);
    };
    auto ints = [&]() {
      std::vector<int> out;
      for (const auto& s : items) {
        const double v = number_of(s);
        if (v != std::floor(v)) throw ParseError(source, number, value_col, "'" + s + "' is not an integer");
        out.push_back(static_cast<int>(v));
      }
      return out;
    };
    auto reals = [&]() {
      std::vector<double> out;
      for (const auto& s : items) out.push_back(number_of(s));
      return out;
    };
    if (key == "num_hidden_layers") list.num_hidden_layers = ints();
    else if (key == "neurons") list.neurons = ints();
    else if (key == "epochs") list.epochs = ints();
    else if (key == "val_split") list.val_split = reals();
    else if (key == "patience") list.patience = ints();
    else if (key == "learn_rate") list.learn_rate = reals();
    else if (key == "num_basis") list.num_basis = ints();
    else if (key == "activation_choice") {
      for (const auto& s : items) {
        try {
          list.activation_choice.push_back(parse_activation(s));
        } catch (const ValidationError& e) {
          throw ParseError(source, number, value_col, e.what());
        }
      }
    } else {
      throw ParseError(source, number, 1, "unknown grid key '" + key + "'");
    }
  }
  for (const char* key : {"num_hidden_layers", "neurons", "epochs", "val_split", "patience",
                          "learn_rate", "num_basis", "activation_choice"}) {
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      throw ValidationError(source + ": grid is missing '" + key + "'");
    }
  }
  return list;
}

TuneList load_grid(const std::string& path) { return parse_grid(read_file(path), path); }

}  // namespace fnn
