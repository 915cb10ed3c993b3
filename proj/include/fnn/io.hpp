#pragma once

#include "fnn/model.hpp"
#include "fnn/modelsel.hpp"

#include <string>

namespace fnn {

// All text formats are comma separated, UTF-8, '.' decimal point, LF line
// endings. Numbers are written with 17 significant digits so that reading a
// file back reproduces the written doubles exactly.

std::string format_double(double v);

/// Curve file: a header row of argvals followed by one row of p values per
/// observation.
RawCurves load_curves(const std::string& path);
void write_curves(const RawCurves& curves, const std::string& path);

/// Coefficient tensor file: for each covariate a separator record
///   covariate,<k>,<kind>,<num_basis>,<lo>,<hi>[,<order>]
/// followed by num_basis rows of N coefficients.
FunctionalDataSet load_tensor(const std::string& path);
void write_tensor(const FunctionalDataSet& fd, const std::string& path);

/// Headerless numeric table.
Matrix load_matrix(const std::string& path);
void write_matrix(const Matrix& m, const std::string& path,
                  const std::vector<std::string>& header = {});

/// One label per line (class responses).
std::vector<std::string> load_labels(const std::string& path);
void write_labels(const std::vector<std::string>& labels, const std::string& path);

inline constexpr int kModelFormatVersion = 1;

std::string model_to_string(const FnnModel& model);
FnnModel model_from_string(const std::string& text);
void save_model(const FnnModel& model, const std::string& path);
/// Rejects unknown format versions and corrupt or truncated files.
FnnModel load_model(const std::string& path);

enum class PlotKind { history, weights, curves };
PlotKind parse_plot_kind(std::string_view name);

inline constexpr std::size_t kWeightGridPoints = 200;

/// history: epoch,train_loss,val_loss[,train_mse]
/// weights: covariate,t,beta  (200 points per covariate)
void emit_plots(const FnnModel& model, PlotKind kind, const std::string& path);
/// curves: t,yhat_1,...,yhat_N  (one row per grid point)
void emit_plots(const CurveTable& curves, const std::string& path);

/// Grid file: `key = [v1, v2, ...]` lines (or `key = v`) using the tuning
/// list names; '#' starts a comment.
TuneList parse_grid(const std::string& text, const std::string& source = "<grid>");
TuneList load_grid(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace fnn
