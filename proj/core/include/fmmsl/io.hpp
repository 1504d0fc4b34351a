#pragma once

#include "fmmsl/em.hpp"
#include "fmmsl/mixture.hpp"
#include "fmmsl/sim_study.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fmmsl {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Delimited text input
// ---------------------------------------------------------------------------

/// Numeric observations read from a delimited text file with a header row.
struct Dataset {
  std::vector<std::string> columns;  ///< selected column names, in selection order
  DataMatrix data;
  std::string source;
  std::vector<int> labels;           ///< label column if one was requested/found, else empty
};

/// Parses delimited text. The delimiter is inferred from the header (comma, tab,
/// semicolon, else runs of whitespace); CRLF and LF endings are both accepted, blank
/// lines are skipped and quoted header names are unquoted. With no `columns` every
/// column except `label_column` is selected. Throws DataError on missing columns,
/// ragged rows, or non-numeric selected cells.
Dataset parse_dataset(std::string_view text, const std::vector<std::string>& columns,
                      std::string source = "<memory>", std::string_view label_column = "label");

Dataset read_dataset(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     std::string_view label_column = "label");

/// Splits "a,b , c" into trimmed names.
std::vector<std::string> split_column_list(std::string_view list);

// ---------------------------------------------------------------------------
// Parameter blocks and configuration
// ---------------------------------------------------------------------------

/// {"weights": [...], "components": [{"mu": [...], "sigma": [[...], ...], "gamma": [...]}, ...]}
Json params_to_json(const MixtureParams& theta);

/// Schema violations throw DataError naming the JSON path of the offending field.
MixtureParams params_from_json(const Json& j, const std::string& path = "");

/// Accepts a bare parameter block or a fit report (its "parameters" member).
MixtureParams read_params_file(const std::filesystem::path& path);

Json em_config_to_json(const EmConfig& config);
/// Missing keys keep their defaults.
EmConfig em_config_from_json(const Json& j, const std::string& path = "");

/// {"theta_true": {...}, "sample_sizes": [...], "replicates": N, "seed": s, "em": {...}}
StudyConfig study_config_from_json(const Json& j);
StudyConfig read_study_config(const std::filesystem::path& path);

Json read_json_file(const std::filesystem::path& path);

// ---------------------------------------------------------------------------
// Fit report
// ---------------------------------------------------------------------------

struct FitReport {
  explicit FitReport(MixtureParams fitted) : parameters(std::move(fitted)) {}

  std::string source;
  std::vector<std::string> columns;
  std::size_t n = 0;
  std::size_t p = 0;
  Vector data_min;
  Vector data_max;
  MixtureParams parameters;
  std::vector<std::string> se_names;
  std::optional<Vector> se;  ///< aligned with se_names
  std::optional<double> se_rcond;
  std::string se_error;
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t num_params = 0;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  int restart_index = 0;
  std::vector<std::string> restart_failures;
  int ridge_repairs = 0;
  std::vector<int> labels;
  EmConfig config;
};

inline constexpr std::string_view kReportFormat = "fmmsl-fit-report/1";

FitReport make_report(const FitResult& result, const Dataset& dataset, const EmConfig& config);

Json report_to_json(const FitReport& report);
FitReport report_from_json(const Json& j);

void write_report(const std::filesystem::path& path, const FitReport& report);
FitReport read_report(const std::filesystem::path& path);

/// Estimates and SEs per component in a two-column-per-component table, followed by the
/// log-likelihood, AIC and BIC.
std::string format_fit_summary(const FitReport& report);

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

/// CSV header x1..xp,label then one row per observation.
void write_simulated_csv(std::ostream& out, const SimulatedData& sim);

/// CSV with columns n,component,parameter,true,mean,distance,used,failures. Each
/// parameter coordinate gets a row; the block distance repeats across its coordinates
/// and pi rows carry the MSE in the distance column.
void write_study_table(std::ostream& out, const SimStudySummary& summary);

struct ContourPoint {
  double x;
  double y;
  double density;
};

/// grid x grid lattice over [min - margin*range, max + margin*range] per axis (endpoints
/// included) with the fitted mixture density at each point. Throws DataError unless p = 2.
std::vector<ContourPoint> contour_grid(const FitReport& report, int grid, double margin);

void write_contour_csv(std::ostream& out, const std::vector<ContourPoint>& points);

/// Writes text to a file, throwing DataError if it cannot be opened.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace fmmsl
