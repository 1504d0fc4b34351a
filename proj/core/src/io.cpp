#include "fmmsl/io.hpp"

#include "fmmsl/error.hpp"
#include "fmmsl/inference.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace fmmsl {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) {
    s = s.substr(1, s.size() - 2);
  }
  return std::string(s);
}

std::vector<std::string_view> split_line(std::string_view line, char delim) {
  std::vector<std::string_view> out;
  if (delim == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      const std::size_t start = i;
      while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
      out.push_back(line.substr(start, i - start));
    }
    return out;
  }
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(delim, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

char detect_delimiter(std::string_view header) {
  for (const char c : {',', '\t', ';'}) {
    if (header.find(c) != std::string_view::npos) return c;
  }
  return ' ';
}

std::optional<double> parse_double(std::string_view cell) {
  std::string s = unquote(cell);
  if (s.empty()) return std::nullopt;
  const char* begin = s.data();
  if (*begin == '+') ++begin;
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) return std::nullopt;
  return value;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::vector<std::string> split_column_list(std::string_view list) {
  std::vector<std::string> out;
  for (const auto part : split_line(list, ',')) {
    const std::string name = unquote(part);
    if (!name.empty()) out.push_back(name);
  }
  return out;
}

Dataset parse_dataset(std::string_view text, const std::vector<std::string>& columns, std::string source,
                      std::string_view label_column) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) lines.push_back(line);
    start = end + 1;
  }
  if (lines.empty()) throw DataError(source + ": empty file (a header row is required)");

  const char delim = detect_delimiter(lines.front());
  std::vector<std::string> header;
  for (const auto cell : split_line(lines.front(), delim)) header.push_back(unquote(cell));

  auto find_col = [&](std::string_view name) -> std::optional<std::size_t> {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) return std::nullopt;
    return static_cast<std::size_t>(it - header.begin());
  };

  Dataset ds;
  ds.source = std::move(source);
  std::vector<std::size_t> selected;
  const std::optional<std::size_t> label_idx = label_column.empty() ? std::nullopt : find_col(label_column);
  if (columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (label_idx && c == *label_idx) continue;
      selected.push_back(c);
      ds.columns.push_back(header[c]);
    }
  } else {
    for (const auto& name : columns) {
      const auto idx = find_col(name);
      if (!idx) throw DataError(ds.source + ": column '" + name + "' not found in header");
      selected.push_back(*idx);
      ds.columns.push_back(name);
    }
  }
  if (selected.empty()) throw DataError(ds.source + ": no data columns selected");

  const auto n = static_cast<Eigen::Index>(lines.size() - 1);
  if (n < 1) throw DataError(ds.source + ": no data rows");
  ds.data.resize(n, static_cast<Eigen::Index>(selected.size()));
  if (label_idx) ds.labels.resize(static_cast<std::size_t>(n));

  for (Eigen::Index r = 0; r < n; ++r) {
    const auto cells = split_line(lines[static_cast<std::size_t>(r) + 1], delim);
    const std::size_t line_no = static_cast<std::size_t>(r) + 2;
    if (cells.size() != header.size()) {
      throw DataError(ds.source + ": line " + std::to_string(line_no) + " has " + std::to_string(cells.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < selected.size(); ++c) {
      const auto v = parse_double(cells[selected[c]]);
      if (!v) {
        throw DataError(ds.source + ": non-numeric value '" + std::string(trim(cells[selected[c]])) +
                        "' in column '" + header[selected[c]] + "' at line " + std::to_string(line_no));
      }
      ds.data(r, static_cast<Eigen::Index>(c)) = *v;
    }
    if (label_idx) {
      const auto v = parse_double(cells[*label_idx]);
      if (!v || *v != std::floor(*v)) {
        throw DataError(ds.source + ": label column '" + header[*label_idx] + "' is not an integer at line " +
                        std::to_string(line_no));
      }
      ds.labels[static_cast<std::size_t>(r)] = static_cast<int>(*v);
    }
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path, const std::vector<std::string>& columns,
                     std::string_view label_column) {
  return parse_dataset(read_file(path), columns, path.string(), label_column);
}

// ---------------------------------------------------------------------------

namespace {

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(vector_json(m.row(i).transpose()));
  return rows;
}

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw DataError("schema violation at " + (path.empty() ? std::string("/") : path) + ": " + what);
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  if (!j.is_object()) schema_error(path, "expected an object");
  const auto it = j.find(key);
  if (it == j.end()) schema_error(path + "/" + key, "missing required field");
  return *it;
}

double number_at(const Json& j, const std::string& path) {
  if (!j.is_number()) schema_error(path, "expected a number");
  return j.get<double>();
}

Vector vector_at(const Json& j, const std::string& path, std::optional<Eigen::Index> size = std::nullopt) {
  if (!j.is_array()) schema_error(path, "expected an array of numbers");
  if (size && static_cast<Eigen::Index>(j.size()) != *size) {
    schema_error(path, "expected " + std::to_string(*size) + " entries, found " + std::to_string(j.size()));
  }
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number_at(j[i], path + "/" + std::to_string(i));
  return v;
}

Matrix matrix_at(const Json& j, const std::string& path, Eigen::Index p) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != p) {
    schema_error(path, "expected a " + std::to_string(p) + "x" + std::to_string(p) + " array of rows");
  }
  Matrix m(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    m.row(i) = vector_at(j[static_cast<std::size_t>(i)], path + "/" + std::to_string(i), p).transpose();
  }
  return m;
}

template <typename T>
T integer_at(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) schema_error(path, "expected an integer");
  if constexpr (std::is_unsigned_v<T>) {
    if (j.is_number_unsigned()) return static_cast<T>(j.get<std::uint64_t>());
    const auto v = j.get<std::int64_t>();
    if (v < 0) schema_error(path, "expected a non-negative integer");
    return static_cast<T>(v);
  } else {
    return static_cast<T>(j.get<std::int64_t>());
  }
}

std::string string_at(const Json& j, const std::string& path) {
  if (!j.is_string()) schema_error(path, "expected a string");
  return j.get<std::string>();
}

}  // namespace

Json params_to_json(const MixtureParams& theta) {
  Json j;
  j["weights"] = vector_json(theta.weights());
  Json comps = Json::array();
  for (const auto& c : theta.components()) {
    Json cj;
    cj["mu"] = vector_json(c.mu());
    cj["sigma"] = matrix_json(c.sigma());
    cj["gamma"] = vector_json(c.gamma());
    comps.push_back(std::move(cj));
  }
  j["components"] = std::move(comps);
  return j;
}

MixtureParams params_from_json(const Json& j, const std::string& path) {
  const Json& comps = member(j, path, "components");
  if (!comps.is_array() || comps.empty()) schema_error(path + "/components", "expected a non-empty array");
  const Vector weights = vector_at(member(j, path, "weights"), path + "/weights", static_cast<Eigen::Index>(comps.size()));

  std::vector<MslParams> out;
  std::optional<Eigen::Index> p;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::string cp = path + "/components/" + std::to_string(i);
    const Vector mu = vector_at(member(comps[i], cp, "mu"), cp + "/mu", p);
    if (mu.size() < 1) schema_error(cp + "/mu", "expected at least one entry");
    p = mu.size();
    const Matrix sigma = matrix_at(member(comps[i], cp, "sigma"), cp + "/sigma", *p);
    const Vector gamma = vector_at(member(comps[i], cp, "gamma"), cp + "/gamma", *p);
    try {
      out.emplace_back(mu, sigma, gamma);
    } catch (const DataError& e) {
      schema_error(cp, e.what());
    }
  }
  try {
    return MixtureParams(weights, std::move(out));
  } catch (const DataError& e) {
    schema_error(path + "/weights", e.what());
  }
}

Json read_json_file(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw DataError(path.string() + ": invalid JSON: " + e.what());
  }
}

MixtureParams read_params_file(const std::filesystem::path& path) {
  const Json j = read_json_file(path);
  if (j.is_object() && j.contains("parameters")) return params_from_json(j["parameters"], "/parameters");
  return params_from_json(j, "");
}

Json em_config_to_json(const EmConfig& c) {
  Json j;
  j["g"] = c.g;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["stop_rule"] = std::string(to_string(c.stop_rule));
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  j["eps_d"] = c.eps_d;
  if (c.min_mass) {
    j["min_mass"] = *c.min_mass;
  } else {
    j["min_mass"] = nullptr;
  }
  j["m_step"] = std::string(to_string(c.update));
  j["se"] = c.compute_se;
  return j;
}

EmConfig em_config_from_json(const Json& j, const std::string& path) {
  if (!j.is_object()) schema_error(path, "expected an object");
  EmConfig c;
  try {
    if (j.contains("g")) c.g = integer_at<int>(j["g"], path + "/g");
    if (j.contains("tol")) c.tol = number_at(j["tol"], path + "/tol");
    if (j.contains("max_iter")) c.max_iter = integer_at<int>(j["max_iter"], path + "/max_iter");
    if (j.contains("stop_rule")) c.stop_rule = parse_stop_rule(string_at(j["stop_rule"], path + "/stop_rule"));
    if (j.contains("restarts")) c.restarts = integer_at<int>(j["restarts"], path + "/restarts");
    if (j.contains("seed")) c.seed = integer_at<std::uint64_t>(j["seed"], path + "/seed");
    if (j.contains("eps_d")) c.eps_d = number_at(j["eps_d"], path + "/eps_d");
    if (j.contains("min_mass") && !j["min_mass"].is_null()) c.min_mass = number_at(j["min_mass"], path + "/min_mass");
    if (j.contains("m_step")) c.update = parse_m_step_update(string_at(j["m_step"], path + "/m_step"));
    if (j.contains("se")) {
      if (!j["se"].is_boolean()) schema_error(path + "/se", "expected a boolean");
      c.compute_se = j["se"].get<bool>();
    }
    validate(c);
  } catch (const UsageError& e) {
    schema_error(path, e.what());
  }
  return c;
}

StudyConfig study_config_from_json(const Json& j) {
  MixtureParams truth = params_from_json(member(j, "", "theta_true"), "/theta_true");
  const Json& sizes = member(j, "", "sample_sizes");
  if (!sizes.is_array() || sizes.empty()) schema_error("/sample_sizes", "expected a non-empty array");
  std::vector<std::size_t> ns;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    ns.push_back(integer_at<std::size_t>(sizes[i], "/sample_sizes/" + std::to_string(i)));
  }
  EmConfig em;
  em.g = static_cast<int>(truth.num_components());
  if (j.contains("em")) {
    Json emj = j["em"];
    if (emj.is_object() && !emj.contains("g")) emj["g"] = em.g;
    em = em_config_from_json(emj, "/em");
  }
  StudyConfig cfg(std::move(truth), std::move(ns));
  cfg.replicates = integer_at<std::size_t>(member(j, "", "replicates"), "/replicates");
  if (j.contains("seed")) cfg.seed = integer_at<std::uint64_t>(j["seed"], "/seed");
  if (j.contains("threads")) cfg.threads = integer_at<std::size_t>(j["threads"], "/threads");
  cfg.em = em;
  try {
    validate(cfg);
  } catch (const UsageError& e) {
    schema_error("", e.what());
  }
  return cfg;
}

StudyConfig read_study_config(const std::filesystem::path& path) {
  return study_config_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------

FitReport make_report(const FitResult& result, const Dataset& dataset, const EmConfig& config) {
  FitReport r(result.theta);
  r.source = dataset.source;
  r.columns = dataset.columns;
  r.n = static_cast<std::size_t>(dataset.data.rows());
  r.p = static_cast<std::size_t>(dataset.data.cols());
  r.data_min = dataset.data.colwise().minCoeff().transpose();
  r.data_max = dataset.data.colwise().maxCoeff().transpose();
  r.se_names = parameter_names(static_cast<std::size_t>(result.theta.num_components()), r.p);
  if (result.se) {
    r.se = result.se->values;
    r.se_rcond = result.se->rcond;
  }
  r.se_error = result.se_error;
  r.loglik = result.loglik;
  r.aic = result.aic;
  r.bic = result.bic;
  r.num_params = result.num_params;
  r.loglik_trace = result.loglik_trace;
  r.iterations = result.iterations;
  r.converged = result.converged;
  r.restart_index = result.restart_index;
  r.restart_failures = result.restart_failures;
  r.ridge_repairs = result.ridge_repairs;
  r.labels = result.labels;
  r.config = config;
  return r;
}

Json report_to_json(const FitReport& r) {
  Json j;
  j["format"] = std::string(kReportFormat);
  j["source"] = r.source;
  j["columns"] = r.columns;
  j["n"] = r.n;
  j["p"] = r.p;
  j["data_min"] = vector_json(r.data_min);
  j["data_max"] = vector_json(r.data_max);
  j["parameters"] = params_to_json(r.parameters);
  Json se;
  se["names"] = r.se_names;
  if (r.se) {
    se["values"] = vector_json(*r.se);
  } else {
    se["values"] = nullptr;
  }
  if (r.se_rcond) {
    se["rcond"] = *r.se_rcond;
  } else {
    se["rcond"] = nullptr;
  }
  se["error"] = r.se_error;
  j["standard_errors"] = std::move(se);
  j["loglik"] = r.loglik;
  j["aic"] = r.aic;
  j["bic"] = r.bic;
  j["num_params"] = r.num_params;
  Json conv;
  conv["converged"] = r.converged;
  conv["iterations"] = r.iterations;
  conv["restart_index"] = r.restart_index;
  conv["restart_failures"] = r.restart_failures;
  conv["ridge_repairs"] = r.ridge_repairs;
  conv["loglik_trace"] = r.loglik_trace;
  j["convergence"] = std::move(conv);
  j["config"] = em_config_to_json(r.config);
  j["labels"] = r.labels;
  return j;
}

FitReport report_from_json(const Json& j) {
  if (!j.is_object()) schema_error("", "expected an object");
  const std::string format = string_at(member(j, "", "format"), "/format");
  if (format != kReportFormat) schema_error("/format", "unsupported report format '" + format + "'");
  FitReport r(params_from_json(member(j, "", "parameters"), "/parameters"));
  r.source = string_at(member(j, "", "source"), "/source");
  const Json& cols = member(j, "", "columns");
  if (!cols.is_array()) schema_error("/columns", "expected an array of strings");
  for (std::size_t i = 0; i < cols.size(); ++i) r.columns.push_back(string_at(cols[i], "/columns/" + std::to_string(i)));
  r.n = integer_at<std::size_t>(member(j, "", "n"), "/n");
  r.p = integer_at<std::size_t>(member(j, "", "p"), "/p");
  r.data_min = vector_at(member(j, "", "data_min"), "/data_min", static_cast<Eigen::Index>(r.p));
  r.data_max = vector_at(member(j, "", "data_max"), "/data_max", static_cast<Eigen::Index>(r.p));
  if (static_cast<std::size_t>(r.parameters.dim()) != r.p) schema_error("/parameters", "dimension differs from p");

  const Json& se = member(j, "", "standard_errors");
  const Json& names = member(se, "/standard_errors", "names");
  if (!names.is_array()) schema_error("/standard_errors/names", "expected an array of strings");
  for (std::size_t i = 0; i < names.size(); ++i) {
    r.se_names.push_back(string_at(names[i], "/standard_errors/names/" + std::to_string(i)));
  }
  const Json& values = member(se, "/standard_errors", "values");
  if (!values.is_null()) {
    r.se = vector_at(values, "/standard_errors/values", static_cast<Eigen::Index>(r.se_names.size()));
  }
  const Json& rcond = member(se, "/standard_errors", "rcond");
  if (!rcond.is_null()) r.se_rcond = number_at(rcond, "/standard_errors/rcond");
  r.se_error = string_at(member(se, "/standard_errors", "error"), "/standard_errors/error");

  r.loglik = number_at(member(j, "", "loglik"), "/loglik");
  r.aic = number_at(member(j, "", "aic"), "/aic");
  r.bic = number_at(member(j, "", "bic"), "/bic");
  r.num_params = integer_at<std::size_t>(member(j, "", "num_params"), "/num_params");

  const Json& conv = member(j, "", "convergence");
  const Json& converged = member(conv, "/convergence", "converged");
  if (!converged.is_boolean()) schema_error("/convergence/converged", "expected a boolean");
  r.converged = converged.get<bool>();
  r.iterations = integer_at<int>(member(conv, "/convergence", "iterations"), "/convergence/iterations");
  r.restart_index = integer_at<int>(member(conv, "/convergence", "restart_index"), "/convergence/restart_index");
  const Json& failures = member(conv, "/convergence", "restart_failures");
  if (!failures.is_array()) schema_error("/convergence/restart_failures", "expected an array");
  for (std::size_t i = 0; i < failures.size(); ++i) {
    r.restart_failures.push_back(string_at(failures[i], "/convergence/restart_failures/" + std::to_string(i)));
  }
  r.ridge_repairs = integer_at<int>(member(conv, "/convergence", "ridge_repairs"), "/convergence/ridge_repairs");
  const Vector trace = vector_at(member(conv, "/convergence", "loglik_trace"), "/convergence/loglik_trace");
  r.loglik_trace.assign(trace.data(), trace.data() + trace.size());

  r.config = em_config_from_json(member(j, "", "config"), "/config");
  const Json& labels = member(j, "", "labels");
  if (!labels.is_array()) schema_error("/labels", "expected an array of integers");
  for (std::size_t i = 0; i < labels.size(); ++i) r.labels.push_back(integer_at<int>(labels[i], "/labels/" + std::to_string(i)));
  return r;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("error while writing '" + path.string() + "'");
}

void write_report(const std::filesystem::path& path, const FitReport& report) {
  write_text_file(path, report_to_json(report).dump(2) + "\n");
}

FitReport read_report(const std::filesystem::path& path) { return report_from_json(read_json_file(path)); }

std::string format_fit_summary(const FitReport& r) {
  const MixtureParams& th = r.parameters;
  const auto g = static_cast<std::size_t>(th.num_components());
  const auto p = r.p;
  const std::size_t sv = vech_size(p);

  // Index into the SE vector for a given layout block.
  auto se_at = [&](std::size_t idx) -> std::string {
    if (!r.se) return "-";
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << (*r.se)(static_cast<Eigen::Index>(idx));
    return s.str();
  };
  auto num = [](double v) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(3) << v;
    return s.str();
  };

  std::ostringstream out;
  out << "FM-MSL fit: g=" << g << ", p=" << p << ", n=" << r.n << " (" << r.source << ")\n";
  out << std::left << std::setw(14) << "parameter";
  for (std::size_t i = 1; i <= g; ++i) {
    out << std::right << std::setw(11) << ("est " + std::to_string(i)) << std::setw(9) << ("se " + std::to_string(i));
  }
  out << "\n";

  auto row = [&](const std::string& name, auto&& estimate, auto&& se_index) {
    out << std::left << std::setw(14) << name;
    for (std::size_t i = 0; i < g; ++i) {
      const auto idx = se_index(i);
      out << std::right << std::setw(11) << estimate(i) << std::setw(9) << (idx ? se_at(*idx) : std::string("-"));
    }
    out << "\n";
  };

  const std::size_t mu_start = g - 1;
  const std::size_t sigma_start = mu_start + g * p;
  const std::size_t gamma_start = sigma_start + g * sv;

  if (g > 1) {
    row(
        "w", [&](std::size_t i) { return num(th.weights()(static_cast<Eigen::Index>(i))); },
        [&](std::size_t i) -> std::optional<std::size_t> {
          if (i + 1 < g) return i;
          return std::nullopt;
        });
  }
  for (std::size_t k = 0; k < p; ++k) {
    row(
        "mu[" + std::to_string(k + 1) + "]",
        [&](std::size_t i) { return num(th.component(static_cast<Eigen::Index>(i)).mu()(static_cast<Eigen::Index>(k))); },
        [&](std::size_t i) -> std::optional<std::size_t> { return mu_start + i * p + k; });
  }
  std::size_t v = 0;
  for (std::size_t col = 0; col < p; ++col) {
    for (std::size_t rr = col; rr < p; ++rr, ++v) {
      row(
          "sigma[" + std::to_string(rr + 1) + "," + std::to_string(col + 1) + "]",
          [&](std::size_t i) {
            return num(th.component(static_cast<Eigen::Index>(i)).sigma()(static_cast<Eigen::Index>(rr),
                                                                        static_cast<Eigen::Index>(col)));
          },
          [&, v](std::size_t i) -> std::optional<std::size_t> { return sigma_start + i * sv + v; });
    }
  }
  for (std::size_t k = 0; k < p; ++k) {
    row(
        "gamma[" + std::to_string(k + 1) + "]",
        [&](std::size_t i) { return num(th.component(static_cast<Eigen::Index>(i)).gamma()(static_cast<Eigen::Index>(k))); },
        [&](std::size_t i) -> std::optional<std::size_t> { return gamma_start + i * p + k; });
  }
  out << std::fixed << std::setprecision(2);
  out << "loglik " << r.loglik << "  AIC " << r.aic << "  BIC " << r.bic << "  (d=" << r.num_params << ")\n";
  out << (r.converged ? "converged" : "NOT converged") << " after " << r.iterations << " iterations (restart "
      << (r.restart_index + 1) << " of " << r.config.restarts << ")\n";
  if (!r.se && !r.se_error.empty()) out << "standard errors unavailable: " << r.se_error << "\n";
  return out.str();
}

// ---------------------------------------------------------------------------

void write_simulated_csv(std::ostream& out, const SimulatedData& sim) {
  const auto p = sim.data.cols();
  for (Eigen::Index k = 0; k < p; ++k) out << "x" << (k + 1) << ",";
  out << "label\n";
  out << std::setprecision(17);
  for (Eigen::Index j = 0; j < sim.data.rows(); ++j) {
    for (Eigen::Index k = 0; k < p; ++k) out << sim.data(j, k) << ",";
    out << sim.labels[static_cast<std::size_t>(j)] << "\n";
  }
}

void write_study_table(std::ostream& out, const SimStudySummary& summary) {
  out << "n,component,parameter,true,mean,distance,used,failures\n";
  out << std::setprecision(10);
  for (const auto& s : summary.sizes) {
    for (const auto& w : s.weights) {
      out << s.n << "," << w.component << ",pi," << w.truth << "," << w.mean << "," << w.mse << "," << s.used << ","
          << s.failures << "\n";
    }
    for (const auto& b : s.blocks) {
      const auto p = static_cast<std::size_t>(b.parameter == "sigma" ? 0 : b.truth.size());
      std::vector<std::string> coords;
      if (b.parameter == "sigma") {
        // Recover p from the vech length.
        std::size_t q = 1;
        while (vech_size(q) < static_cast<std::size_t>(b.truth.size())) ++q;
        for (std::size_t col = 1; col <= q; ++col) {
          for (std::size_t row = col; row <= q; ++row) {
            coords.push_back("sigma[" + std::to_string(row) + "," + std::to_string(col) + "]");
          }
        }
      } else {
        for (std::size_t k = 1; k <= p; ++k) coords.push_back(b.parameter + "[" + std::to_string(k) + "]");
      }
      for (std::size_t k = 0; k < coords.size(); ++k) {
        out << s.n << "," << b.component << "," << coords[k] << "," << b.truth(static_cast<Eigen::Index>(k)) << ","
            << b.mean(static_cast<Eigen::Index>(k)) << "," << b.distance << "," << s.used << "," << s.failures << "\n";
      }
    }
  }
}

std::vector<ContourPoint> contour_grid(const FitReport& report, int grid, double margin) {
  if (report.p != 2 || report.parameters.dim() != 2) {
    throw DataError("contour export needs a two-dimensional fit, report has p=" + std::to_string(report.p));
  }
  if (grid < 2) throw UsageError("grid must be at least 2");
  if (!(margin >= 0.0)) throw UsageError("margin must be non-negative");

  std::array<Vector, 2> axes;
  for (int a = 0; a < 2; ++a) {
    const double lo = report.data_min(a);
    const double hi = report.data_max(a);
    double range = hi - lo;
    if (!(range > 0.0)) range = 1.0;
    axes[static_cast<std::size_t>(a)] = Vector::LinSpaced(grid, lo - margin * range, hi + margin * range);
  }

  DataMatrix points(static_cast<Eigen::Index>(grid) * grid, 2);
  Eigen::Index k = 0;
  for (Eigen::Index ix = 0; ix < grid; ++ix) {
    for (Eigen::Index iy = 0; iy < grid; ++iy) {
      points(k, 0) = axes[0](ix);
      points(k, 1) = axes[1](iy);
      ++k;
    }
  }
  const Vector logd = log_sum_exp_rows(component_log_terms(points, report.parameters));
  std::vector<ContourPoint> out;
  out.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.push_back({points(i, 0), points(i, 1), std::exp(logd(i))});
  return out;
}

void write_contour_csv(std::ostream& out, const std::vector<ContourPoint>& points) {
  out << "x,y,density\n" << std::setprecision(17);
  for (const auto& pt : points) out << pt.x << "," << pt.y << "," << pt.density << "\n";
}

}  // namespace fmmsl
