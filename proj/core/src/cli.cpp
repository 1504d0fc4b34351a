#include "fmmsl/cli.hpp"

#include "fmmsl/em.hpp"
#include "fmmsl/error.hpp"
#include "fmmsl/io.hpp"
#include "fmmsl/sim_study.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace fmmsl {

namespace {

struct FitOptions {
  std::string data;
  std::string columns;
  std::string out;
  std::string stop_rule = "rel-loglik";
  std::string m_step = "joint";
  EmConfig em;
  bool se = true;
};

struct SimulateOptions {
  std::string params;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::string out;
};

struct StudyOptions {
  std::string config;
  std::string out;
  std::size_t threads = 0;
};

struct ContourOptions {
  std::string report;
  int grid = 100;
  double margin = 0.1;
  std::string out;
};

int cmd_fit(FitOptions opt, std::ostream& out, std::ostream& err) {
  opt.em.stop_rule = parse_stop_rule(opt.stop_rule);
  opt.em.update = parse_m_step_update(opt.m_step);
  opt.em.compute_se = opt.se;
  validate(opt.em);

  const Dataset ds = read_dataset(opt.data, split_column_list(opt.columns), "");
  const FitResult result = fit(ds.data, opt.em);
  const FitReport report = make_report(result, ds, opt.em);
  write_report(opt.out, report);
  out << format_fit_summary(report);
  if (!result.converged) {
    err << "fit did not converge within " << opt.em.max_iter << " iterations; report written to " << opt.out << "\n";
    return static_cast<int>(ErrorKind::kConvergence);
  }
  return 0;
}

int cmd_simulate(const SimulateOptions& opt, std::ostream& out) {
  const MixtureParams theta = read_params_file(opt.params);
  const SimulatedData sim = simulate_mixture(theta, opt.n, opt.seed);
  std::ostringstream csv;
  write_simulated_csv(csv, sim);
  write_text_file(opt.out, csv.str());
  out << "wrote " << opt.n << " rows to " << opt.out << "\n";
  return 0;
}

int cmd_simstudy(const StudyOptions& opt, std::ostream& out, std::ostream& err) {
  StudyConfig config = read_study_config(opt.config);
  if (opt.threads > 0) config.threads = opt.threads;
  const SimStudySummary summary = run_study(config);
  std::ostringstream csv;
  write_study_table(csv, summary);
  write_text_file(opt.out, csv.str());

  out << std::fixed << std::setprecision(4);
  for (const auto& s : summary.sizes) {
    out << "n=" << s.n << ": " << s.used << " replicates used, " << s.failures << " failed\n";
    for (const auto& w : s.weights) out << "  pi_" << w.component << " mean " << w.mean << "  MSE " << w.mse << "\n";
    for (const auto& b : s.blocks) out << "  " << b.parameter << "_" << b.component << " distance " << b.distance << "\n";
    for (const auto& reason : s.failure_reasons) err << "  " << reason << "\n";
  }
  return 0;
}

int cmd_contour(const ContourOptions& opt, std::ostream& out) {
  const FitReport report = read_report(opt.report);
  const auto points = contour_grid(report, opt.grid, opt.margin);
  std::ostringstream csv;
  write_contour_csv(csv, points);
  write_text_file(opt.out, csv.str());
  out << "wrote " << points.size() << " grid points to " << opt.out << "\n";
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite mixtures of multivariate skew Laplace distributions"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit_cmd = app.add_subcommand("fit", "Fit a mixture by EM and write a JSON report");
  fit_cmd->add_option("--data", fit_opt.data, "Delimited text file with a header row")->required();
  fit_cmd->add_option("--columns", fit_opt.columns, "Comma-separated column names (default: all but 'label')");
  fit_cmd->add_option("--g", fit_opt.em.g, "Number of components")->capture_default_str();
  fit_cmd->add_option("--tol", fit_opt.em.tol, "Convergence tolerance")->capture_default_str();
  fit_cmd->add_option("--max-iter", fit_opt.em.max_iter, "Iteration cap per restart")->capture_default_str();
  fit_cmd->add_option("--restarts", fit_opt.em.restarts, "Number of k-means restarts")->capture_default_str();
  fit_cmd->add_option("--seed", fit_opt.em.seed, "Master seed")->capture_default_str();
  fit_cmd->add_option("--stop-rule", fit_opt.stop_rule, "param-norm | abs-loglik | rel-loglik")->capture_default_str();
  fit_cmd->add_option("--m-step", fit_opt.m_step, "joint | printed")->capture_default_str();
  fit_cmd->add_flag("--se,!--no-se", fit_opt.se, "Compute standard errors");
  fit_cmd->add_option("--threads", fit_opt.em.threads, "Worker threads (0: FMMSL_THREADS or hardware)");
  fit_cmd->add_option("--out", fit_opt.out, "Report path")->required();

  SimulateOptions sim_opt;
  auto* sim_cmd = app.add_subcommand("simulate", "Draw a sample from a parameter file");
  sim_cmd->add_option("--params", sim_opt.params, "Parameter block or fit report")->required();
  sim_cmd->add_option("--n", sim_opt.n, "Number of rows")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sim_opt.seed, "Seed")->capture_default_str();
  sim_cmd->add_option("--out", sim_opt.out, "CSV output path")->required();

  StudyOptions study_opt;
  auto* study_cmd = app.add_subcommand("simstudy", "Run a Monte Carlo replication study");
  study_cmd->add_option("--config", study_opt.config, "Study configuration (JSON)")->required();
  study_cmd->add_option("--threads", study_opt.threads, "Worker threads, overrides the config");
  study_cmd->add_option("--out", study_opt.out, "CSV summary table path")->required();

  ContourOptions contour_opt;
  auto* contour_cmd = app.add_subcommand("contour", "Export the fitted density on a grid (p = 2)");
  contour_cmd->add_option("--report", contour_opt.report, "Fit report")->required();
  contour_cmd->add_option("--grid", contour_opt.grid, "Points per axis")->capture_default_str()->check(
      CLI::Range(2, 100000));
  contour_cmd->add_option("--margin", contour_opt.margin, "Expansion of the data range per side, relative to it")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  contour_cmd->add_option("--out", contour_opt.out, "CSV output path")->required();

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());  // CLI11 consumes a reversed vector
  if (!args.empty()) app.name(args.front());

  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (e.get_exit_code() != 0) return static_cast<int>(ErrorKind::kUsage);
    return 0;
  }

  try {
    if (*fit_cmd) return cmd_fit(fit_opt, out, err);
    if (*sim_cmd) return cmd_simulate(sim_opt, out);
    if (*study_cmd) return cmd_simstudy(study_opt, out, err);
    if (*contour_cmd) return cmd_contour(contour_opt, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return static_cast<int>(ErrorKind::kNumerical);
  }
  return static_cast<int>(ErrorKind::kUsage);
}

}  // namespace fmmsl
