#include "fmmsl/em.hpp"

#include "fmmsl/error.hpp"
#include "fmmsl/kmeans.hpp"
#include "fmmsl/parallel.hpp"
#include "fmmsl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace fmmsl {

namespace {

constexpr std::uint64_t kTagRestart = 0x7265737461727431ULL;
constexpr std::uint64_t kTagInit = 0x696e69746b6d6e73ULL;

}  // namespace

std::string_view to_string(StopRule rule) {
  switch (rule) {
    case StopRule::kParamNorm: return "param-norm";
    case StopRule::kAbsLoglik: return "abs-loglik";
    case StopRule::kRelLoglik: return "rel-loglik";
  }
  return "rel-loglik";
}

StopRule parse_stop_rule(std::string_view name) {
  if (name == "param-norm") return StopRule::kParamNorm;
  if (name == "abs-loglik") return StopRule::kAbsLoglik;
  if (name == "rel-loglik") return StopRule::kRelLoglik;
  throw UsageError("unknown stop rule '" + std::string(name) +
                   "' (expected param-norm, abs-loglik or rel-loglik)");
}

std::string_view to_string(MStepUpdate update) {
  return update == MStepUpdate::kJoint ? "joint" : "printed";
}

MStepUpdate parse_m_step_update(std::string_view name) {
  if (name == "joint") return MStepUpdate::kJoint;
  if (name == "printed") return MStepUpdate::kPrinted;
  throw UsageError("unknown M-step update '" + std::string(name) + "' (expected joint or printed)");
}

void validate(const EmConfig& config) {
  if (config.g < 1) throw UsageError("g must be at least 1");
  if (!(config.tol > 0.0)) throw UsageError("tol must be positive");
  if (config.max_iter < 1) throw UsageError("max_iter must be at least 1");
  if (config.restarts < 1) throw UsageError("restarts must be at least 1");
  if (!(config.eps_d > 0.0)) throw UsageError("eps_d must be positive");
  if (config.min_mass && !(*config.min_mass > 0.0)) throw UsageError("min_mass must be positive");
}

EStepCache e_step(const DataMatrix& data, const MixtureParams& theta, double eps_d) {
  const Eigen::Index n = data.rows();
  const Eigen::Index g = theta.num_components();
  const Matrix log_terms = component_log_terms(data, theta);
  const Vector lse = log_sum_exp_rows(log_terms);

  EStepCache cache;
  cache.z.resize(n, g);
  cache.v1.resize(n, g);
  cache.v2.resize(n, g);
  cache.loglik = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    cache.loglik += lse(j);
    double s = 0.0;
    for (Eigen::Index i = 0; i < g; ++i) {
      cache.z(j, i) = std::exp(log_terms(j, i) - lse(j));
      s += cache.z(j, i);
    }
    cache.z.row(j) /= s;
  }

  for (Eigen::Index i = 0; i < g; ++i) {
    const MslParams& c = theta.component(i);
    const double a = c.alpha();
    const Vector d = msl_mahalanobis_rows(data, c);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double root = std::sqrt(std::max(d(j), eps_d));
      cache.v1(j, i) = a / root;
      cache.v2(j, i) = (1.0 + a * root) / (a * a);
    }
  }
  return cache;
}

MixtureParams m_step(const DataMatrix& data, const EStepCache& cache, const MixtureParams& theta_old,
                     double min_mass, MStepUpdate update, int* ridge_repairs) {
  const Eigen::Index n = data.rows();
  const Eigen::Index g = theta_old.num_components();

  Vector weights(g);
  std::vector<MslParams> comps;
  comps.reserve(static_cast<std::size_t>(g));
  for (Eigen::Index i = 0; i < g; ++i) {
    const auto z = cache.z.col(i);
    const Vector zv1 = z.cwiseProduct(cache.v1.col(i));
    const double s0 = z.sum();
    const double s1 = zv1.sum();
    const double s2 = z.dot(cache.v2.col(i));
    if (!(s0 >= min_mass)) {
      std::ostringstream msg;
      msg << "component " << (i + 1) << " degenerated (responsibility mass " << s0 << " < " << min_mass << ")";
      throw NumericalError(msg.str());
    }
    const Vector y0 = data.transpose() * z;
    const Vector y1 = data.transpose() * zv1;

    const MslParams& old = theta_old.component(i);
    const Vector gamma = (s1 * y0 - s0 * y1) / (s1 * s2 - s0 * s0);
    const Vector& gamma_for_mu = update == MStepUpdate::kJoint ? gamma : old.gamma();
    const Vector mu = (y1 - s0 * gamma_for_mu) / s1;

    const Vector& mu_for_sigma = update == MStepUpdate::kJoint ? mu : old.mu();
    const Vector& gamma_for_sigma = update == MStepUpdate::kJoint ? gamma : old.gamma();
    const Matrix centered = data.rowwise() - mu_for_sigma.transpose();
    Matrix sigma = centered.transpose() * zv1.asDiagonal() * centered;
    sigma -= s2 * gamma_for_sigma * gamma_for_sigma.transpose();
    sigma /= s0;
    sigma = symmetrize(sigma);

    bool repaired = false;
    if (!repair_positive_definite(sigma, 1e-10, &repaired)) {
      throw NumericalError("component " + std::to_string(i + 1) + ": scatter update cannot be made positive definite");
    }
    if (repaired && ridge_repairs) ++*ridge_repairs;
    weights(i) = s0 / static_cast<double>(n);
    try {
      comps.emplace_back(mu, std::move(sigma), gamma);
    } catch (const DataError& e) {
      throw NumericalError("component " + std::to_string(i + 1) + ": " + e.what());
    }
  }
  weights /= weights.sum();
  return MixtureParams(std::move(weights), std::move(comps));
}

MixtureParams init_kmeans(const DataMatrix& data, int g, std::uint64_t seed, int max_attempts) {
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (g < 1) throw UsageError("g must be at least 1");
  if (n < static_cast<Eigen::Index>(g) * (p + 1)) {
    throw DataError("k-means initialization needs at least g(p+1) = " + std::to_string(g * (p + 1)) +
                    " observations, got " + std::to_string(n));
  }

  std::string last_problem = "no attempt made";
  for (int attempt = 0; attempt < std::max(1, max_attempts); ++attempt) {
    Engine rng = make_engine(derive_seed(seed, static_cast<std::uint64_t>(attempt), kTagInit));
    const KMeansResult km = kmeans(data, g, rng);
    if (km.has_empty_cluster) {
      last_problem = "k-means left a cluster empty";
      continue;
    }

    Vector weights(g);
    std::vector<MslParams> comps;
    bool ok = true;
    for (int c = 0; c < g && ok; ++c) {
      const auto size = km.sizes[static_cast<std::size_t>(c)];
      if (size < static_cast<std::size_t>(p + 1)) {
        last_problem = "k-means cluster " + std::to_string(c + 1) + " has fewer than p+1 points";
        ok = false;
        break;
      }
      Matrix members(static_cast<Eigen::Index>(size), p);
      Eigen::Index k = 0;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (km.labels[static_cast<std::size_t>(j)] == c) members.row(k++) = data.row(j);
      }
      const double m = static_cast<double>(size);
      const Vector mu = members.colwise().mean().transpose();
      const Matrix centered = members.rowwise() - mu.transpose();
      const Matrix sigma = symmetrize(centered.transpose() * centered / m);
      Vector gamma(p);
      for (Eigen::Index q = 0; q < p; ++q) {
        const double m2 = centered.col(q).array().square().mean();
        const double m3 = centered.col(q).array().cube().mean();
        gamma(q) = m2 > 0.0 ? m3 / std::pow(m2, 1.5) : 0.0;
      }
      weights(c) = m / static_cast<double>(n);
      try {
        comps.emplace_back(mu, sigma, gamma);
      } catch (const DataError& e) {
        last_problem = "k-means cluster " + std::to_string(c + 1) + ": " + e.what();
        ok = false;
      }
    }
    if (!ok) continue;
    weights /= weights.sum();
    return MixtureParams(std::move(weights), std::move(comps));
  }
  throw NumericalError("k-means initialization failed after " + std::to_string(std::max(1, max_attempts)) +
                       " attempts: " + last_problem);
}

namespace {

bool should_stop(const EmConfig& config, double l_old, double l_new, const MixtureParams& t_old,
                 const MixtureParams& t_new) {
  switch (config.stop_rule) {
    case StopRule::kAbsLoglik: return std::abs(l_new - l_old) < config.tol;
    case StopRule::kRelLoglik: return std::abs(l_new / l_old - 1.0) < config.tol;
    case StopRule::kParamNorm:
      return (flatten_parameters(t_new) - flatten_parameters(t_old)).norm() < config.tol;
  }
  return false;
}

}  // namespace

EmRun run_em(const DataMatrix& data, MixtureParams init, const EmConfig& config) {
  validate(config);
  const double min_mass = config.min_mass.value_or(static_cast<double>(data.cols()) + 1.0);

  MixtureParams theta = std::move(init);
  EStepCache cache = e_step(data, theta, config.eps_d);
  std::vector<double> trace{cache.loglik};
  if (!std::isfinite(cache.loglik)) throw NumericalError("non-finite log-likelihood at iteration 0");

  int repairs = 0;
  int iterations = 0;
  bool converged = false;
  for (int k = 1; k <= config.max_iter; ++k) {
    MixtureParams next = m_step(data, cache, theta, min_mass, config.update, &repairs);
    EStepCache next_cache = e_step(data, next, config.eps_d);
    if (!std::isfinite(next_cache.loglik)) {
      throw NumericalError("non-finite log-likelihood at iteration " + std::to_string(k));
    }
    trace.push_back(next_cache.loglik);
    iterations = k;
    const bool stop = should_stop(config, cache.loglik, next_cache.loglik, theta, next);
    theta = std::move(next);
    cache = std::move(next_cache);
    if (stop) {
      converged = true;
      break;
    }
  }
  return EmRun{std::move(theta), std::move(trace), iterations, converged, repairs, std::move(cache)};
}

FitResult fit(const DataMatrix& data, const EmConfig& config) {
  validate(config);
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (n < 1 || p < 1) throw DataError("empty data matrix");
  require_finite(data, "data");
  if (n <= static_cast<Eigen::Index>(config.g) * (p + 1)) {
    throw DataError("g=" + std::to_string(config.g) + " is too large for n=" + std::to_string(n) +
                    " observations in dimension " + std::to_string(p) + " (need n > g(p+1))");
  }

  const auto restarts = static_cast<std::size_t>(config.restarts);
  std::vector<std::optional<EmRun>> runs(restarts);
  std::vector<std::string> failures(restarts);
  std::vector<bool> numerical(restarts, false);
  parallel_for(
      restarts,
      [&](std::size_t r) {
        try {
          const std::uint64_t seed = derive_seed(config.seed, r, kTagRestart);
          MixtureParams init = init_kmeans(data, config.g, seed, config.restarts);
          runs[r] = run_em(data, std::move(init), config);
        } catch (const Error& e) {
          failures[r] = "restart " + std::to_string(r + 1) + ": " + e.what();
          numerical[r] = e.kind() == ErrorKind::kNumerical;
        }
      },
      config.threads == 0 ? default_thread_count() : config.threads);

  std::optional<std::size_t> best;
  for (std::size_t r = 0; r < restarts; ++r) {
    if (!runs[r]) continue;
    if (!best) {
      best = r;
      continue;
    }
    const EmRun& a = *runs[r];
    const EmRun& b = *runs[*best];
    const double la = a.loglik_trace.back();
    const double lb = b.loglik_trace.back();
    if (la > lb || (la == lb && a.iterations < b.iterations)) best = r;
  }

  std::vector<std::string> failure_list;
  for (const auto& f : failures) {
    if (!f.empty()) failure_list.push_back(f);
  }
  if (!best) {
    std::string msg = "all " + std::to_string(restarts) + " restarts failed";
    for (const auto& f : failure_list) msg += "; " + f;
    const bool all_numerical = std::all_of(numerical.begin(), numerical.end(), [](bool b) { return b; });
    if (all_numerical) throw NumericalError(msg);
    throw ConvergenceError(msg);
  }

  EmRun& run = *runs[*best];
  const double ll = run.loglik_trace.back();
  const InformationCriteria ic = information_criteria(ll, static_cast<std::size_t>(config.g),
                                                      static_cast<std::size_t>(p), static_cast<std::size_t>(n));
  FitResult result(std::move(run.theta));
  result.loglik_trace = std::move(run.loglik_trace);
  result.iterations = run.iterations;
  result.converged = run.converged;
  result.z_final = std::move(run.final_cache.z);
  result.labels = map_labels(result.z_final);
  result.loglik = ll;
  result.aic = ic.aic;
  result.bic = ic.bic;
  result.num_params = ic.num_params;
  result.restart_index = static_cast<int>(*best);
  result.restart_failures = std::move(failure_list);
  result.ridge_repairs = run.ridge_repairs;
  if (config.compute_se) {
    try {
      result.se = standard_errors(empirical_info(data, result.theta, config.eps_d));
    } catch (const Error& e) {
      result.se_error = e.what();
    }
  }
  return result;
}

}  // namespace fmmsl
