#pragma once

#include "fmmsl/inference.hpp"
#include "fmmsl/linalg.hpp"
#include "fmmsl/mixture.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fmmsl {

enum class StopRule {
  kParamNorm,  ///< ||theta_{k+1} - theta_k|| < tol over the flattened parameter vector
  kAbsLoglik,  ///< |l_{k+1} - l_k| < tol
  kRelLoglik,  ///< |l_{k+1} / l_k - 1| < tol
};

std::string_view to_string(StopRule rule);
/// Accepts "param-norm", "abs-loglik", "rel-loglik". Throws UsageError otherwise.
StopRule parse_stop_rule(std::string_view name);

/// Which parameter values the location and scatter updates condition on.
enum class MStepUpdate {
  /// gamma from its closed form, then mu and Sigma evaluated at the new gamma (and new
  /// mu for Sigma). This is the exact maximizer of the expected complete-data
  /// log-likelihood, so every iteration is a true EM step.
  kJoint,
  /// mu uses the previous gamma and Sigma uses the previous mu and gamma, exactly as
  /// the updating equations are usually printed. Kept for comparison.
  kPrinted,
};

std::string_view to_string(MStepUpdate update);
MStepUpdate parse_m_step_update(std::string_view name);

struct EmConfig {
  int g = 2;
  double tol = 1e-6;
  int max_iter = 2000;
  StopRule stop_rule = StopRule::kRelLoglik;
  int restarts = 10;
  std::uint64_t seed = 0;
  double eps_d = kDefaultEpsD;
  /// Minimum responsibility mass per component; defaults to p + 1 when unset.
  std::optional<double> min_mass;
  MStepUpdate update = MStepUpdate::kJoint;
  bool compute_se = true;
  /// Worker threads for restarts; 0 picks default_thread_count().
  std::size_t threads = 0;
};

/// Throws UsageError on an invalid configuration.
void validate(const EmConfig& config);

/// Per-observation, per-component E-step quantities (all n x g).
struct EStepCache {
  Matrix z;   ///< responsibilities
  Matrix v1;  ///< E(V | y) under each component
  Matrix v2;  ///< E(1/V | y) under each component
  double loglik = 0.0;  ///< observed-data log-likelihood at the parameters used
};

EStepCache e_step(const DataMatrix& data, const MixtureParams& theta, double eps_d = kDefaultEpsD);

/// Throws NumericalError when a component's responsibility mass drops below min_mass or
/// its scatter update cannot be repaired to positive definiteness.
MixtureParams m_step(const DataMatrix& data, const EStepCache& cache, const MixtureParams& theta_old,
                     double min_mass, MStepUpdate update = MStepUpdate::kJoint,
                     int* ridge_repairs = nullptr);

/// k-means partition turned into starting values: cluster proportions, means, scatter
/// matrices (divisor = cluster size), and per-coordinate skewness coefficients
/// m3 / m2^{3/2} as skewness vectors. A partition with an empty or rank-deficient
/// cluster is redrawn from a derived seed, up to max_attempts times.
MixtureParams init_kmeans(const DataMatrix& data, int g, std::uint64_t seed, int max_attempts = 10);

/// A single EM run from fixed starting values.
struct EmRun {
  MixtureParams theta;
  std::vector<double> loglik_trace;  ///< l(theta_0), l(theta_1), ...
  int iterations = 0;                ///< M-steps performed
  bool converged = false;
  int ridge_repairs = 0;
  EStepCache final_cache;            ///< E-step at the returned theta
};

EmRun run_em(const DataMatrix& data, MixtureParams init, const EmConfig& config);

struct FitResult {
  explicit FitResult(MixtureParams estimate) : theta(std::move(estimate)) {}

  MixtureParams theta;
  std::vector<double> loglik_trace;
  int iterations = 0;
  bool converged = false;
  Matrix z_final;
  std::vector<int> labels;  ///< MAP labels, 1-based
  std::optional<StandardErrors> se;
  std::string se_error;     ///< reason when SEs were requested but unavailable
  double loglik = 0.0;
  double aic = 0.0;
  double bic = 0.0;
  std::size_t num_params = 0;
  int restart_index = 0;    ///< 0-based index of the winning restart
  std::vector<std::string> restart_failures;
  int ridge_repairs = 0;
};

/// Multi-restart EM. The restart with the highest final log-likelihood wins, ties going
/// to fewer iterations and then to the lower restart index.
FitResult fit(const DataMatrix& data, const EmConfig& config);

}  // namespace fmmsl
