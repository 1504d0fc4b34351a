#pragma once

#include "fmmsl/em.hpp"
#include "fmmsl/mixture.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace fmmsl {

struct SimulatedData {
  DataMatrix data;
  std::vector<int> labels;  ///< generating component, 1-based
};

/// Draws the component label from the weights, then the observation from that component.
SimulatedData simulate_mixture(const MixtureParams& theta, std::size_t n, std::uint64_t seed);

/// perm[i] is the fitted component matched to true component i (0-based). Minimizes the
/// summed Euclidean distance between fitted and true locations, exhaustively over all
/// g! assignments; the first minimizer in lexicographic order wins.
std::vector<int> match_labels(const MixtureParams& theta_hat, const MixtureParams& theta_true);

struct StudyConfig {
  StudyConfig(MixtureParams truth, std::vector<std::size_t> sizes)
      : theta_true(std::move(truth)), sample_sizes(std::move(sizes)) {}

  MixtureParams theta_true;
  std::vector<std::size_t> sample_sizes;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  EmConfig em;
  /// Workers over replicates; 0 picks default_thread_count().
  std::size_t threads = 0;
};

/// Summary of one parameter block of one component.
struct BlockSummary {
  int component = 1;          ///< 1-based
  std::string parameter;      ///< "mu", "sigma" (vech), or "gamma"
  Vector truth;
  Vector mean;
  double distance = 0.0;      ///< mean over replicates of ||estimate - truth||_2
};

struct WeightSummary {
  int component = 1;
  double truth = 0.0;
  double mean = 0.0;
  double mse = 0.0;
};

struct SizeSummary {
  std::size_t n = 0;
  std::size_t used = 0;       ///< replicates entering the averages
  std::size_t failures = 0;   ///< replicates that failed or did not converge
  std::vector<std::string> failure_reasons;
  std::vector<WeightSummary> weights;  ///< components 1..g-1
  std::vector<BlockSummary> blocks;
};

struct SimStudySummary {
  std::vector<SizeSummary> sizes;
};

/// Throws UsageError on an invalid study configuration.
void validate(const StudyConfig& config);

SimStudySummary run_study(const StudyConfig& config);

}  // namespace fmmsl
