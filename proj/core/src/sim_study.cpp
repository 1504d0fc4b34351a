#include "fmmsl/sim_study.hpp"

#include "fmmsl/error.hpp"
#include "fmmsl/parallel.hpp"
#include "fmmsl/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

namespace fmmsl {

namespace {

constexpr std::uint64_t kTagSize = 0x73697a6573697a65ULL;
constexpr std::uint64_t kTagData = 0x6461746164617461ULL;
constexpr std::uint64_t kTagFit = 0x6669746669746669ULL;

}  // namespace

SimulatedData simulate_mixture(const MixtureParams& theta, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("simulate_mixture: n must be at least 1");
  Engine rng = make_engine(seed);
  const Vector& w = theta.weights();
  std::discrete_distribution<int> pick(w.data(), w.data() + w.size());

  SimulatedData out;
  out.data.resize(static_cast<Eigen::Index>(n), theta.dim());
  out.labels.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const int c = pick(rng);
    out.labels[j] = c + 1;
    out.data.row(static_cast<Eigen::Index>(j)) = msl_draw(theta.component(c), rng).transpose();
  }
  return out;
}

std::vector<int> match_labels(const MixtureParams& theta_hat, const MixtureParams& theta_true) {
  const Eigen::Index g = theta_true.num_components();
  if (theta_hat.num_components() != g || theta_hat.dim() != theta_true.dim()) {
    throw DataError("match_labels: mixtures differ in component count or dimension");
  }
  Matrix cost(g, g);  // cost(true i, fitted k)
  for (Eigen::Index i = 0; i < g; ++i) {
    for (Eigen::Index k = 0; k < g; ++k) {
      cost(i, k) = (theta_hat.component(k).mu() - theta_true.component(i).mu()).norm();
    }
  }
  std::vector<int> perm(static_cast<std::size_t>(g));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (Eigen::Index i = 0; i < g; ++i) c += cost(i, perm[static_cast<std::size_t>(i)]);
    if (c < best_cost) {
      best_cost = c;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

void validate(const StudyConfig& config) {
  validate(config.em);
  if (config.replicates < 1) throw UsageError("replicates must be at least 1");
  if (config.sample_sizes.empty()) throw UsageError("at least one sample size is required");
  if (config.em.g != config.theta_true.num_components()) {
    throw UsageError("em.g does not match the number of true components");
  }
  const auto min_n = static_cast<std::size_t>(config.theta_true.num_components() * (config.theta_true.dim() + 1));
  for (const auto n : config.sample_sizes) {
    if (n < min_n) {
      throw UsageError("sample size " + std::to_string(n) + " is below g(p+1) = " + std::to_string(min_n));
    }
  }
}

namespace {

struct ReplicateOutcome {
  std::optional<MixtureParams> theta;  // label-matched estimate
  std::string failure;
};

Vector block_of(const MslParams& c, const std::string& name) {
  if (name == "mu") return c.mu();
  if (name == "sigma") return vech(c.sigma());
  return c.gamma();
}

}  // namespace

SimStudySummary run_study(const StudyConfig& config) {
  validate(config);
  const MixtureParams& truth = config.theta_true;
  const Eigen::Index g = truth.num_components();
  const std::size_t threads = config.threads == 0 ? default_thread_count() : config.threads;

  EmConfig em = config.em;
  em.compute_se = false;
  em.threads = 1;

  SimStudySummary summary;
  for (std::size_t s = 0; s < config.sample_sizes.size(); ++s) {
    const std::size_t n = config.sample_sizes[s];
    const std::uint64_t size_seed = derive_seed(config.seed, n, kTagSize);

    std::vector<ReplicateOutcome> outcomes(config.replicates);
    parallel_for(
        config.replicates,
        [&](std::size_t r) {
          try {
            const SimulatedData sim = simulate_mixture(truth, n, derive_seed(size_seed, r, kTagData));
            EmConfig local = em;
            local.seed = derive_seed(size_seed, r, kTagFit);
            const FitResult fitted = fit(sim.data, local);
            if (!fitted.converged) {
              outcomes[r].failure = "replicate " + std::to_string(r + 1) + ": did not converge";
              return;
            }
            const std::vector<int> perm = match_labels(fitted.theta, truth);
            outcomes[r].theta = fitted.theta.permuted(perm);
          } catch (const Error& e) {
            outcomes[r].failure = "replicate " + std::to_string(r + 1) + ": " + e.what();
          }
        },
        threads);

    SizeSummary size;
    size.n = n;
    std::vector<const MixtureParams*> ok;
    for (const auto& o : outcomes) {
      if (o.theta) {
        ok.push_back(&*o.theta);
      } else {
        ++size.failures;
        size.failure_reasons.push_back(o.failure);
      }
    }
    size.used = ok.size();
    const double count = static_cast<double>(ok.size());

    for (Eigen::Index i = 0; i + 1 < g; ++i) {
      WeightSummary w;
      w.component = static_cast<int>(i) + 1;
      w.truth = truth.weights()(i);
      double sum = 0.0;
      double sq = 0.0;
      for (const auto* est : ok) {
        const double e = est->weights()(i);
        sum += e;
        sq += (e - w.truth) * (e - w.truth);
      }
      w.mean = ok.empty() ? std::numeric_limits<double>::quiet_NaN() : sum / count;
      w.mse = ok.empty() ? std::numeric_limits<double>::quiet_NaN() : sq / count;
      size.weights.push_back(w);
    }

    for (Eigen::Index i = 0; i < g; ++i) {
      for (const std::string name : {"mu", "sigma", "gamma"}) {
        BlockSummary b;
        b.component = static_cast<int>(i) + 1;
        b.parameter = name;
        b.truth = block_of(truth.component(i), name);
        b.mean = Vector::Zero(b.truth.size());
        double dist = 0.0;
        for (const auto* est : ok) {
          const Vector e = block_of(est->component(i), name);
          b.mean += e;
          dist += (e - b.truth).norm();
        }
        if (ok.empty()) {
          b.mean.setConstant(std::numeric_limits<double>::quiet_NaN());
          b.distance = std::numeric_limits<double>::quiet_NaN();
        } else {
          b.mean /= count;
          b.distance = dist / count;
        }
        size.blocks.push_back(std::move(b));
      }
    }
    summary.sizes.push_back(std::move(size));
  }
  return summary;
}

}  // namespace fmmsl
