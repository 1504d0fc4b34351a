#pragma once

#include "fmmsl/linalg.hpp"
#include "fmmsl/msl.hpp"

#include <span>
#include <vector>

namespace fmmsl {

/// Finite mixture of g MSL components sharing a dimension p.
class MixtureParams {
 public:
  /// Weights must lie in [0, 1] and sum to 1 within 1e-12; they are renormalized to
  /// sum exactly to 1. Throws DataError otherwise or when component dimensions differ.
  MixtureParams(Vector weights, std::vector<MslParams> components);

  Eigen::Index num_components() const { return weights_.size(); }
  Eigen::Index dim() const { return components_.front().dim(); }
  const Vector& weights() const { return weights_; }
  const std::vector<MslParams>& components() const { return components_; }
  const MslParams& component(Eigen::Index i) const { return components_[static_cast<std::size_t>(i)]; }

  /// Component i of the result is component perm[i] of this mixture.
  MixtureParams permuted(std::span<const int> perm) const;

 private:
  Vector weights_;
  std::vector<MslParams> components_;
};

/// log(pi_i) + log f_i(y) for every row (n x g). Zero weights give -inf entries.
Matrix component_log_terms(const DataMatrix& data, const MixtureParams& theta);

/// Row-wise log-sum-exp of an n x g matrix of log terms.
Vector log_sum_exp_rows(const Matrix& log_terms);

double mixture_logpdf(const Vector& y, const MixtureParams& theta);

/// Observed-data log-likelihood, summed in row order.
double loglik(const DataMatrix& data, const MixtureParams& theta);

/// Posterior component probabilities for one observation.
Vector responsibilities(const Vector& y, const MixtureParams& theta);

/// Responsibilities for all rows (n x g), each row on the simplex.
Matrix responsibility_matrix(const DataMatrix& data, const MixtureParams& theta);

/// MAP labels in 1..g, ties going to the lower index.
std::vector<int> classify(const DataMatrix& data, const MixtureParams& theta);

/// argmax per row of an n x g responsibility matrix, as 1-based labels.
std::vector<int> map_labels(const Matrix& z);

}  // namespace fmmsl
