#include "fmmsl/mixture.hpp"

#include "fmmsl/error.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace fmmsl {

MixtureParams::MixtureParams(Vector weights, std::vector<MslParams> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (components_.empty()) throw DataError("mixture: at least one component is required");
  if (weights_.size() != static_cast<Eigen::Index>(components_.size())) {
    throw DataError("mixture: " + std::to_string(weights_.size()) + " weights for " +
                    std::to_string(components_.size()) + " components");
  }
  const Eigen::Index p = components_.front().dim();
  for (const auto& c : components_) {
    if (c.dim() != p) throw DataError("mixture: components have different dimensions");
  }
  for (Eigen::Index i = 0; i < weights_.size(); ++i) {
    const double w = weights_(i);
    if (!std::isfinite(w) || w < 0.0 || w > 1.0) {
      throw DataError("mixture: weight " + std::to_string(i + 1) + " is outside [0, 1]");
    }
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw DataError("mixture: weights sum to " + std::to_string(total) + ", not 1");
  }
  weights_ /= total;
}

MixtureParams MixtureParams::permuted(std::span<const int> perm) const {
  if (static_cast<Eigen::Index>(perm.size()) != num_components()) {
    throw DataError("mixture: permutation has the wrong length");
  }
  Vector w(num_components());
  std::vector<MslParams> comps;
  comps.reserve(perm.size());
  std::vector<bool> seen(perm.size(), false);
  for (std::size_t i = 0; i < perm.size(); ++i) {
    const int src = perm[i];
    if (src < 0 || static_cast<std::size_t>(src) >= perm.size() || seen[static_cast<std::size_t>(src)]) {
      throw DataError("mixture: invalid permutation");
    }
    seen[static_cast<std::size_t>(src)] = true;
    w(static_cast<Eigen::Index>(i)) = weights_(src);
    comps.push_back(components_[static_cast<std::size_t>(src)]);
  }
  // Reordering keeps the sum bit-exact up to addition order; renormalize without the check.
  w /= w.sum();
  return MixtureParams(std::move(w), std::move(comps));
}

Matrix component_log_terms(const DataMatrix& data, const MixtureParams& theta) {
  if (data.cols() != theta.dim()) {
    throw DataError("data has " + std::to_string(data.cols()) + " columns, mixture has dimension " +
                    std::to_string(theta.dim()));
  }
  const Eigen::Index g = theta.num_components();
  Matrix out(data.rows(), g);
  for (Eigen::Index i = 0; i < g; ++i) {
    const double w = theta.weights()(i);
    const double log_w = w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity();
    out.col(i) = (msl_logpdf_rows(data, theta.component(i)).array() + log_w).matrix();
  }
  return out;
}

Vector log_sum_exp_rows(const Matrix& log_terms) {
  Vector out(log_terms.rows());
  for (Eigen::Index j = 0; j < log_terms.rows(); ++j) {
    const double m = log_terms.row(j).maxCoeff();
    if (!std::isfinite(m)) {
      out(j) = m;
      continue;
    }
    double s = 0.0;
    for (Eigen::Index i = 0; i < log_terms.cols(); ++i) s += std::exp(log_terms(j, i) - m);
    out(j) = m + std::log(s);
  }
  return out;
}

double mixture_logpdf(const Vector& y, const MixtureParams& theta) {
  if (y.size() != theta.dim()) {
    throw DataError("observation has dimension " + std::to_string(y.size()) + ", expected " +
                    std::to_string(theta.dim()));
  }
  return log_sum_exp_rows(component_log_terms(y.transpose(), theta))(0);
}

double loglik(const DataMatrix& data, const MixtureParams& theta) {
  const Vector per_row = log_sum_exp_rows(component_log_terms(data, theta));
  double total = 0.0;
  for (Eigen::Index j = 0; j < per_row.size(); ++j) total += per_row(j);
  return total;
}

namespace {

Matrix normalize_log_terms(const Matrix& log_terms) {
  const Vector lse = log_sum_exp_rows(log_terms);
  Matrix z(log_terms.rows(), log_terms.cols());
  for (Eigen::Index j = 0; j < log_terms.rows(); ++j) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < log_terms.cols(); ++i) {
      z(j, i) = std::exp(log_terms(j, i) - lse(j));
      s += z(j, i);
    }
    z.row(j) /= s;
  }
  return z;
}

}  // namespace

Vector responsibilities(const Vector& y, const MixtureParams& theta) {
  if (y.size() != theta.dim()) {
    throw DataError("observation has dimension " + std::to_string(y.size()) + ", expected " +
                    std::to_string(theta.dim()));
  }
  return normalize_log_terms(component_log_terms(y.transpose(), theta)).row(0).transpose();
}

Matrix responsibility_matrix(const DataMatrix& data, const MixtureParams& theta) {
  return normalize_log_terms(component_log_terms(data, theta));
}

std::vector<int> map_labels(const Matrix& z) {
  std::vector<int> labels(static_cast<std::size_t>(z.rows()));
  for (Eigen::Index j = 0; j < z.rows(); ++j) {
    Eigen::Index best = 0;
    for (Eigen::Index i = 1; i < z.cols(); ++i) {
      if (z(j, i) > z(j, best)) best = i;
    }
    labels[static_cast<std::size_t>(j)] = static_cast<int>(best) + 1;
  }
  return labels;
}

std::vector<int> classify(const DataMatrix& data, const MixtureParams& theta) {
  return map_labels(responsibility_matrix(data, theta));
}

}  // namespace fmmsl
