#include "fmmsl/msl.hpp"

#include "fmmsl/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace fmmsl {

MslParams::MslParams(Vector mu, Matrix sigma, Vector gamma)
    : mu_(std::move(mu)), sigma_(std::move(sigma)), gamma_(std::move(gamma)) {
  const Eigen::Index p = mu_.size();
  if (p < 1) throw DataError("MSL parameters: dimension must be at least 1");
  if (sigma_.rows() != p || sigma_.cols() != p || gamma_.size() != p) {
    throw DataError("MSL parameters: dimension mismatch (mu has " + std::to_string(p) +
                    " entries, sigma is " + std::to_string(sigma_.rows()) + "x" +
                    std::to_string(sigma_.cols()) + ", gamma has " + std::to_string(gamma_.size()) +
                    ")");
  }
  if (!mu_.allFinite() || !sigma_.allFinite() || !gamma_.allFinite()) {
    throw DataError("MSL parameters: non-finite entry");
  }
  if (!is_symmetric(sigma_, 1e-12)) throw DataError("MSL parameters: sigma is not symmetric");
  // Only the lower triangle is read by the factorization.
  sigma_ = symmetrize(sigma_);
  llt_.compute(sigma_);
  if (llt_.info() != Eigen::Success || !(llt_.matrixLLT().diagonal().minCoeff() > 0.0)) {
    throw DataError("MSL parameters: sigma is not positive definite");
  }
  log_det_ = 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  if (!std::isfinite(log_det_)) throw DataError("MSL parameters: log-determinant is not finite");
  sigma_inv_gamma_ = llt_.solve(gamma_);
  alpha_ = std::sqrt(1.0 + std::max(0.0, gamma_.dot(sigma_inv_gamma_)));
}

double MslParams::quad_form(const Vector& x) const {
  const Vector w = llt_.matrixL().solve(x);
  return w.squaredNorm();
}

Vector MslParams::solve(const Vector& b) const { return llt_.solve(b); }

Matrix MslParams::sigma_inverse() const { return llt_.solve(Matrix::Identity(dim(), dim())); }

double msl_log_normalizer(const MslParams& params) {
  const double p = static_cast<double>(params.dim());
  return -0.5 * params.log_det_sigma() - p * std::numbers::ln2 -
         0.5 * (p - 1.0) * std::log(std::numbers::pi) - std::log(params.alpha()) -
         std::lgamma(0.5 * (p + 1.0));
}

namespace {

void check_dim(const Vector& y, const MslParams& params) {
  if (y.size() != params.dim()) {
    throw DataError("observation has dimension " + std::to_string(y.size()) + ", expected " +
                    std::to_string(params.dim()));
  }
}

}  // namespace

double msl_logpdf(const Vector& y, const MslParams& params) {
  check_dim(y, params);
  // Shares the row path so single and batched evaluation agree bit for bit.
  return msl_logpdf_rows(y.transpose(), params)(0);
}

namespace {

void check_cols(const DataMatrix& data, const MslParams& params) {
  if (data.cols() != params.dim()) {
    throw DataError("data has " + std::to_string(data.cols()) + " columns, expected " +
                    std::to_string(params.dim()));
  }
}

}  // namespace

Vector msl_mahalanobis_rows(const DataMatrix& data, const MslParams& params) {
  check_cols(data, params);
  const Matrix centered = (data.rowwise() - params.mu().transpose()).transpose();
  const Matrix w = params.cholesky().matrixL().solve(centered);
  return w.colwise().squaredNorm().transpose();
}

Vector msl_logpdf_rows(const DataMatrix& data, const MslParams& params) {
  check_cols(data, params);
  const Vector d = msl_mahalanobis_rows(data, params);
  const Vector lin = (data.rowwise() - params.mu().transpose()) * params.sigma_inv_gamma();
  return (msl_log_normalizer(params) - params.alpha() * d.array().sqrt() + lin.array()).matrix();
}

MslMoments msl_moments(const MslParams& params) {
  const double k = static_cast<double>(params.dim()) + 1.0;
  const Vector& g = params.gamma();
  return {params.mu() + k * g, k * (params.sigma() + 2.0 * g * g.transpose())};
}

std::complex<double> msl_cf(const Vector& t, const MslParams& params) {
  check_dim(t, params);
  const double p = static_cast<double>(params.dim());
  const std::complex<double> base(1.0 + t.dot(params.sigma() * t), -2.0 * t.dot(params.gamma()));
  const std::complex<double> shift = std::polar(1.0, t.dot(params.mu()));
  // Re(base) >= 1, so the principal branch of the power is the right one.
  return shift * std::pow(base, -0.5 * (p + 1.0));
}

VMoments v_conditional_moments(const Vector& y, const MslParams& params, double eps_d) {
  check_dim(y, params);
  const double d = std::max(params.quad_form(y - params.mu()), eps_d);
  const double a = params.alpha();
  const double root = std::sqrt(d);
  return {a / root, (1.0 + a * root) / (a * a)};
}

Vector msl_draw(const MslParams& params, Engine& rng) {
  const Eigen::Index p = params.dim();
  std::chi_squared_distribution<double> chi2(static_cast<double>(p) + 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  // W = 1/V is the variance multiplier.
  const double w = chi2(rng);
  Vector x(p);
  for (Eigen::Index k = 0; k < p; ++k) x(k) = normal(rng);
  const Vector lx = params.cholesky().matrixL() * x;
  return params.mu() + w * params.gamma() + std::sqrt(w) * lx;
}

DataMatrix msl_sample(const MslParams& params, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw UsageError("msl_sample: n must be at least 1");
  Engine rng = make_engine(seed);
  DataMatrix out(static_cast<Eigen::Index>(n), params.dim());
  for (Eigen::Index i = 0; i < out.rows(); ++i) out.row(i) = msl_draw(params, rng).transpose();
  return out;
}

}  // namespace fmmsl
