#pragma once

// Multivariate skew Laplace (MSL) distribution.
//
// Density, with d = (y - mu)^T Sigma^{-1} (y - mu) and alpha = sqrt(1 + gamma^T Sigma^{-1} gamma):
//
//   f(y) = |Sigma|^{-1/2} / (2^p pi^{(p-1)/2} alpha Gamma((p+1)/2))
//          * exp(-alpha sqrt(d) + (y - mu)^T Sigma^{-1} gamma)
//
// It is the normal variance-mean mixture Y = mu + W gamma + sqrt(W) Sigma^{1/2} X with
// X ~ N(0, I) and W = 1/V ~ chi^2_{p+1}. Everything touching Sigma goes through its
// Cholesky factor; the explicit inverse is never formed.

#include "fmmsl/linalg.hpp"
#include "fmmsl/rng.hpp"

#include <complex>
#include <cstdint>

namespace fmmsl {

/// Clamp applied to the squared Mahalanobis distance before square roots.
inline constexpr double kDefaultEpsD = 1e-10;

class MslParams {
 public:
  /// Throws DataError on dimension mismatch, non-finite entries, asymmetry beyond
  /// 1e-12 relative, or a scatter matrix whose Cholesky factorization fails.
  MslParams(Vector mu, Matrix sigma, Vector gamma);

  Eigen::Index dim() const { return mu_.size(); }
  const Vector& mu() const { return mu_; }
  const Matrix& sigma() const { return sigma_; }
  const Vector& gamma() const { return gamma_; }

  /// sqrt(1 + gamma^T Sigma^{-1} gamma), always >= 1.
  double alpha() const { return alpha_; }
  double log_det_sigma() const { return log_det_; }
  /// Sigma^{-1} gamma.
  const Vector& sigma_inv_gamma() const { return sigma_inv_gamma_; }
  const Eigen::LLT<Matrix>& cholesky() const { return llt_; }

  /// x^T Sigma^{-1} x
  double quad_form(const Vector& x) const;
  /// Sigma^{-1} b
  Vector solve(const Vector& b) const;
  Matrix sigma_inverse() const;

 private:
  Vector mu_;
  Matrix sigma_;
  Vector gamma_;
  Eigen::LLT<Matrix> llt_;
  Vector sigma_inv_gamma_;
  double alpha_ = 1.0;
  double log_det_ = 0.0;
};

/// Conditional moments of the latent mixing variable V given an observation.
struct VMoments {
  double e_v;     ///< E(V | y) = alpha / sqrt(d)
  double e_vinv;  ///< E(1/V | y) = (1 + alpha sqrt(d)) / alpha^2
};

struct MslMoments {
  Vector mean;  ///< mu + (p + 1) gamma
  Matrix cov;   ///< (p + 1) (Sigma + 2 gamma gamma^T)
};

/// Log of the normalizing constant of the density (everything except the exponent).
double msl_log_normalizer(const MslParams& params);

double msl_logpdf(const Vector& y, const MslParams& params);

/// Squared Mahalanobis distance (y - mu)^T Sigma^{-1} (y - mu) for every row of `data`.
Vector msl_mahalanobis_rows(const DataMatrix& data, const MslParams& params);

/// Log-density for every row of `data` (n x p).
Vector msl_logpdf_rows(const DataMatrix& data, const MslParams& params);

MslMoments msl_moments(const MslParams& params);

/// e^{i t^T mu} (1 + t^T Sigma t - 2 i t^T gamma)^{-(p+1)/2}
std::complex<double> msl_cf(const Vector& t, const MslParams& params);

VMoments v_conditional_moments(const Vector& y, const MslParams& params, double eps_d = kDefaultEpsD);

/// One draw from the variance-mean mixture representation.
Vector msl_draw(const MslParams& params, Engine& rng);

/// n i.i.d. draws, one per row. Deterministic in `seed`.
DataMatrix msl_sample(const MslParams& params, std::size_t n, std::uint64_t seed);

}  // namespace fmmsl
