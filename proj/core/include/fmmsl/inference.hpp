#pragma once

// Standard errors from the empirical information matrix and information criteria.
//
// Parameter vector layout (length d = (g-1) + g(2p + p(p+1)/2)):
//   pi_1 .. pi_{g-1},  mu_1 .. mu_g,  vech(Sigma_1) .. vech(Sigma_g),  gamma_1 .. gamma_g
// with vech the column-stacked lower triangle. pi_g = 1 - sum of the others is implied.

#include "fmmsl/linalg.hpp"
#include "fmmsl/mixture.hpp"
#include "fmmsl/msl.hpp"

#include <string>
#include <vector>

namespace fmmsl {

std::size_t free_parameter_count(std::size_t g, std::size_t p);

/// Names in layout order, e.g. "pi_1", "mu_2[1]", "sigma_1[2,1]", "gamma_1[2]" (1-based).
std::vector<std::string> parameter_names(std::size_t g, std::size_t p);

/// Parameters of theta flattened in layout order.
Vector flatten_parameters(const MixtureParams& theta);

/// Conditional expectation of the complete-data score of one observation. By Fisher's
/// identity this is the gradient of log f(y | theta) in the layout above, with the
/// symmetric off-diagonal scatter entries treated as a single parameter.
Vector score_vector(const Vector& y, const MixtureParams& theta, double eps_d = kDefaultEpsD);

/// One score row per observation (n x d).
Matrix score_matrix(const DataMatrix& data, const MixtureParams& theta, double eps_d = kDefaultEpsD);

/// Sum over observations of s_j s_j^T.
Matrix empirical_info(const DataMatrix& data, const MixtureParams& theta, double eps_d = kDefaultEpsD);

struct StandardErrors {
  Vector values;  ///< layout order
  double rcond;   ///< reciprocal condition estimate of the information matrix
};

/// Smallest reciprocal condition number accepted before refusing to invert.
inline constexpr double kMinInfoRcond = 1e-12;

/// sqrt(diag(info^{-1})). Throws NumericalError when info is not positive definite or
/// its reciprocal condition estimate is below kMinInfoRcond.
StandardErrors standard_errors(const Matrix& info);

struct InformationCriteria {
  double aic;
  double bic;
  std::size_t num_params;
};

/// aic = 2d - 2 loglik, bic = d log(n) - 2 loglik.
InformationCriteria information_criteria(double loglik, std::size_t g, std::size_t p, std::size_t n);

}  // namespace fmmsl
