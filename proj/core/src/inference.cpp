#include "fmmsl/inference.hpp"

#include "fmmsl/error.hpp"

#include <cmath>
#include <sstream>

namespace fmmsl {

std::size_t free_parameter_count(std::size_t g, std::size_t p) {
  return (g - 1) + g * (2 * p + vech_size(p));
}

std::vector<std::string> parameter_names(std::size_t g, std::size_t p) {
  std::vector<std::string> names;
  names.reserve(free_parameter_count(g, p));
  for (std::size_t r = 1; r < g; ++r) names.push_back("pi_" + std::to_string(r));
  for (std::size_t i = 1; i <= g; ++i) {
    for (std::size_t k = 1; k <= p; ++k) {
      names.push_back("mu_" + std::to_string(i) + "[" + std::to_string(k) + "]");
    }
  }
  for (std::size_t i = 1; i <= g; ++i) {
    for (std::size_t col = 1; col <= p; ++col) {
      for (std::size_t row = col; row <= p; ++row) {
        names.push_back("sigma_" + std::to_string(i) + "[" + std::to_string(row) + "," +
                        std::to_string(col) + "]");
      }
    }
  }
  for (std::size_t i = 1; i <= g; ++i) {
    for (std::size_t k = 1; k <= p; ++k) {
      names.push_back("gamma_" + std::to_string(i) + "[" + std::to_string(k) + "]");
    }
  }
  return names;
}

Vector flatten_parameters(const MixtureParams& theta) {
  const auto g = static_cast<std::size_t>(theta.num_components());
  const auto p = static_cast<std::size_t>(theta.dim());
  Vector out(static_cast<Eigen::Index>(free_parameter_count(g, p)));
  Eigen::Index k = 0;
  for (std::size_t r = 0; r + 1 < g; ++r) out(k++) = theta.weights()(static_cast<Eigen::Index>(r));
  const auto sp = static_cast<Eigen::Index>(p);
  const auto sv = static_cast<Eigen::Index>(vech_size(p));
  for (const auto& c : theta.components()) {
    out.segment(k, sp) = c.mu();
    k += sp;
  }
  for (const auto& c : theta.components()) {
    out.segment(k, sv) = vech(c.sigma());
    k += sv;
  }
  for (const auto& c : theta.components()) {
    out.segment(k, sp) = c.gamma();
    k += sp;
  }
  return out;
}

namespace {

void write_score_row(const Vector& y, const Vector& z, const MixtureParams& theta, double eps_d,
                     Eigen::Ref<Vector> out) {
  const Eigen::Index g = theta.num_components();
  const Eigen::Index p = theta.dim();
  const auto sv = static_cast<Eigen::Index>(vech_size(static_cast<std::size_t>(p)));
  Eigen::Index k = 0;

  const double pi_g = theta.weights()(g - 1);
  for (Eigen::Index r = 0; r + 1 < g; ++r) out(k++) = z(r) / theta.weights()(r) - z(g - 1) / pi_g;

  const Eigen::Index mu_start = k;
  const Eigen::Index sigma_start = mu_start + g * p;
  const Eigen::Index gamma_start = sigma_start + g * sv;
  for (Eigen::Index i = 0; i < g; ++i) {
    const MslParams& c = theta.component(i);
    const Vector r = y - c.mu();
    const VMoments v = v_conditional_moments(y, c, eps_d);
    const Vector a = c.solve(r);               // Sigma^{-1} (y - mu)
    const Vector& b = c.sigma_inv_gamma();     // Sigma^{-1} gamma
    const double zi = z(i);

    out.segment(mu_start + i * p, p) = zi * (v.e_v * a - b);
    out.segment(gamma_start + i * p, p) = zi * (a - v.e_vinv * b);

    // d/dSigma of -1/2 log|S| - 1/2 tr(S^{-1} B) with
    // B = E[v] r r^T - r gamma^T - gamma r^T + E[1/v] gamma gamma^T, doubled so the
    // off-diagonal entries carry both symmetric positions.
    const Matrix sigma_inv = c.sigma_inverse();
    Matrix m = -sigma_inv + v.e_v * a * a.transpose() - a * b.transpose() - b * a.transpose() +
               v.e_vinv * b * b.transpose();
    m.diagonal() *= 0.5;
    out.segment(sigma_start + i * sv, sv) = zi * vech(m);
  }
}

}  // namespace

Vector score_vector(const Vector& y, const MixtureParams& theta, double eps_d) {
  const Vector z = responsibilities(y, theta);
  Vector out(static_cast<Eigen::Index>(free_parameter_count(static_cast<std::size_t>(theta.num_components()),
                                                            static_cast<std::size_t>(theta.dim()))));
  write_score_row(y, z, theta, eps_d, out);
  return out;
}

Matrix score_matrix(const DataMatrix& data, const MixtureParams& theta, double eps_d) {
  const Matrix z = responsibility_matrix(data, theta);
  const auto d = static_cast<Eigen::Index>(
      free_parameter_count(static_cast<std::size_t>(theta.num_components()), static_cast<std::size_t>(theta.dim())));
  Matrix out(data.rows(), d);
  Vector row(d);
  for (Eigen::Index j = 0; j < data.rows(); ++j) {
    write_score_row(data.row(j).transpose(), z.row(j).transpose(), theta, eps_d, row);
    out.row(j) = row.transpose();
  }
  return out;
}

Matrix empirical_info(const DataMatrix& data, const MixtureParams& theta, double eps_d) {
  const Matrix s = score_matrix(data, theta, eps_d);
  Matrix info = Matrix::Zero(s.cols(), s.cols());
  for (Eigen::Index j = 0; j < s.rows(); ++j) info.noalias() += s.row(j).transpose() * s.row(j);
  return symmetrize(info);
}

StandardErrors standard_errors(const Matrix& info) {
  if (info.rows() != info.cols() || info.rows() == 0) throw NumericalError("information matrix is not square");
  if (!info.allFinite()) throw NumericalError("information matrix has non-finite entries");
  Eigen::LLT<Matrix> llt(symmetrize(info));
  if (llt.info() != Eigen::Success) {
    throw NumericalError("information matrix is not positive definite; standard errors unavailable");
  }
  const double rcond = llt.rcond();
  if (!(rcond >= kMinInfoRcond)) {
    std::ostringstream msg;
    msg << "information matrix is near-singular (reciprocal condition estimate " << rcond << " < "
        << kMinInfoRcond << "); standard errors unavailable";
    throw NumericalError(msg.str());
  }
  const Matrix inv = llt.solve(Matrix::Identity(info.rows(), info.cols()));
  Vector se = inv.diagonal().cwiseMax(0.0).cwiseSqrt();
  return {std::move(se), rcond};
}

InformationCriteria information_criteria(double loglik, std::size_t g, std::size_t p, std::size_t n) {
  if (n < 1) throw UsageError("information criteria need n >= 1");
  const std::size_t d = free_parameter_count(g, p);
  const double dd = static_cast<double>(d);
  return {2.0 * dd - 2.0 * loglik, dd * std::log(static_cast<double>(n)) - 2.0 * loglik, d};
}

}  // namespace fmmsl
