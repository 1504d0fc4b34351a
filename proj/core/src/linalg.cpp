#include "fmmsl/linalg.hpp"

#include "fmmsl/error.hpp"

#include <cmath>
#include <string>

namespace fmmsl {

Vector vech(const Matrix& m) {
  const Eigen::Index p = m.rows();
  Vector out(static_cast<Eigen::Index>(vech_size(static_cast<std::size_t>(p))));
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j; i < p; ++i) out(k++) = m(i, j);
  }
  return out;
}

Matrix unvech(const Vector& v, Eigen::Index p) {
  if (v.size() != static_cast<Eigen::Index>(vech_size(static_cast<std::size_t>(p)))) {
    throw DataError("unvech: length " + std::to_string(v.size()) + " does not match p=" +
                    std::to_string(p));
  }
  Matrix m(p, p);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < p; ++j) {
    for (Eigen::Index i = j; i < p; ++i) {
      m(i, j) = v(k);
      m(j, i) = v(k);
      ++k;
    }
  }
  return m;
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

bool is_symmetric(const Matrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

bool repair_positive_definite(Matrix& m, double floor_rel, bool* repaired) {
  if (repaired) *repaired = false;
  if (!m.allFinite()) return false;
  const double trace = m.trace();
  if (!(trace > 0.0)) return false;
  const double floor = floor_rel * trace / static_cast<double>(m.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) return false;
  const double smallest = eig.eigenvalues()(0);
  if (smallest > floor) return true;
  m.diagonal().array() += floor - smallest;
  if (repaired) *repaired = true;
  return true;
}

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) throw DataError(std::string(what) + ": non-finite entry");
}

}  // namespace fmmsl
