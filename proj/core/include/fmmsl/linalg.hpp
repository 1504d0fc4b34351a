#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string_view>

namespace fmmsl {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// n x p observations, one row per observation.
using DataMatrix = Eigen::MatrixXd;

/// Number of unique entries of a symmetric p x p matrix.
constexpr std::size_t vech_size(std::size_t p) { return p * (p + 1) / 2; }

/// Column-stacked lower triangle, diagonal included: (s11, s21, .., sp1, s22, ..).
Vector vech(const Matrix& m);

/// Inverse of vech, producing a symmetric matrix.
Matrix unvech(const Vector& v, Eigen::Index p);

/// (m + m^T) / 2
Matrix symmetrize(const Matrix& m);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

bool all_finite(const Matrix& m);

/// Lifts the smallest eigenvalue of a symmetric matrix to floor_rel * trace / p when it
/// sits at or below that level. Returns false if the matrix cannot be repaired (the
/// trace is not positive or entries are non-finite); m is then left untouched.
bool repair_positive_definite(Matrix& m, double floor_rel = 1e-10, bool* repaired = nullptr);

/// Throws DataError naming `what` if any entry is non-finite.
void require_finite(const Matrix& m, std::string_view what);

}  // namespace fmmsl
