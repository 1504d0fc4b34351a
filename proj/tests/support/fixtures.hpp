#pragma once

#include "fmmsl/mixture.hpp"
#include "fmmsl/rng.hpp"

#include "../oracles/scalar_oracles.hpp"

#include <random>
#include <vector>

namespace fixtures {

using fmmsl::Matrix;
using fmmsl::Vector;

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

/// Two-component design: weights (0.6, 0.4), locations (2,2) and (-2,-2), scatter
/// 1.5 I, skewness (1,1) and (-1,-1).
inline fmmsl::MixtureParams two_component_design() {
  const Matrix s = 1.5 * Matrix::Identity(2, 2);
  return fmmsl::MixtureParams(vec({0.6, 0.4}), {fmmsl::MslParams(vec({2, 2}), s, vec({1, 1})),
                                                fmmsl::MslParams(vec({-2, -2}), s, vec({-1, -1}))});
}

/// Random SPD matrix with eigenvalues in roughly [0.3, 3].
inline Matrix random_spd(Eigen::Index p, fmmsl::Engine& rng) {
  std::normal_distribution<double> n01;
  std::uniform_real_distribution<double> eig(0.3, 3.0);
  Matrix a(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) a(i, j) = n01(rng);
  }
  const Eigen::HouseholderQR<Matrix> qr(a);
  const Matrix q = qr.householderQ();
  Vector d(p);
  for (Eigen::Index i = 0; i < p; ++i) d(i) = eig(rng);
  Matrix s = q * d.asDiagonal() * q.transpose();
  return 0.5 * (s + s.transpose());
}

inline Vector random_vector(Eigen::Index p, double scale, fmmsl::Engine& rng) {
  std::normal_distribution<double> n01;
  Vector v(p);
  for (Eigen::Index i = 0; i < p; ++i) v(i) = scale * n01(rng);
  return v;
}

inline fmmsl::MslParams random_msl(Eigen::Index p, fmmsl::Engine& rng, double gamma_scale = 0.7) {
  return fmmsl::MslParams(random_vector(p, 1.0, rng), random_spd(p, rng), random_vector(p, gamma_scale, rng));
}

inline fmmsl::MixtureParams random_mixture(int g, Eigen::Index p, fmmsl::Engine& rng) {
  std::uniform_real_distribution<double> u(0.2, 1.0);
  Vector w(g);
  for (int i = 0; i < g; ++i) w(i) = u(rng);
  w /= w.sum();
  std::vector<fmmsl::MslParams> comps;
  for (int i = 0; i < g; ++i) comps.push_back(random_msl(p, rng));
  return fmmsl::MixtureParams(w, std::move(comps));
}

inline oracle::Vec to_oracle(const Vector& v) { return oracle::Vec(v.data(), v.data() + v.size()); }

inline oracle::Mat to_oracle(const Matrix& m) {
  oracle::Mat out(static_cast<std::size_t>(m.rows()), oracle::Vec(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return out;
}

inline oracle::Comp to_oracle(const fmmsl::MslParams& c) {
  return {to_oracle(c.mu()), to_oracle(c.sigma()), to_oracle(c.gamma())};
}

inline oracle::Mix to_oracle(const fmmsl::MixtureParams& m) {
  oracle::Mix out;
  out.w = to_oracle(m.weights());
  for (const auto& c : m.components()) out.c.push_back(to_oracle(c));
  return out;
}

inline std::vector<oracle::Vec> rows(const fmmsl::DataMatrix& data) {
  std::vector<oracle::Vec> out;
  for (Eigen::Index j = 0; j < data.rows(); ++j) out.push_back(to_oracle(Vector(data.row(j).transpose())));
  return out;
}

}  // namespace fixtures
