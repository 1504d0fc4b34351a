#include "scalar_oracles.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oracle {

namespace {

double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

Vec mat_vec(const Mat& a, const Vec& x) {
  Vec out(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = dot(a[i], x);
  return out;
}

Vec sub(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = a[k] - b[k];
  return out;
}

}  // namespace

Mat inverse(const Mat& a) {
  const std::size_t p = a.size();
  Mat aug(p, Vec(2 * p, 0.0));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) aug[i][j] = a[i][j];
    aug[i][p + i] = 1.0;
  }
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(aug[r][col]) > std::abs(aug[piv][col])) piv = r;
    }
    if (aug[piv][col] == 0.0) throw std::runtime_error("oracle::inverse: singular");
    std::swap(aug[piv], aug[col]);
    const double d = aug[col][col];
    for (auto& v : aug[col]) v /= d;
    for (std::size_t r = 0; r < p; ++r) {
      if (r == col) continue;
      const double f = aug[r][col];
      for (std::size_t k = 0; k < 2 * p; ++k) aug[r][k] -= f * aug[col][k];
    }
  }
  Mat inv(p, Vec(p));
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) inv[i][j] = aug[i][p + j];
  }
  return inv;
}

double determinant(const Mat& a) {
  Mat m = a;
  const std::size_t p = m.size();
  double det = 1.0;
  for (std::size_t col = 0; col < p; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < p; ++r) {
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    }
    if (m[piv][col] == 0.0) return 0.0;
    if (piv != col) {
      std::swap(m[piv], m[col]);
      det = -det;
    }
    det *= m[col][col];
    for (std::size_t r = col + 1; r < p; ++r) {
      const double f = m[r][col] / m[col][col];
      for (std::size_t k = col; k < p; ++k) m[r][k] -= f * m[col][k];
    }
  }
  return det;
}

double msl_pdf(const Vec& y, const Comp& c) {
  const double p = static_cast<double>(y.size());
  const Mat si = inverse(c.sigma);
  const Vec r = sub(y, c.mu);
  const double d = dot(r, mat_vec(si, r));
  const double alpha = std::sqrt(1.0 + dot(c.gamma, mat_vec(si, c.gamma)));
  const double norm = 1.0 / (std::pow(2.0, p) * std::pow(std::numbers::pi, (p - 1.0) / 2.0) * alpha *
                             std::tgamma((p + 1.0) / 2.0) * std::sqrt(determinant(c.sigma)));
  return norm * std::exp(-alpha * std::sqrt(d) + dot(r, mat_vec(si, c.gamma)));
}

double symmetric_laplace_pdf(const Vec& y, const Vec& mu, const Mat& sigma) {
  const double p = static_cast<double>(y.size());
  const Vec r = sub(y, mu);
  const double d = dot(r, mat_vec(inverse(sigma), r));
  const double norm = std::tgamma(p / 2.0) /
                      (2.0 * std::pow(std::numbers::pi, p / 2.0) * std::tgamma(p) * std::sqrt(determinant(sigma)));
  return norm * std::exp(-std::sqrt(d));
}

double mixture_log_density(const Vec& y, const Mix& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < m.c.size(); ++i) s += m.w[i] * msl_pdf(y, m.c[i]);
  return std::log(s);
}

EStep e_step(const std::vector<Vec>& data, const Mix& m, double eps_d) {
  const std::size_t n = data.size();
  const std::size_t g = m.c.size();
  EStep e{Mat(n, Vec(g)), Mat(n, Vec(g)), Mat(n, Vec(g))};
  for (std::size_t j = 0; j < n; ++j) {
    double total = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      const Comp& c = m.c[i];
      const Mat si = inverse(c.sigma);
      const Vec r = sub(data[j], c.mu);
      const double d = std::max(dot(r, mat_vec(si, r)), eps_d);
      const double a2 = 1.0 + dot(c.gamma, mat_vec(si, c.gamma));
      e.v1[j][i] = std::sqrt(a2) / std::sqrt(d);
      e.v2[j][i] = (1.0 + std::sqrt(a2 * d)) / a2;
      e.z[j][i] = m.w[i] * msl_pdf(data[j], c);
      total += e.z[j][i];
    }
    for (std::size_t i = 0; i < g; ++i) e.z[j][i] /= total;
  }
  return e;
}

Mix m_step(const std::vector<Vec>& data, const EStep& e, const Mix& old, bool joint) {
  const std::size_t n = data.size();
  const std::size_t g = old.c.size();
  const std::size_t p = data.front().size();
  Mix out;
  for (std::size_t i = 0; i < g; ++i) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    Vec y0(p, 0.0), y1(p, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      s0 += e.z[j][i];
      s1 += e.z[j][i] * e.v1[j][i];
      s2 += e.z[j][i] * e.v2[j][i];
      for (std::size_t k = 0; k < p; ++k) {
        y0[k] += e.z[j][i] * data[j][k];
        y1[k] += e.z[j][i] * e.v1[j][i] * data[j][k];
      }
    }
    Comp c;
    c.gamma.resize(p);
    c.mu.resize(p);
    for (std::size_t k = 0; k < p; ++k) c.gamma[k] = (s1 * y0[k] - s0 * y1[k]) / (s1 * s2 - s0 * s0);
    const Vec& gmu = joint ? c.gamma : old.c[i].gamma;
    for (std::size_t k = 0; k < p; ++k) c.mu[k] = (y1[k] - s0 * gmu[k]) / s1;
    const Vec& msig = joint ? c.mu : old.c[i].mu;
    const Vec& gsig = joint ? c.gamma : old.c[i].gamma;
    c.sigma.assign(p, Vec(p, 0.0));
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < p; ++b) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          acc += e.z[j][i] * e.v1[j][i] * (data[j][a] - msig[a]) * (data[j][b] - msig[b]);
        }
        c.sigma[a][b] = (acc - gsig[a] * gsig[b] * s2) / s0;
      }
    }
    out.w.push_back(s0 / static_cast<double>(n));
    out.c.push_back(std::move(c));
  }
  return out;
}

Vec pack(const Mix& m) {
  Vec t;
  for (std::size_t r = 0; r + 1 < m.w.size(); ++r) t.push_back(m.w[r]);
  for (const auto& c : m.c) t.insert(t.end(), c.mu.begin(), c.mu.end());
  for (const auto& c : m.c) {
    for (std::size_t col = 0; col < c.mu.size(); ++col) {
      for (std::size_t row = col; row < c.mu.size(); ++row) t.push_back(c.sigma[row][col]);
    }
  }
  for (const auto& c : m.c) t.insert(t.end(), c.gamma.begin(), c.gamma.end());
  return t;
}

Mix unpack(const Vec& theta, int g, int p) {
  Mix m;
  std::size_t k = 0;
  double rest = 1.0;
  for (int r = 0; r + 1 < g; ++r) {
    m.w.push_back(theta[k++]);
    rest -= m.w.back();
  }
  m.w.push_back(rest);
  m.c.resize(static_cast<std::size_t>(g));
  const auto up = static_cast<std::size_t>(p);
  for (auto& c : m.c) {
    c.mu.assign(theta.begin() + static_cast<long>(k), theta.begin() + static_cast<long>(k + up));
    k += up;
  }
  for (auto& c : m.c) {
    c.sigma.assign(up, Vec(up));
    for (std::size_t col = 0; col < up; ++col) {
      for (std::size_t row = col; row < up; ++row) {
        c.sigma[row][col] = theta[k];
        c.sigma[col][row] = theta[k];
        ++k;
      }
    }
  }
  for (auto& c : m.c) {
    c.gamma.assign(theta.begin() + static_cast<long>(k), theta.begin() + static_cast<long>(k + up));
    k += up;
  }
  return m;
}

Vec numeric_gradient(const Vec& y, const Mix& m, double step) {
  const Vec theta = pack(m);
  const int g = static_cast<int>(m.c.size());
  const int p = static_cast<int>(y.size());
  Vec grad(theta.size());
  for (std::size_t k = 0; k < theta.size(); ++k) {
    Vec up = theta, down = theta;
    up[k] += step;
    down[k] -= step;
    grad[k] = (mixture_log_density(y, unpack(up, g, p)) - mixture_log_density(y, unpack(down, g, p))) / (2.0 * step);
  }
  return grad;
}

}  // namespace oracle
