#include "fmmsl/kmeans.hpp"

#include "fmmsl/error.hpp"

#include <limits>
#include <random>
#include <string>

namespace fmmsl {

namespace {

// Index of the nearest center; ties resolve to the lower index.
int nearest_center(const DataMatrix& data, Eigen::Index row, const Matrix& centers, double* dist = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centers.rows(); ++c) {
    const double d = (data.row(row) - centers.row(c)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(c);
    }
  }
  if (dist) *dist = best_d;
  return best;
}

Matrix seed_centers(const DataMatrix& data, int k, Engine& rng) {
  const Eigen::Index n = data.rows();
  Matrix centers(k, data.cols());
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  centers.row(0) = data.row(pick(rng));

  std::vector<double> d2(static_cast<std::size_t>(n));
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      double d = 0.0;
      nearest_center(data, j, centers.topRows(c), &d);
      d2[static_cast<std::size_t>(j)] = d;
      total += d;
    }
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::uniform_real_distribution<double> u(0.0, total);
      double target = u(rng);
      for (Eigen::Index j = 0; j < n; ++j) {
        target -= d2[static_cast<std::size_t>(j)];
        chosen = j;
        if (target <= 0.0) break;
      }
    } else {
      chosen = pick(rng);
    }
    centers.row(c) = data.row(chosen);
  }
  return centers;
}

}  // namespace

KMeansResult kmeans(const DataMatrix& data, int k, Engine& rng, int max_iter) {
  const Eigen::Index n = data.rows();
  if (k < 1) throw UsageError("kmeans: k must be at least 1");
  if (n < k) {
    throw DataError("kmeans: " + std::to_string(n) + " observations for " + std::to_string(k) + " clusters");
  }

  KMeansResult out;
  out.centers = seed_centers(data, k, rng);
  out.labels.assign(static_cast<std::size_t>(n), -1);
  out.sizes.assign(static_cast<std::size_t>(k), 0);

  for (int iter = 1; iter <= max_iter; ++iter) {
    bool changed = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      const int c = nearest_center(data, j, out.centers);
      if (c != out.labels[static_cast<std::size_t>(j)]) {
        out.labels[static_cast<std::size_t>(j)] = c;
        changed = true;
      }
    }
    out.iterations = iter;

    Matrix sums = Matrix::Zero(k, data.cols());
    std::fill(out.sizes.begin(), out.sizes.end(), 0);
    for (Eigen::Index j = 0; j < n; ++j) {
      const int c = out.labels[static_cast<std::size_t>(j)];
      sums.row(c) += data.row(j);
      ++out.sizes[static_cast<std::size_t>(c)];
    }
    out.has_empty_cluster = false;
    for (int c = 0; c < k; ++c) {
      const auto size = out.sizes[static_cast<std::size_t>(c)];
      if (size == 0) {
        out.has_empty_cluster = true;
        continue;
      }
      out.centers.row(c) = sums.row(c) / static_cast<double>(size);
    }
    if (!changed || out.has_empty_cluster) break;
  }
  return out;
}

}  // namespace fmmsl
