#pragma once

#include "fmmsl/linalg.hpp"
#include "fmmsl/rng.hpp"

#include <vector>

namespace fmmsl {

struct KMeansResult {
  std::vector<int> labels;  ///< 0-based cluster index per row
  Matrix centers;           ///< k x p
  std::vector<std::size_t> sizes;
  int iterations = 0;
  bool has_empty_cluster = false;
};

/// Lloyd's algorithm seeded by D^2 (k-means++) sampling. Distance ties go to the lower
/// cluster index. Stops when no label changes or after max_iter sweeps.
KMeansResult kmeans(const DataMatrix& data, int k, Engine& rng, int max_iter = 50);

}  // namespace fmmsl
