#pragma once

#include <cstdint>

#include <Eigen/Dense>

namespace prefcluster {

struct HopkinsResult {
  double h = 0.0;
  Eigen::Index sample_size = 0;
  std::uint64_t seed = 0;
};

/// Hopkins statistic with the low-means-clusterable convention:
///   h = sum(w) / (sum(u) + sum(w))
/// where w are nearest-other-row distances of m sampled rows and u are
/// nearest-row distances of m uniform points drawn in the bounding box.
/// h near 0 indicates cluster structure, h near 0.5 uniform data.
///
/// Nearest neighbours are found by exact brute force.
HopkinsResult hopkins(const Eigen::MatrixXd& data, Eigen::Index m, std::uint64_t seed);

template <typename Derived>
HopkinsResult hopkins(const Eigen::MatrixBase<Derived>& data, Eigen::Index m, std::uint64_t seed) {
  return hopkins(Eigen::MatrixXd(data.template cast<double>()), m, seed);
}

/// min(ceil(0.1 n), 500), capped at n - 1.
Eigen::Index default_hopkins_sample_size(Eigen::Index n);

}  // namespace prefcluster
