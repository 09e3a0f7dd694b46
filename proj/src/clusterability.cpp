#include "prefcluster/clusterability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "prefcluster/errors.hpp"
#include "prefcluster/random.hpp"

namespace prefcluster {

namespace {

// `points` holds one point per column.
double nearest_distance(const Eigen::MatrixXd& points, const Eigen::VectorXd& query, Eigen::Index skip) {
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < points.cols(); ++r) {
    if (r == skip) continue;
    best = std::min(best, (points.col(r) - query).squaredNorm());
  }
  return std::sqrt(best);
}

}  // namespace

Eigen::Index default_hopkins_sample_size(Eigen::Index n) {
  const auto tenth = static_cast<Eigen::Index>(std::ceil(0.1 * static_cast<double>(n)));
  return std::max<Eigen::Index>(1, std::min({tenth, Eigen::Index{500}, n - 1}));
}

HopkinsResult hopkins(const Eigen::MatrixXd& data, Eigen::Index m, std::uint64_t seed) {
  const Eigen::Index n = data.rows();
  if (data.cols() < 1) throw ShapeError("Hopkins test needs at least one dimension");
  if (m < 1 || m >= n) {
    throw SamplingError(fmt::format("Hopkins sample size {} must satisfy 1 <= m < n = {}", m, n));
  }
  if (!data.allFinite()) throw InputError("Hopkins test data contains non-finite values");
  const Eigen::RowVectorXd lo = data.colwise().minCoeff();
  const Eigen::RowVectorXd hi = data.colwise().maxCoeff();
  const Eigen::RowVectorXd span = hi - lo;
  if ((span.array() == 0.0).all()) {
    throw DegenerateDataError("all rows are identical; the bounding box has zero volume");
  }

  Rng rng(seed);
  const auto sampled = sample_without_replacement(n, m, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd uniform(m, data.cols());
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index c = 0; c < data.cols(); ++c) uniform(i, c) = lo(c) + unit(rng) * span(c);
  }

  const Eigen::MatrixXd points = data.transpose();
  double sum_w = 0.0;
  double sum_u = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index row = sampled[static_cast<std::size_t>(i)];
    sum_w += nearest_distance(points, points.col(row), row);
    sum_u += nearest_distance(points, uniform.row(i).transpose(), -1);
  }
  const double denom = sum_u + sum_w;
  return {denom > 0.0 ? sum_w / denom : 0.0, m, seed};
}

}  // namespace prefcluster
