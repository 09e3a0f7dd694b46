#include "prefcluster/clustering.hpp"

#include <algorithm>
#include <limits>

#include <fmt/format.h>

#include "prefcluster/random.hpp"

namespace prefcluster {

std::string_view to_string(Algorithm a) { return a == Algorithm::kmeans ? "kmeans" : "kmodes"; }
std::string_view to_string(Init i) { return i == Init::cao ? "cao" : "random"; }
std::string_view to_string(Metric m) { return m == Metric::matching ? "matching" : "squared_euclidean"; }

Algorithm parse_algorithm(std::string_view text) {
  if (text == "kmeans") return Algorithm::kmeans;
  if (text == "kmodes") return Algorithm::kmodes;
  throw ConfigError(fmt::format("unknown clustering algorithm '{}'", text));
}

Init parse_init(std::string_view text) {
  if (text == "cao") return Init::cao;
  if (text == "random") return Init::random;
  throw ConfigError(fmt::format("unknown initialization '{}'", text));
}

Metric parse_metric(std::string_view text) {
  if (text == "matching") return Metric::matching;
  if (text == "squared_euclidean") return Metric::squared_euclidean;
  throw ConfigError(fmt::format("unknown metric '{}'", text));
}

namespace {

bool is_binary(const Eigen::MatrixXd& m) { return (m.array() == 0.0 || m.array() == 1.0).all(); }

void require_binary(const Eigen::MatrixXd& m, std::string_view what) {
  if ((m.array() == -1.0).any()) {
    throw InputError(fmt::format("{} contains the missing marker -1", what));
  }
  if (!is_binary(m)) {
    throw InputError(fmt::format("{} must contain only 0/1 entries", what));
  }
}

void check_fit_inputs(const Eigen::MatrixXd& data, int k) {
  if (data.rows() == 0 || data.cols() == 0) throw ShapeError("cannot cluster an empty matrix");
  if (k < 1 || k > data.rows()) {
    throw ConfigError(fmt::format("k = {} must lie in [1, n = {}]", k, data.rows()));
  }
}

void check_labels(const Eigen::MatrixXd& data, const Labels& labels, Eigen::Index k) {
  if (labels.size() != data.rows()) {
    throw ShapeError(fmt::format("{} labels for {} rows", labels.size(), data.rows()));
  }
  if (labels.size() > 0 && (labels.minCoeff() < 0 || labels.maxCoeff() >= k)) {
    throw ShapeError("label outside the centroid range");
  }
}

Eigen::VectorXi cluster_sizes(const Labels& labels, Eigen::Index k) {
  Eigen::VectorXi sizes = Eigen::VectorXi::Zero(k);
  for (Eigen::Index i = 0; i < labels.size(); ++i) ++sizes(labels(i));
  return sizes;
}

// Moves, for every empty cluster, the point farthest from its own centroid
// into that cluster and makes it the new centroid.
void repair_empty_clusters(const Eigen::MatrixXd& data, Labels& labels, Eigen::MatrixXd& centroids, Metric metric) {
  const Eigen::Index k = centroids.rows();
  Eigen::VectorXi sizes = cluster_sizes(labels, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    if (sizes(c) > 0) continue;
    const Eigen::MatrixXd dist = distance_matrix(data, centroids, metric);
    Eigen::Index best = -1;
    double best_dist = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const double d = dist(i, labels(i));
      if (sizes(labels(i)) > 1 && d > best_dist) {
        best = i;
        best_dist = d;
      }
    }
    if (best < 0) continue;
    --sizes(labels(best));
    labels(best) = static_cast<int>(c);
    ++sizes(c);
    centroids.row(c) = data.row(best);
  }
}

template <typename Update, typename Converged>
FitResult lloyd_style_run(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, int max_iter, Metric metric,
                          Update update, Converged converged) {
  FitResult result;
  result.model.k = static_cast<int>(centroids.rows());
  for (int iter = 1; iter <= max_iter; ++iter) {
    Labels labels = assign(centroids, data, metric);
    Eigen::MatrixXd next = update(data, labels, centroids);
    repair_empty_clusters(data, labels, next, metric);
    result.cost_trace.push_back(clustering_cost(data, labels, next, metric));
    result.model.n_iter = iter;
    const bool done = converged(next, centroids);
    centroids = std::move(next);
    if (done) {
      result.converged = true;
      break;
    }
  }
  result.labels = assign(centroids, data, metric);
  result.model.final_cost = clustering_cost(data, result.labels, centroids, metric);
  result.model.centroids = std::move(centroids);
  return result;
}

template <typename Run, typename Seeder>
FitResult best_of_restarts(int runs, Run run, Seeder seeder) {
  FitResult best;
  bool have = false;
  for (int r = 0; r < runs; ++r) {
    FitResult candidate = run(seeder(r));
    if (!have || candidate.model.final_cost < best.model.final_cost) {
      best = std::move(candidate);
      have = true;
    }
  }
  return best;
}

}  // namespace

Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids, Metric metric) {
  if (data.cols() != centroids.cols()) {
    throw ShapeError(fmt::format("data width {} differs from centroid width {}", data.cols(), centroids.cols()));
  }
  if (metric == Metric::matching) {
    require_binary(data, "data");
    require_binary(centroids, "centroids");
    // On {0,1} entries |x - c|^2 summed is the mismatch count, and every
    // term below is an exactly representable integer.
    Eigen::MatrixXd dist = -2.0 * data * centroids.transpose();
    dist.colwise() += data.rowwise().sum();
    dist.rowwise() += centroids.rowwise().sum().transpose();
    return dist;
  }
  Eigen::MatrixXd dist = Eigen::MatrixXd::Zero(data.rows(), centroids.rows());
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      dist.col(c).array() += (data.col(j).array() - centroids(c, j)).square();
    }
  }
  return dist;
}

Labels assign(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric) {
  if (centroids.rows() == 0) throw ShapeError("no centroids to assign to");
  const Eigen::MatrixXd dist = distance_matrix(data, centroids, metric);
  Labels labels(data.rows());
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < dist.cols(); ++c) {
      if (dist(i, c) < dist(i, best)) best = c;
    }
    labels(i) = static_cast<int>(best);
  }
  return labels;
}

double clustering_cost(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& centroids,
                       Metric metric) {
  check_labels(data, labels, centroids.rows());
  const Eigen::MatrixXd dist = distance_matrix(data, centroids, metric);
  double total = 0.0;
  for (Eigen::Index i = 0; i < labels.size(); ++i) total += dist(i, labels(i));
  return total;
}

double wcss(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& centroids) {
  return clustering_cost(data, labels, centroids, Metric::squared_euclidean);
}

Eigen::VectorXd cao_density(const Eigen::MatrixXd& data) {
  const double n = static_cast<double>(data.rows());
  const Eigen::RowVectorXd ones = data.colwise().sum();
  const Eigen::RowVectorXd zeros = Eigen::RowVectorXd::Constant(data.cols(), n) - ones;
  Eigen::VectorXd density(data.rows());
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    density(i) = (data.row(i).array() == 1.0).select(ones.array(), zeros.array()).sum();
  }
  return density / (n * static_cast<double>(data.cols()));
}

Eigen::MatrixXd cao_init(const Eigen::MatrixXd& data, int k) {
  check_fit_inputs(data, k);
  require_binary(data, "Cao initialization data");
  const Eigen::VectorXd density = cao_density(data);
  std::vector<Eigen::Index> chosen;
  Eigen::Index first = 0;
  density.maxCoeff(&first);  // first maximum
  chosen.push_back(first);

  Eigen::MatrixXd centroids(k, data.cols());
  centroids.row(0) = data.row(first);
  Eigen::VectorXd nearest = Eigen::VectorXd::Constant(data.rows(), std::numeric_limits<double>::infinity());
  for (int t = 1; t < k; ++t) {
    const Eigen::VectorXd dist = distance_matrix(data, centroids.row(t - 1), Metric::matching).col(0);
    nearest = nearest.cwiseMin(density.cwiseProduct(dist));
    Eigen::VectorXd score = nearest;
    for (auto c : chosen) score(c) = -1.0;
    Eigen::Index next = 0;
    score.maxCoeff(&next);
    chosen.push_back(next);
    centroids.row(t) = data.row(next);
  }
  return centroids;
}

Eigen::MatrixXd random_init(const Eigen::MatrixXd& data, int k, std::uint64_t seed) {
  check_fit_inputs(data, k);
  Rng rng(seed);
  const auto rows = sample_without_replacement(data.rows(), k, rng);
  Eigen::MatrixXd centroids(k, data.cols());
  for (int c = 0; c < k; ++c) centroids.row(c) = data.row(rows[static_cast<std::size_t>(c)]);
  return centroids;
}

Eigen::MatrixXd mode_update(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& current) {
  check_labels(data, labels, current.rows());
  Eigen::MatrixXd ones = Eigen::MatrixXd::Zero(current.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) ones.row(labels(i)) += data.row(i);
  const Eigen::VectorXi sizes = cluster_sizes(labels, current.rows());
  Eigen::MatrixXd next = current;
  for (Eigen::Index c = 0; c < current.rows(); ++c) {
    const double half = 0.5 * sizes(c);
    for (Eigen::Index j = 0; j < data.cols(); ++j) {
      if (ones(c, j) > half) {
        next(c, j) = 1.0;
      } else if (ones(c, j) < half) {
        next(c, j) = 0.0;
      }
    }
  }
  return next;
}

Eigen::MatrixXd mean_update(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& current) {
  check_labels(data, labels, current.rows());
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(current.rows(), data.cols());
  for (Eigen::Index i = 0; i < data.rows(); ++i) sums.row(labels(i)) += data.row(i);
  const Eigen::VectorXi sizes = cluster_sizes(labels, current.rows());
  Eigen::MatrixXd next = current;
  for (Eigen::Index c = 0; c < current.rows(); ++c) {
    if (sizes(c) > 0) next.row(c) = sums.row(c) / static_cast<double>(sizes(c));
  }
  return next;
}

FitResult kmodes_run(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, int max_iter) {
  require_binary(data, "k-modes data");
  auto result = lloyd_style_run(data, std::move(centroids), max_iter, Metric::matching, mode_update,
                                [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return a == b; });
  result.model.algorithm = Algorithm::kmodes;
  return result;
}

FitResult kmeans_run(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, int max_iter, double tol) {
  auto result = lloyd_style_run(data, std::move(centroids), max_iter, Metric::squared_euclidean, mean_update,
                                [tol](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
                                  return (a - b).rowwise().norm().maxCoeff() <= tol;
                                });
  result.model.algorithm = Algorithm::kmeans;
  return result;
}

FitResult kmodes_fit(const Eigen::MatrixXd& data, const FitOptions& options) {
  check_fit_inputs(data, options.k);
  require_binary(data, "k-modes data");
  if (options.max_iter < 1) throw ConfigError("max_iter must be positive");
  const int runs = options.init == Init::cao ? 1 : std::max(1, options.n_restarts);
  auto best = best_of_restarts(
      runs, [&](Eigen::MatrixXd start) { return kmodes_run(data, std::move(start), options.max_iter); },
      [&](int r) {
        return options.init == Init::cao ? cao_init(data, options.k)
                                         : random_init(data, options.k, restart_seed(options.seed, r));
      });
  best.model.seed = options.seed;
  return best;
}

FitResult kmeans_fit(const Eigen::MatrixXd& data, const FitOptions& options) {
  check_fit_inputs(data, options.k);
  if (options.max_iter < 1) throw ConfigError("max_iter must be positive");
  if (!(options.tol >= 0.0)) throw ConfigError("tolerance must be nonnegative");
  const int runs = options.init == Init::cao ? 1 : std::max(1, options.n_restarts);
  auto best = best_of_restarts(
      runs, [&](Eigen::MatrixXd start) { return kmeans_run(data, std::move(start), options.max_iter, options.tol); },
      [&](int r) {
        return options.init == Init::cao ? cao_init(data, options.k)
                                         : random_init(data, options.k, restart_seed(options.seed, r));
      });
  best.model.seed = options.seed;
  return best;
}

FitResult fit(const Eigen::MatrixXd& data, Algorithm algorithm, const FitOptions& options) {
  return algorithm == Algorithm::kmodes ? kmodes_fit(data, options) : kmeans_fit(data, options);
}

ElbowCurve elbow_curve(const Eigen::MatrixXd& data, Algorithm algorithm, const std::vector<int>& ks,
                       const FitOptions& options) {
  if (ks.empty()) throw ConfigError("elbow curve needs at least one k");
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < 1 || ks[i] > data.rows()) {
      throw ConfigError(fmt::format("k = {} must lie in [1, n = {}]", ks[i], data.rows()));
    }
    if (i > 0 && ks[i] <= ks[i - 1]) throw ConfigError("elbow ks must be strictly increasing");
  }
  ElbowCurve curve;
  for (int k : ks) {
    FitOptions per_k = options;
    per_k.k = k;
    per_k.seed = splitmix64(options.seed + static_cast<std::uint64_t>(k));
    curve.ks.push_back(k);
    curve.costs.push_back(fit(data, algorithm, per_k).model.final_cost);
  }
  return curve;
}

std::vector<double> second_differences(const ElbowCurve& curve) {
  if (curve.ks.size() != curve.costs.size()) throw ShapeError("elbow curve ks and costs differ in length");
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < curve.costs.size(); ++i) {
    out.push_back((curve.costs[i - 1] - curve.costs[i]) - (curve.costs[i] - curve.costs[i + 1]));
  }
  return out;
}

int detect_elbow(const ElbowCurve& curve) {
  if (curve.costs.size() < 3) {
    throw DetectionError(fmt::format("elbow detection needs at least 3 points, got {}", curve.costs.size()));
  }
  const auto d2 = second_differences(curve);
  const auto best = std::max_element(d2.begin(), d2.end());  // first maximum
  return curve.ks[static_cast<std::size_t>(best - d2.begin()) + 1];
}

}  // namespace prefcluster
