#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "prefcluster/errors.hpp"
#include "prefcluster/types.hpp"

namespace prefcluster {

enum class Algorithm { kmeans, kmodes };
enum class Init { cao, random };
enum class Metric { matching, squared_euclidean };

std::string_view to_string(Algorithm a);
std::string_view to_string(Init i);
std::string_view to_string(Metric m);
Algorithm parse_algorithm(std::string_view text);
Init parse_init(std::string_view text);
Metric parse_metric(std::string_view text);

/// Number of positions where two {0,1} vectors differ.
template <typename DerivedA, typename DerivedB>
Eigen::Index matching_dissimilarity(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  if (x.size() != y.size()) {
    throw ShapeError("matching dissimilarity needs vectors of equal length");
  }
  using ScalarA = typename DerivedA::Scalar;
  using ScalarB = typename DerivedB::Scalar;
  if ((x.array() == ScalarA(-1)).any() || (y.array() == ScalarB(-1)).any()) {
    throw InputError("matching dissimilarity is undefined on the missing marker -1");
  }
  return (x.template cast<double>().array() != y.template cast<double>().array()).count();
}

template <typename DerivedA, typename DerivedB>
double squared_euclidean(const Eigen::MatrixBase<DerivedA>& x, const Eigen::MatrixBase<DerivedB>& y) {
  if (x.size() != y.size()) {
    throw ShapeError("squared Euclidean distance needs vectors of equal length");
  }
  const auto diff = (x.template cast<double>().array() - y.template cast<double>().array()).eval();
  double total = 0.0;
  for (Eigen::Index i = 0; i < diff.size(); ++i) total += diff(i) * diff(i);
  return total;
}

/// n x k matrix of point-to-centroid distances. The matching metric requires
/// every entry of both inputs in {0, 1}.
Eigen::MatrixXd distance_matrix(const Eigen::MatrixXd& data, const Eigen::MatrixXd& centroids, Metric metric);

/// Nearest centroid per row; exact ties go to the lowest cluster index.
Labels assign(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric);

/// Sum of per-point distances to the assigned centroid.
double clustering_cost(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& centroids,
                       Metric metric);

/// Within-cluster sum of squares.
double wcss(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& centroids);

struct ClusterModel {
  Algorithm algorithm = Algorithm::kmodes;
  int k = 0;
  Eigen::MatrixXd centroids;
  double final_cost = 0.0;
  int n_iter = 0;
  std::uint64_t seed = 0;
};

struct FitOptions {
  int k = 3;
  Init init = Init::cao;
  std::uint64_t seed = 0;
  int max_iter = 100;
  /// Ignored for Cao initialization, which is deterministic.
  int n_restarts = 8;
  /// k-means stops once no centroid moves farther than this.
  double tol = 1e-6;
};

struct FitResult {
  ClusterModel model;
  Labels labels;
  /// Cost after each assign + update round of the winning restart.
  std::vector<double> cost_trace;
  bool converged = false;
};

/// Cao density/distance seeding for {0,1} data. Deterministic; ties go to
/// the lowest row index.
Eigen::MatrixXd cao_init(const Eigen::MatrixXd& data, int k);

/// Density of each row: average over columns of the fraction of rows
/// sharing that row's value in the column.
Eigen::VectorXd cao_density(const Eigen::MatrixXd& data);

/// k distinct rows chosen uniformly at random.
Eigen::MatrixXd random_init(const Eigen::MatrixXd& data, int k, std::uint64_t seed);

/// Column-wise mode of each cluster's members. A tied column keeps the
/// value in `current`; an empty cluster keeps its current centroid.
Eigen::MatrixXd mode_update(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& current);
/// Column-wise mean of each cluster's members; empty clusters keep `current`.
Eigen::MatrixXd mean_update(const Eigen::MatrixXd& data, const Labels& labels, const Eigen::MatrixXd& current);

/// k-modes from given starting centroids (a single run, no restarts).
FitResult kmodes_run(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, int max_iter);
/// Lloyd's k-means from given starting centroids.
FitResult kmeans_run(const Eigen::MatrixXd& data, Eigen::MatrixXd centroids, int max_iter, double tol);

/// k-modes on {0,1} data with matching dissimilarity; best of restarts.
FitResult kmodes_fit(const Eigen::MatrixXd& data, const FitOptions& options);
/// Lloyd's k-means; Init::cao seeds from Cao on {0,1} data, Init::random from random rows.
FitResult kmeans_fit(const Eigen::MatrixXd& data, const FitOptions& options);
FitResult fit(const Eigen::MatrixXd& data, Algorithm algorithm, const FitOptions& options);

/// Metric a fitted model is judged with.
inline Metric metric_for(Algorithm a) { return a == Algorithm::kmodes ? Metric::matching : Metric::squared_euclidean; }

struct ElbowCurve {
  std::vector<int> ks;
  std::vector<double> costs;
};

/// Fits once per k (each with seed splitmix64(options.seed + k)) and records the final cost.
ElbowCurve elbow_curve(const Eigen::MatrixXd& data, Algorithm algorithm, const std::vector<int>& ks,
                       const FitOptions& options);

/// (cost(k-1) - cost(k)) - (cost(k) - cost(k+1)) for each interior k.
std::vector<double> second_differences(const ElbowCurve& curve);

/// Interior k with the largest second difference; ties go to the smallest k.
int detect_elbow(const ElbowCurve& curve);

}  // namespace prefcluster
