#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "prefcluster/clustering.hpp"
#include "prefcluster/types.hpp"

namespace prefcluster {

/// Per-cluster fraction of members who like each item.
struct PreferencePattern {
  Eigen::MatrixXd values;       ///< k x n_items, entries in [0, 1]
  Eigen::MatrixXi like_counts;  ///< k x n_items; values = like_counts / cluster_sizes
  Eigen::VectorXi cluster_sizes;

  Eigen::Index k() const { return values.rows(); }
  Eigen::Index n_items() const { return values.cols(); }
};

/// Throws AnalysisError for an empty cluster and InputError if `d2` still
/// contains the missing marker.
PreferencePattern preference_patterns(const Labels& labels, const BinaryRatingMatrix& d2, int k);

using ClusterPair = std::pair<int, int>;

struct OverlapReport {
  Metric metric = Metric::matching;
  double tolerance = 0.0;
  double relative_tolerance = 0.0;
  /// Unordered pairs (first < second) mapped to the number of tied points.
  std::map<ClusterPair, int> pairs;
};

/// A point ties clusters whose distance is within
/// max(tolerance, relative_tolerance * dmin) of its nearest distance dmin.
/// Every pair among two or more tied clusters counts as overlapping.
OverlapReport overlap_test(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric,
                           double tolerance, double relative_tolerance = 0.0);

/// Tolerances used by the pipeline: exact for the matching metric,
/// 1e-9 relative (1e-12 absolute floor) for squared Euclidean.
OverlapReport overlap_test(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric);

struct ChartOptions {
  int width = 1000;
  int height = 400;
  std::string title = "Cluster preference patterns";
  std::string x_label = "Item";
  std::string y_label = "Preference";
};

/// One row per cluster, values with 6 decimals.
void write_pattern_table(std::ostream& out, const PreferencePattern& pattern);
Eigen::MatrixXd read_pattern_table(std::istream& in);

/// Static SVG 1.1 line chart: one polyline per cluster, x = item 1..n, y in [0, 1].
void write_pattern_svg(std::ostream& out, const PreferencePattern& pattern, const ChartOptions& options = {});

struct ChartArtifacts {
  std::filesystem::path table;
  std::filesystem::path svg;
};

/// Writes `<stem>.csv` and `<stem>.svg` into `directory`.
ChartArtifacts emit_pattern_chart(const PreferencePattern& pattern, const std::filesystem::path& directory,
                                  const std::string& stem = "preferences", const ChartOptions& options = {});

}  // namespace prefcluster
