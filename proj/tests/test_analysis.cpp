#include <doctest.h>

#include <algorithm>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "prefcluster/analysis.hpp"

using namespace prefcluster;

namespace {

BinaryRatingMatrix binary(std::initializer_list<std::initializer_list<int>> values) {
  BinaryMatrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index r = 0;
  for (const auto& row : values) {
    Eigen::Index c = 0;
    for (int v : row) m(r, c++) = static_cast<std::int8_t>(v);
    ++r;
  }
  return BinaryRatingMatrix(m);
}

Labels labels_of(std::initializer_list<int> values) {
  Labels l(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (int v : values) l(i++) = v;
  return l;
}

int count_substr(const std::string& text, const std::string& needle) {
  int n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("preference values are like fractions per cluster") {
  // joke 1: two of cluster 0's three members like it
  const auto d2 = binary({{1, 1, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}});
  const auto p = preference_patterns(labels_of({0, 0, 0, 1}), d2, 2);
  CHECK(p.values(0, 1) == doctest::Approx(2.0 / 3.0));
  CHECK(p.values(0, 0) == 1.0);
  CHECK(p.values(0, 2) == 0.0);
  CHECK(p.values(1, 2) == 0.0);
  CHECK(p.cluster_sizes(0) == 3);
  CHECK(p.like_counts(0, 1) == 2);
  CHECK(p.cluster_sizes.sum() == 4);
}

TEST_CASE("preference_patterns errors") {
  const auto d2 = binary({{1, 0}, {0, 1}});
  CHECK_THROWS_AS(preference_patterns(labels_of({0, 0}), d2, 2), AnalysisError);
  CHECK_THROWS_AS(preference_patterns(labels_of({0, 1}), binary({{1, -1}, {0, 1}}), 2), InputError);
  CHECK_THROWS_AS(preference_patterns(labels_of({0, 2}), d2, 2), ShapeError);
}

TEST_CASE("overlap_test reports exact ties") {
  Eigen::MatrixXd centroids(2, 2);
  centroids << 0, 0, 1, 1;
  Eigen::MatrixXd point(1, 2);
  point << 0, 1;
  auto report = overlap_test(centroids, point, Metric::matching, 0.0);
  REQUIRE(report.pairs.size() == 1);
  CHECK(report.pairs.at({0, 1}) == 1);

  point << 1, 1;
  CHECK(overlap_test(centroids, point, Metric::matching, 0.0).pairs.empty());

  Eigen::MatrixXd same = Eigen::MatrixXd::Zero(3, 2);
  report = overlap_test(same, point, Metric::squared_euclidean, 0.0);
  CHECK(report.pairs.size() == 3);
  CHECK(report.pairs.count({0, 1}) == 1);
  CHECK(report.pairs.count({0, 2}) == 1);
  CHECK(report.pairs.count({1, 2}) == 1);
  CHECK_THROWS_AS(overlap_test(centroids, Eigen::MatrixXd::Zero(1, 3), Metric::matching, 0.0), ShapeError);
}

TEST_CASE("overlap default tolerances") {
  Eigen::MatrixXd centroids(2, 1);
  centroids << 0.0, 1.0;
  Eigen::MatrixXd point(1, 1);
  point << 0.5;
  auto report = overlap_test(centroids, point, Metric::squared_euclidean);
  CHECK(report.pairs.size() == 1);
  CHECK(report.relative_tolerance == 1e-9);
  point << 0.5 + 1e-6;
  CHECK(overlap_test(centroids, point, Metric::squared_euclidean).pairs.empty());
}

TEST_CASE("overlap is monotone in tolerance and symmetric under relabeling") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd data(40, 5), centroids(4, 5);
    for (Eigen::Index i = 0; i < data.size(); ++i) data.data()[i] = coin(rng);
    for (Eigen::Index i = 0; i < centroids.size(); ++i) centroids.data()[i] = coin(rng);
    const auto tight = overlap_test(centroids, data, Metric::matching, 0.0);
    const auto loose = overlap_test(centroids, data, Metric::matching, 1.0);
    for (const auto& [pair, count] : tight.pairs) {
      REQUIRE(loose.pairs.count(pair) == 1);
      CHECK(loose.pairs.at(pair) >= count);
    }
    std::vector<int> perm{0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(4, 5);
    for (int c = 0; c < 4; ++c) permuted.row(perm[c]) = centroids.row(c);
    const auto relabeled = overlap_test(permuted, data, Metric::matching, 0.0);
    REQUIRE(relabeled.pairs.size() == tight.pairs.size());
    for (const auto& [pair, count] : tight.pairs) {
      const ClusterPair mapped{std::min(perm[pair.first], perm[pair.second]),
                               std::max(perm[pair.first], perm[pair.second])};
      CHECK(relabeled.pairs.at(mapped) == count);
    }
  }
}

TEST_CASE("pattern chart structure") {
  PreferencePattern p;
  p.cluster_sizes = Eigen::VectorXi::Constant(3, 4);
  p.like_counts = Eigen::MatrixXi::Zero(3, 100);
  for (int c = 0; c < 3; ++c) {
    for (int j = 0; j < 100; ++j) p.like_counts(c, j) = (c + j) % 5;
  }
  p.like_counts = p.like_counts.cwiseMin(4);
  p.values = p.like_counts.cast<double>() / 4.0;

  std::ostringstream svg;
  write_pattern_svg(svg, p);
  const std::string text = svg.str();
  CHECK(count_substr(text, "<polyline") == 3);
  CHECK(text.find("width=\"1000\" height=\"400\"") != std::string::npos);
  CHECK(text.find("Cluster 2") != std::string::npos);
  const std::regex points_attr("points=\"([^\"]*)\"");
  int polylines = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), points_attr); it != std::sregex_iterator(); ++it) {
    const std::string pts = (*it)[1];
    CHECK(std::count(pts.begin(), pts.end(), ',') == 100);
    ++polylines;
  }
  CHECK(polylines == 3);

  std::stringstream table;
  write_pattern_table(table, p);
  CHECK(read_pattern_table(table) == p.values);
}

TEST_CASE("constant pattern draws a horizontal line at mid-axis") {
  PreferencePattern p;
  p.cluster_sizes = Eigen::VectorXi::Constant(1, 2);
  p.like_counts = Eigen::MatrixXi::Ones(1, 10);
  p.values = Eigen::MatrixXd::Constant(1, 10, 0.5);
  std::ostringstream svg;
  write_pattern_svg(svg, p);
  const std::string text = svg.str();
  const std::smatch m = [&] {
    std::smatch out;
    std::regex_search(text, out, std::regex("points=\"([^\"]*)\""));
    return out;
  }();
  std::stringstream pts(m[1].str());
  std::string vertex;
  std::set<std::string> ys;
  while (pts >> vertex) ys.insert(vertex.substr(vertex.find(',') + 1));
  REQUIRE(ys.size() == 1);
  // plot area spans y = 40 .. 350
  CHECK(std::stod(*ys.begin()) == doctest::Approx(40 + 310 * 0.5));
}

TEST_CASE("emit_pattern_chart writes both files") {
  PreferencePattern p;
  p.cluster_sizes = Eigen::VectorXi::Constant(2, 2);
  p.like_counts = Eigen::MatrixXi::Ones(2, 3);
  p.values = Eigen::MatrixXd::Constant(2, 3, 0.5);
  const auto dir = std::filesystem::temp_directory_path() / "prefcluster_chart_test";
  std::filesystem::create_directories(dir);
  const auto paths = emit_pattern_chart(p, dir);
  CHECK(std::filesystem::exists(paths.table));
  CHECK(std::filesystem::exists(paths.svg));
  CHECK_THROWS_AS(emit_pattern_chart(p, dir / "missing" / "deeper"), IoError);
  std::filesystem::remove_all(dir);
}
