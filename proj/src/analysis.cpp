#include "prefcluster/analysis.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include <fmt/format.h>

#include "prefcluster/errors.hpp"

namespace prefcluster {

PreferencePattern preference_patterns(const Labels& labels, const BinaryRatingMatrix& d2, int k) {
  if (k < 1) throw ConfigError("k must be positive");
  if (labels.size() != d2.n_users()) {
    throw ShapeError(fmt::format("{} labels for {} users", labels.size(), d2.n_users()));
  }
  if (d2.has_missing()) throw InputError("preference patterns need a fully imputed matrix (found -1)");

  PreferencePattern pattern;
  pattern.like_counts = Eigen::MatrixXi::Zero(k, d2.n_jokes());
  pattern.cluster_sizes = Eigen::VectorXi::Zero(k);
  const auto& values = d2.values();
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    const int c = labels(i);
    if (c < 0 || c >= k) throw ShapeError(fmt::format("label {} outside [0, {})", c, k));
    ++pattern.cluster_sizes(c);
    pattern.like_counts.row(c) += (values.row(i).array() == kLike).cast<int>().matrix();
  }
  for (int c = 0; c < k; ++c) {
    if (pattern.cluster_sizes(c) == 0) throw AnalysisError(fmt::format("cluster {} has no members", c));
  }
  pattern.values = pattern.like_counts.cast<double>().array().colwise() / pattern.cluster_sizes.cast<double>().array();
  return pattern;
}

OverlapReport overlap_test(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric,
                           double tolerance, double relative_tolerance) {
  if (!(tolerance >= 0.0) || !(relative_tolerance >= 0.0)) throw ConfigError("overlap tolerance must be nonnegative");
  OverlapReport report{metric, tolerance, relative_tolerance, {}};
  const Eigen::MatrixXd dist = distance_matrix(data, centroids, metric);
  std::vector<int> tied;
  for (Eigen::Index i = 0; i < dist.rows(); ++i) {
    const double dmin = dist.row(i).minCoeff();
    const double slack = std::max(tolerance, relative_tolerance * dmin);
    tied.clear();
    for (Eigen::Index c = 0; c < dist.cols(); ++c) {
      if (dist(i, c) - dmin <= slack) tied.push_back(static_cast<int>(c));
    }
    for (std::size_t a = 0; a < tied.size(); ++a) {
      for (std::size_t b = a + 1; b < tied.size(); ++b) ++report.pairs[{tied[a], tied[b]}];
    }
  }
  return report;
}

OverlapReport overlap_test(const Eigen::MatrixXd& centroids, const Eigen::MatrixXd& data, Metric metric) {
  return metric == Metric::matching ? overlap_test(centroids, data, metric, 0.0, 0.0)
                                    : overlap_test(centroids, data, metric, 1e-12, 1e-9);
}

void write_pattern_table(std::ostream& out, const PreferencePattern& pattern) {
  for (Eigen::Index c = 0; c < pattern.k(); ++c) {
    std::string line;
    for (Eigen::Index j = 0; j < pattern.n_items(); ++j) {
      if (j > 0) line += ',';
      line += fmt::format("{:.6f}", pattern.values(c, j));
    }
    out << line << '\n';
  }
}

Eigen::MatrixXd read_pattern_table(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream fields(line);
    std::string field;
    while (std::getline(fields, field, ',')) {
      try {
        row.push_back(std::stod(field));
      } catch (const std::exception&) {
        throw ParseError(fmt::format("pattern row {}: malformed number '{}'", rows.size() + 1, field));
      }
    }
    if (!rows.empty() && row.size() != rows.front().size()) throw ShapeError("ragged pattern table");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ShapeError("empty pattern table");
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return out;
}

namespace {

constexpr std::array<const char*, 10> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace

void write_pattern_svg(std::ostream& out, const PreferencePattern& pattern, const ChartOptions& options) {
  const double left = 60, right = 130, top = 40, bottom = 50;
  const double plot_w = options.width - left - right;
  const double plot_h = options.height - top - bottom;
  const Eigen::Index n = pattern.n_items();
  auto x_of = [&](Eigen::Index item) {  // item is 1-based
    return n > 1 ? left + plot_w * static_cast<double>(item - 1) / static_cast<double>(n - 1) : left + plot_w / 2;
  };
  auto y_of = [&](double v) { return top + plot_h * (1.0 - v); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\">\n",
      options.width, options.height);
  out << fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", options.width, options.height);
  out << fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">{}</text>\n",
                     left + plot_w / 2, escape_xml(options.title));

  // axes and gridlines
  out << fmt::format("<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n");
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\"/>\n", left, top, top + plot_h);
  out << fmt::format("<line x1=\"{0:.1f}\" y1=\"{2:.1f}\" x2=\"{1:.1f}\" y2=\"{2:.1f}\"/>\n", left, left + plot_w,
                     top + plot_h);
  out << "</g>\n<g font-size=\"11\" fill=\"black\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    out << fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{2:.2f}\" x2=\"{1:.1f}\" y2=\"{2:.2f}\" stroke=\"#dddddd\"/>"
        "<text x=\"{3:.1f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.2f}</text>\n",
        left, left + plot_w, y_of(v), left - 6, y_of(v) + 4, v);
  }
  const Eigen::Index step = std::max<Eigen::Index>(1, n / 10);
  for (Eigen::Index item = 1; item <= n; item += step) {
    out << fmt::format("<text x=\"{:.2f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", x_of(item),
                       top + plot_h + 16, item);
  }
  out << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                     left + plot_w / 2, top + plot_h + 38, escape_xml(options.x_label));
  out << fmt::format(
      "<text x=\"16\" y=\"{0:.1f}\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 {0:.1f})\">{1}"
      "</text>\n",
      top + plot_h / 2, escape_xml(options.y_label));
  out << "</g>\n";

  for (Eigen::Index c = 0; c < pattern.k(); ++c) {
    const char* colour = kPalette[static_cast<std::size_t>(c) % kPalette.size()];
    std::string points;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (j > 0) points += ' ';
      points += fmt::format("{:.2f},{:.2f}", x_of(j + 1), y_of(pattern.values(c, j)));
    }
    out << fmt::format("<polyline class=\"cluster-{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       c, colour, points);
  }

  out << "<g class=\"legend\" font-size=\"12\">\n";
  for (Eigen::Index c = 0; c < pattern.k(); ++c) {
    const double y = top + 10 + 18.0 * static_cast<double>(c);
    const double x = left + plot_w + 15;
    out << fmt::format(
        "<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"3\"/>"
        "<text x=\"{4:.1f}\" y=\"{5:.1f}\">Cluster {6}</text>\n",
        x, y, x + 20, kPalette[static_cast<std::size_t>(c) % kPalette.size()], x + 26, y + 4, c);
  }
  out << "</g>\n</svg>\n";
}

ChartArtifacts emit_pattern_chart(const PreferencePattern& pattern, const std::filesystem::path& directory,
                                  const std::string& stem, const ChartOptions& options) {
  ChartArtifacts paths{directory / (stem + ".csv"), directory / (stem + ".svg")};
  std::ofstream table(paths.table);
  std::ofstream svg(paths.svg);
  if (!table || !svg) throw IoError(fmt::format("cannot write chart artifacts into '{}'", directory.string()));
  write_pattern_table(table, pattern);
  write_pattern_svg(svg, pattern, options);
  if (!table || !svg) throw IoError(fmt::format("write failed in '{}'", directory.string()));
  return paths;
}

}  // namespace prefcluster
