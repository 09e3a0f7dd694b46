#include "prefcluster/serialize.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "prefcluster/errors.hpp"

namespace prefcluster {

using nlohmann::json;

namespace {

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j, Eigen::Index expected, std::string_view what) {
  const auto values = j.get<std::vector<double>>();
  if (static_cast<Eigen::Index>(values.size()) != expected) {
    throw FormatError(fmt::format("{}: expected {} values, found {}", what, expected, values.size()));
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), expected);
}

template <typename Fn>
auto parse_guard(std::string_view what, Fn fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed {}: {}", what, e.what()));
  }
}

}  // namespace

void require_format(const json& j, std::string_view expected) {
  const std::string found = j.is_object() && j.contains("format") && j["format"].is_string()
                                ? j["format"].get<std::string>()
                                : std::string("<none>");
  if (found != expected) {
    throw FormatError(fmt::format("artifact format mismatch: expected '{}', found '{}'", expected, found));
  }
}

json to_json(const RbmArtifact& artifact) {
  const auto& p = artifact.params;
  std::vector<double> weights;
  weights.reserve(static_cast<std::size_t>(p.weights.size()));
  for (Eigen::Index r = 0; r < p.weights.rows(); ++r) {
    for (Eigen::Index c = 0; c < p.weights.cols(); ++c) weights.push_back(p.weights(r, c));
  }
  const auto& cfg = artifact.config;
  return json{{"format", kRbmFormat},
              {"n_visible", p.n_visible()},
              {"n_hidden", p.n_hidden()},
              {"weights", weights},
              {"visible_bias", vector_to_json(p.visible_bias)},
              {"hidden_bias", vector_to_json(p.hidden_bias)},
              {"config",
               {{"n_hidden", cfg.n_hidden},
                {"cd_k", cfg.cd_k},
                {"learning_rate", cfg.learning_rate},
                {"epochs", cfg.epochs},
                {"batch_size", cfg.batch_size},
                {"seed", cfg.seed}}},
              {"history", artifact.history.reconstruction_error}};
}

RbmArtifact rbm_from_json(const json& j) {
  require_format(j, kRbmFormat);
  return parse_guard("RBM artifact", [&] {
    RbmArtifact out;
    const auto nv = j.at("n_visible").get<Eigen::Index>();
    const auto nh = j.at("n_hidden").get<Eigen::Index>();
    if (nv < 1 || nh < 1) throw FormatError("RBM artifact has non-positive dimensions");
    const auto w = vector_from_json(j.at("weights"), nv * nh, "weights");
    out.params.weights = Eigen::Map<const RowMatrix<double>>(w.data(), nh, nv);
    out.params.visible_bias = vector_from_json(j.at("visible_bias"), nv, "visible_bias");
    out.params.hidden_bias = vector_from_json(j.at("hidden_bias"), nh, "hidden_bias");
    const auto& cfg = j.at("config");
    out.config.n_hidden = cfg.at("n_hidden").get<int>();
    out.config.cd_k = cfg.at("cd_k").get<int>();
    out.config.learning_rate = cfg.at("learning_rate").get<double>();
    out.config.epochs = cfg.at("epochs").get<int>();
    out.config.batch_size = cfg.at("batch_size").get<int>();
    out.config.seed = cfg.at("seed").get<std::uint64_t>();
    if (j.contains("history")) out.history.reconstruction_error = j["history"].get<std::vector<double>>();
    return out;
  });
}

json to_json(const ClusterModel& model) {
  json centroids = json::array();
  for (Eigen::Index r = 0; r < model.centroids.rows(); ++r) {
    const Eigen::VectorXd row = model.centroids.row(r).transpose();
    centroids.push_back(vector_to_json(row));
  }
  return json{{"format", kModelFormat},          {"algorithm", to_string(model.algorithm)},
              {"k", model.k},                    {"centroids", centroids},
              {"cost", model.final_cost},        {"n_iter", model.n_iter},
              {"seed", model.seed}};
}

ClusterModel model_from_json(const json& j) {
  require_format(j, kModelFormat);
  return parse_guard("cluster model", [&] {
    ClusterModel m;
    m.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    m.k = j.at("k").get<int>();
    const auto rows = j.at("centroids").get<std::vector<std::vector<double>>>();
    if (m.k < 1 || static_cast<int>(rows.size()) != m.k) throw FormatError("cluster model k disagrees with centroids");
    const auto d = static_cast<Eigen::Index>(rows.front().size());
    m.centroids.resize(m.k, d);
    for (int r = 0; r < m.k; ++r) {
      if (static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)].size()) != d) {
        throw FormatError("ragged centroid rows");
      }
      for (Eigen::Index c = 0; c < d; ++c) m.centroids(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
    }
    if (m.algorithm == Algorithm::kmodes && !(m.centroids.array() == 0.0 || m.centroids.array() == 1.0).all()) {
      throw FormatError("k-modes centroids must be 0/1");
    }
    m.final_cost = j.at("cost").get<double>();
    m.n_iter = j.at("n_iter").get<int>();
    m.seed = j.at("seed").get<std::uint64_t>();
    return m;
  });
}

json to_json(const OverlapReport& report) {
  json pairs = json::array();
  json counts = json::array();
  for (const auto& [pair, count] : report.pairs) {
    pairs.push_back({pair.first, pair.second});
    counts.push_back(count);
  }
  return json{{"metric", to_string(report.metric)},
              {"tolerance", report.tolerance},
              {"relative_tolerance", report.relative_tolerance},
              {"pairs", pairs},
              {"counts", counts}};
}

json to_json(const HopkinsResult& result) {
  return json{{"h", result.h}, {"m", result.sample_size}, {"seed", result.seed}};
}

void write_elbow_curve(std::ostream& out, const ElbowCurve& curve) {
  out << "k,cost\n";
  for (std::size_t i = 0; i < curve.ks.size(); ++i) out << fmt::format("{},{}\n", curve.ks[i], curve.costs[i]);
}

ElbowCurve read_elbow_curve(std::istream& in) {
  ElbowCurve curve;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      if (line.rfind("k,", 0) == 0) continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw ParseError(fmt::format("elbow row '{}' lacks a delimiter", line));
    try {
      curve.ks.push_back(std::stoi(line.substr(0, comma)));
      curve.costs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ParseError(fmt::format("malformed elbow row '{}'", line));
    }
  }
  return curve;
}

void write_labels(std::ostream& out, const Labels& labels) {
  for (Eigen::Index i = 0; i < labels.size(); ++i) out << labels(i) << '\n';
}

Labels read_labels(std::istream& in) {
  std::vector<int> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    try {
      values.push_back(std::stoi(line));
    } catch (const std::exception&) {
      throw ParseError(fmt::format("malformed label '{}'", line));
    }
  }
  return Eigen::Map<const Labels>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open '{}'", path.string()));
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("'{}' is not valid JSON: {}", path.string(), e.what()));
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  out << j.dump(2) << '\n';
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

}  // namespace prefcluster
