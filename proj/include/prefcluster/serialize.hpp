#pragma once

#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prefcluster/analysis.hpp"
#include "prefcluster/clusterability.hpp"
#include "prefcluster/clustering.hpp"
#include "prefcluster/rbm.hpp"

namespace prefcluster {

inline constexpr std::string_view kRbmFormat = "prefcluster-rbm-v1";
inline constexpr std::string_view kModelFormat = "prefcluster-model-v1";

struct RbmArtifact {
  rbm::RbmParams params;
  rbm::TrainConfig config;
  rbm::TrainHistory history;
};

nlohmann::json to_json(const RbmArtifact& artifact);
RbmArtifact rbm_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ClusterModel& model);
ClusterModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OverlapReport& report);
nlohmann::json to_json(const HopkinsResult& result);

/// Throws FormatError naming the expected and found format tags.
void require_format(const nlohmann::json& j, std::string_view expected);

/// "k,cost" header followed by one row per k; costs use round-trip precision.
void write_elbow_curve(std::ostream& out, const ElbowCurve& curve);
ElbowCurve read_elbow_curve(std::istream& in);

void write_labels(std::ostream& out, const Labels& labels);
Labels read_labels(std::istream& in);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace prefcluster
