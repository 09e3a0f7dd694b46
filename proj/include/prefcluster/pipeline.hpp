#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "prefcluster/clustering.hpp"
#include "prefcluster/errors.hpp"
#include "prefcluster/rbm.hpp"

namespace prefcluster {

struct PipelineConfig {
  std::filesystem::path input;
  bool has_count_column = false;
  double test_fraction = 0.2;
  /// The seed field is ignored; the RBM stage seed is derived from `seed`.
  rbm::TrainConfig rbm;
  /// 0 selects default_hopkins_sample_size(n).
  Eigen::Index hopkins_m = 0;
  std::vector<int> elbow_ks{1, 2, 3, 4, 5};
  Algorithm algorithm = Algorithm::kmodes;
  Init init = Init::cao;
  std::optional<int> k;
  int n_restarts = 8;
  int max_iter = 100;
  std::filesystem::path output_dir = "prefcluster-out";
  std::uint64_t seed = 0;
};

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const nlohmann::json& j);

/// Pipeline stages in execution order.
inline constexpr std::string_view kStages[] = {"ingest", "train-rbm", "impute",      "hopkins",
                                               "elbow",  "cluster",   "preferences", "overlap"};

/// derive_seed(config.seed, stage) for every stage that consumes randomness.
nlohmann::json stage_seeds(std::uint64_t master_seed);

/// Artifact file names inside the output directory.
namespace artifacts {
inline constexpr const char* kBinarized = "binarized.csv";
inline constexpr const char* kSplit = "split.json";
inline constexpr const char* kRbm = "rbm.json";
inline constexpr const char* kD1 = "d1.csv";
inline constexpr const char* kD2 = "d2.csv";
inline constexpr const char* kHopkins = "hopkins.json";
inline constexpr const char* kElbowTable = "elbow.csv";
inline constexpr const char* kElbow = "elbow.json";
inline constexpr const char* kModel = "model.json";
inline constexpr const char* kLabels = "labels.csv";
inline constexpr const char* kPreferences = "preferences";
inline constexpr const char* kOverlapMatching = "overlap_matching.json";
inline constexpr const char* kOverlapEuclidean = "overlap_squared_euclidean.json";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifacts

/// Raised by run_pipeline when a stage fails.
class StageError : public Error {
public:
  StageError(std::string stage, const std::string& cause);
  const std::string& stage() const { return stage_; }

private:
  std::string stage_;
};

/// Each stage reads its inputs from, and writes its outputs to,
/// config.output_dir, and returns a JSON summary of its numeric results.
nlohmann::json run_stage(std::string_view stage, const PipelineConfig& config);

nlohmann::json stage_ingest(const PipelineConfig& config);
nlohmann::json stage_train_rbm(const PipelineConfig& config);
nlohmann::json stage_impute(const PipelineConfig& config);
nlohmann::json stage_hopkins(const PipelineConfig& config);
nlohmann::json stage_elbow(const PipelineConfig& config);
nlohmann::json stage_cluster(const PipelineConfig& config);
nlohmann::json stage_preferences(const PipelineConfig& config);
nlohmann::json stage_overlap(const PipelineConfig& config);

struct RunManifest {
  nlohmann::json document;

  bool complete() const { return document.value("status", "") == "complete"; }
  /// Stage outputs only; excludes wall-clock timings.
  const nlohmann::json& results() const { return document.at("stages"); }
};

/// Runs every stage in order and writes manifest.json. On failure the
/// manifest is still written, marked incomplete, and StageError is thrown.
RunManifest run_pipeline(const PipelineConfig& config);

}  // namespace prefcluster
