#include "prefcluster/pipeline.hpp"

#include <chrono>
#include <fstream>

#include <fmt/format.h>

#include "prefcluster/analysis.hpp"
#include "prefcluster/clusterability.hpp"
#include "prefcluster/ratings_io.hpp"
#include "prefcluster/serialize.hpp"

namespace prefcluster {

using nlohmann::json;

namespace {

constexpr std::string_view kSplitFormat = "prefcluster-split-v1";
constexpr std::string_view kElbowFormat = "prefcluster-elbow-v1";

std::filesystem::path in_output(const PipelineConfig& config, const char* name) { return config.output_dir / name; }

void ensure_output_dir(const PipelineConfig& config) {
  std::error_code ec;
  std::filesystem::create_directories(config.output_dir, ec);
  if (ec || !std::filesystem::is_directory(config.output_dir)) {
    throw IoError(fmt::format("cannot create output directory '{}'", config.output_dir.string()));
  }
}

std::uint64_t seed_for(const PipelineConfig& config, std::string_view stage) { return derive_seed(config.seed, stage); }

std::vector<Eigen::Index> index_list(const json& j) { return j.get<std::vector<Eigen::Index>>(); }

Eigen::MatrixXd load_d1(const PipelineConfig& config) {
  return read_binary_matrix(in_output(config, artifacts::kD1)).as_real();
}

FitOptions fit_options(const PipelineConfig& config, int k) {
  FitOptions options;
  options.k = k;
  options.init = config.init;
  options.n_restarts = config.n_restarts;
  options.max_iter = config.max_iter;
  return options;
}

}  // namespace

StageError::StageError(std::string stage, const std::string& cause)
    : Error(fmt::format("stage '{}' failed: {}", stage, cause)), stage_(std::move(stage)) {}

json to_json(const PipelineConfig& c) {
  return json{{"input", c.input.string()},
              {"has-count-column", c.has_count_column},
              {"test-fraction", c.test_fraction},
              {"n-hidden", c.rbm.n_hidden},
              {"cd-k", c.rbm.cd_k},
              {"learning-rate", c.rbm.learning_rate},
              {"epochs", c.rbm.epochs},
              {"batch-size", c.rbm.batch_size},
              {"hopkins-m", c.hopkins_m},
              {"elbow-ks", c.elbow_ks},
              {"algorithm", to_string(c.algorithm)},
              {"init", to_string(c.init)},
              {"k", c.k ? json(*c.k) : json(nullptr)},
              {"n-restarts", c.n_restarts},
              {"max-iter", c.max_iter},
              {"output-dir", c.output_dir.string()},
              {"seed", c.seed}};
}

PipelineConfig config_from_json(const json& j) {
  try {
    PipelineConfig c;
    c.input = j.at("input").get<std::string>();
    c.has_count_column = j.at("has-count-column").get<bool>();
    c.test_fraction = j.at("test-fraction").get<double>();
    c.rbm.n_hidden = j.at("n-hidden").get<int>();
    c.rbm.cd_k = j.at("cd-k").get<int>();
    c.rbm.learning_rate = j.at("learning-rate").get<double>();
    c.rbm.epochs = j.at("epochs").get<int>();
    c.rbm.batch_size = j.at("batch-size").get<int>();
    c.hopkins_m = j.at("hopkins-m").get<Eigen::Index>();
    c.elbow_ks = j.at("elbow-ks").get<std::vector<int>>();
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    c.init = parse_init(j.at("init").get<std::string>());
    if (!j.at("k").is_null()) c.k = j.at("k").get<int>();
    c.n_restarts = j.at("n-restarts").get<int>();
    c.max_iter = j.at("max-iter").get<int>();
    c.output_dir = j.at("output-dir").get<std::string>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("malformed pipeline configuration: {}", e.what()));
  }
}

json stage_seeds(std::uint64_t master_seed) {
  json seeds = json::object();
  for (auto stage : {"ingest", "train-rbm", "hopkins", "elbow", "cluster"}) seeds[stage] = derive_seed(master_seed, stage);
  return seeds;
}

json stage_ingest(const PipelineConfig& config) {
  ensure_output_dir(config);
  const auto raw = load_ratings(config.input, config.has_count_column);
  const auto binary = binarize(raw);
  const auto split = split_users(binary, config.test_fraction, seed_for(config, "ingest"));
  write_binary_matrix(in_output(config, artifacts::kBinarized), binary);
  write_json_file(in_output(config, artifacts::kSplit), json{{"format", kSplitFormat},
                                                             {"unit", "users"},
                                                             {"test_fraction", config.test_fraction},
                                                             {"seed", split.seed},
                                                             {"train_rows", split.train_rows},
                                                             {"test_rows", split.test_rows}});
  const auto likes = (binary.values().array() == kLike).count();
  return json{{"n_users", binary.n_users()},
              {"n_jokes", binary.n_jokes()},
              {"observed", binary.observed_count()},
              {"likes", likes},
              {"n_train", split.train_rows.size()},
              {"n_test", split.test_rows.size()}};
}

json stage_train_rbm(const PipelineConfig& config) {
  const auto binary = read_binary_matrix(in_output(config, artifacts::kBinarized));
  const auto split_doc = read_json_file(in_output(config, artifacts::kSplit));
  require_format(split_doc, kSplitFormat);
  const auto train_rows = index_list(split_doc.at("train_rows"));
  const auto test_rows = index_list(split_doc.at("test_rows"));

  RbmArtifact artifact;
  artifact.config = config.rbm;
  artifact.config.seed = seed_for(config, "train-rbm");
  auto trained = rbm::train(artifact.config, binary.rows(train_rows));
  artifact.params = std::move(trained.params);
  artifact.history = std::move(trained.history);
  const double mae = rbm::evaluate_mae(artifact.params, binary.rows(test_rows));
  write_json_file(in_output(config, artifacts::kRbm), to_json(artifact));
  return json{{"test_mae", mae}, {"reconstruction_error", artifact.history.reconstruction_error}};
}

json stage_impute(const PipelineConfig& config) {
  const auto artifact = rbm_from_json(read_json_file(in_output(config, artifacts::kRbm)));
  const auto binary = read_binary_matrix(in_output(config, artifacts::kBinarized));
  const auto imputed = rbm::build_d1_d2(artifact.params, binary);
  write_binary_matrix(in_output(config, artifacts::kD1), imputed.d1);
  write_binary_matrix(in_output(config, artifacts::kD2), imputed.d2);
  const auto n_cells = imputed.d1.n_users() * imputed.d1.n_jokes();
  const auto observed = binary.observed_count();
  const auto disagreements =
      ((binary.values().array() != kMissing) && (imputed.d1.values().array() != binary.values().array())).count();
  return json{{"imputed_cells", n_cells - observed},
              {"d1_likes", (imputed.d1.values().array() == kLike).count()},
              {"d2_likes", (imputed.d2.values().array() == kLike).count()},
              {"d1_observed_disagreement", observed > 0 ? static_cast<double>(disagreements) / observed : 0.0}};
}

json stage_hopkins(const PipelineConfig& config) {
  const Eigen::MatrixXd d1 = load_d1(config);
  const Eigen::Index m = config.hopkins_m > 0 ? config.hopkins_m : default_hopkins_sample_size(d1.rows());
  const auto result = hopkins(d1, m, seed_for(config, "hopkins"));
  write_json_file(in_output(config, artifacts::kHopkins), to_json(result));
  return to_json(result);
}

json stage_elbow(const PipelineConfig& config) {
  const Eigen::MatrixXd d1 = load_d1(config);
  auto options = fit_options(config, 1);
  options.seed = seed_for(config, "elbow");
  const auto curve = elbow_curve(d1, config.algorithm, config.elbow_ks, options);
  {
    std::ofstream table(in_output(config, artifacts::kElbowTable));
    if (!table) throw IoError("cannot write elbow table");
    write_elbow_curve(table, curve);
  }
  json doc{{"format", kElbowFormat},
           {"algorithm", to_string(config.algorithm)},
           {"init", to_string(config.init)},
           {"ks", curve.ks},
           {"costs", curve.costs}};
  if (curve.costs.size() >= 3) {
    doc["second_differences"] = second_differences(curve);
    doc["detected_k"] = detect_elbow(curve);
  } else {
    doc["second_differences"] = json::array();
    doc["detected_k"] = nullptr;
  }
  write_json_file(in_output(config, artifacts::kElbow), doc);
  doc.erase("format");
  return doc;
}

json stage_cluster(const PipelineConfig& config) {
  const Eigen::MatrixXd d1 = load_d1(config);
  int k = 0;
  std::string k_source;
  if (config.k) {
    k = *config.k;
    k_source = "override";
  } else {
    const auto elbow = read_json_file(in_output(config, artifacts::kElbow));
    require_format(elbow, kElbowFormat);
    if (elbow.at("detected_k").is_null()) {
      throw ConfigError("no k given and the elbow curve is too short to detect one");
    }
    k = elbow.at("detected_k").get<int>();
    k_source = "elbow";
  }
  auto options = fit_options(config, k);
  options.seed = seed_for(config, "cluster");
  const auto result = fit(d1, config.algorithm, options);
  write_json_file(in_output(config, artifacts::kModel), to_json(result.model));
  return json{{"algorithm", to_string(config.algorithm)},
              {"init", to_string(config.init)},
              {"k", k},
              {"k_source", k_source},
              {"cost", result.model.final_cost},
              {"n_iter", result.model.n_iter},
              {"converged", result.converged}};
}

json stage_preferences(const PipelineConfig& config) {
  const auto model = model_from_json(read_json_file(in_output(config, artifacts::kModel)));
  const auto d2 = read_binary_matrix(in_output(config, artifacts::kD2));
  const Labels labels = assign(model.centroids, d2.as_real(), metric_for(model.algorithm));
  {
    std::ofstream out(in_output(config, artifacts::kLabels));
    if (!out) throw IoError("cannot write labels");
    write_labels(out, labels);
  }
  const auto pattern = preference_patterns(labels, d2, model.k);
  emit_pattern_chart(pattern, config.output_dir, artifacts::kPreferences);
  std::vector<int> sizes(pattern.cluster_sizes.data(), pattern.cluster_sizes.data() + pattern.cluster_sizes.size());
  std::vector<double> mean_preference;
  for (Eigen::Index c = 0; c < pattern.k(); ++c) mean_preference.push_back(pattern.values.row(c).mean());
  return json{{"cluster_sizes", sizes}, {"mean_preference", mean_preference}};
}

json stage_overlap(const PipelineConfig& config) {
  const auto model = model_from_json(read_json_file(in_output(config, artifacts::kModel)));
  const Eigen::MatrixXd d2 = read_binary_matrix(in_output(config, artifacts::kD2)).as_real();
  json summary = json::object();
  const bool binary_centroids = (model.centroids.array() == 0.0 || model.centroids.array() == 1.0).all();
  if (binary_centroids) {
    const auto report = overlap_test(model.centroids, d2, Metric::matching);
    write_json_file(in_output(config, artifacts::kOverlapMatching), to_json(report));
    summary["matching"] = to_json(report);
  } else {
    summary["matching"] = nullptr;  // undefined for fractional centroids
  }
  const auto report = overlap_test(model.centroids, d2, Metric::squared_euclidean);
  write_json_file(in_output(config, artifacts::kOverlapEuclidean), to_json(report));
  summary["squared_euclidean"] = to_json(report);
  return summary;
}

json run_stage(std::string_view stage, const PipelineConfig& config) {
  if (stage == "ingest") return stage_ingest(config);
  if (stage == "train-rbm") return stage_train_rbm(config);
  if (stage == "impute") return stage_impute(config);
  if (stage == "hopkins") return stage_hopkins(config);
  if (stage == "elbow") return stage_elbow(config);
  if (stage == "cluster") return stage_cluster(config);
  if (stage == "preferences") return stage_preferences(config);
  if (stage == "overlap") return stage_overlap(config);
  throw ConfigError(fmt::format("unknown stage '{}'", stage));
}

RunManifest run_pipeline(const PipelineConfig& config) {
  RunManifest manifest;
  auto& doc = manifest.document;
  doc = json{{"tool", "prefcluster"},
             {"version", PREFCLUSTER_VERSION},
             {"config", to_json(config)},
             {"seeds", stage_seeds(config.seed)},
             {"notes",
              {{"split_unit", "users"},
               {"d1", "model prediction for every cell"},
               {"mode_ties", "tied columns keep the current centroid value"},
               {"cao_restarts", "Cao initialization is deterministic and runs once"}}},
             {"status", "running"},
             {"stages", json::object()},
             {"timings_ms", json::object()}};

  auto write_manifest = [&] {
    std::error_code ec;
    std::filesystem::create_directories(config.output_dir, ec);
    write_json_file(in_output(config, artifacts::kManifest), doc);
  };

  for (auto stage : kStages) {
    const auto start = std::chrono::steady_clock::now();
    try {
      doc["stages"][std::string(stage)] = run_stage(stage, config);
    } catch (const std::exception& e) {
      doc["status"] = "incomplete";
      doc["failed_stage"] = stage;
      doc["error"] = e.what();
      try {
        write_manifest();
      } catch (const Error&) {
        // the stage error is the one worth reporting
      }
      throw StageError(std::string(stage), e.what());
    }
    const auto elapsed = std::chrono::steady_clock::now() - start;
    doc["timings_ms"][std::string(stage)] = std::chrono::duration<double, std::milli>(elapsed).count();
  }
  doc["status"] = "complete";
  write_manifest();
  return manifest;
}

}  // namespace prefcluster
