// prefcluster: rating binarization, RBM imputation and categorical
// clustering of user preference data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "prefcluster/pipeline.hpp"
#include "prefcluster/synthetic.hpp"

namespace {

constexpr int kExitStageFailure = 1;
constexpr int kExitUsage = 2;

struct CliState {
  prefcluster::PipelineConfig config;
  std::string algorithm = "kmodes";
  std::string init = "cao";
  int k = 0;
  bool json_output = false;
  prefcluster::SyntheticSpec synth;
  std::string synth_output = "synthetic.csv";
};

void add_pipeline_options(CLI::App& app, CliState& s) {
  auto& c = s.config;
  app.add_option("--input", c.input, "Delimited rating file, one user per row");
  app.add_flag("--has-count-column", c.has_count_column, "Rows start with the number of rated items");
  app.add_option("--test-fraction", c.test_fraction, "Fraction of users held out for RBM evaluation")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--n-hidden", c.rbm.n_hidden, "RBM hidden units")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--cd-k", c.rbm.cd_k, "Gibbs steps per CD update")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--learning-rate", c.rbm.learning_rate, "RBM learning rate")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--epochs", c.rbm.epochs, "RBM training epochs")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--batch-size", c.rbm.batch_size, "RBM mini-batch size")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--hopkins-m", c.hopkins_m, "Hopkins sample size (0 = min(ceil(0.1 n), 500))")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  app.add_option("--elbow-ks", c.elbow_ks, "Cluster counts for the elbow curve")->capture_default_str()->delimiter(',');
  app.add_option("--algorithm", s.algorithm, "Clustering algorithm")
      ->capture_default_str()
      ->check(CLI::IsMember({"kmodes", "kmeans"}));
  app.add_option("--init", s.init, "Centroid initialization")->capture_default_str()->check(CLI::IsMember({"cao", "random"}));
  app.add_option("--k", s.k, "Number of clusters (default: detected elbow)")->check(CLI::PositiveNumber);
  app.add_option("--n-restarts", c.n_restarts, "Restarts per fit with random initialization")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--max-iter", c.max_iter, "Iteration cap per fit")->capture_default_str()->check(CLI::PositiveNumber);
  app.add_option("--output-dir", c.output_dir, "Artifact directory")->capture_default_str();
  app.add_option("--seed", c.seed, "Master seed; stage seeds are derived from it")->capture_default_str();
  app.add_flag("--json", s.json_output, "Print stage results as JSON");
}

void print_summary(std::string_view stage, const nlohmann::json& result, bool as_json) {
  if (as_json) {
    std::cout << result.dump(2) << '\n';
    return;
  }
  if (stage == "hopkins") {
    std::cout << fmt::format("hopkins h = {:.6g} (m = {}, seed = {})\n", result.at("h").get<double>(),
                             result.at("m").get<long long>(), result.at("seed").get<std::uint64_t>());
    return;
  }
  if (stage == "elbow") {
    const auto ks = result.at("ks").get<std::vector<int>>();
    const auto costs = result.at("costs").get<std::vector<double>>();
    const auto d2 = result.at("second_differences").get<std::vector<double>>();
    std::cout << "k\tcost\tsecond_difference\n";
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const bool interior = i > 0 && i + 1 < ks.size() && i - 1 < d2.size();
      std::cout << fmt::format("{}\t{}\t{}\n", ks[i], costs[i], interior ? fmt::format("{}", d2[i - 1]) : "-");
    }
    if (!result.at("detected_k").is_null()) std::cout << "detected elbow: k = " << result.at("detected_k") << '\n';
    return;
  }
  std::cout << stage << ": " << result.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prefcluster: binarize ratings, impute with an RBM, and segment users by preference"};
  app.set_version_flag("--version", PREFCLUSTER_VERSION);
  app.set_config("--config", "", "Key-value configuration file (keys are the long option names)");
  app.require_subcommand(1);
  app.fallthrough();

  CliState state;
  add_pipeline_options(app, state);

  auto* run = app.add_subcommand("run", "Run every stage and write manifest.json");
  std::vector<CLI::App*> stage_commands;
  for (auto stage : prefcluster::kStages) {
    stage_commands.push_back(app.add_subcommand(std::string(stage), fmt::format("Run the {} stage alone", stage)));
  }
  auto* synth = app.add_subcommand("synth", "Write a synthetic rating corpus with planted archetypes");
  synth->add_option("--users", state.synth.n_users, "Number of users")->capture_default_str();
  synth->add_option("--items", state.synth.n_items, "Number of items")->capture_default_str();
  synth->add_option("--archetypes", state.synth.n_archetypes, "Number of planted archetypes")->capture_default_str();
  synth->add_option("--missing", state.synth.missing_fraction, "Missing-rating probability")->capture_default_str();
  synth->add_option("--flip", state.synth.flip_probability, "Per-rating archetype disagreement probability")
      ->capture_default_str();
  synth->add_option("--synth-seed", state.synth.seed, "Generator seed")->capture_default_str();
  synth->add_option("-o,--out", state.synth_output, "Output file")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  auto& config = state.config;
  try {
    config.algorithm = prefcluster::parse_algorithm(state.algorithm);
    config.init = prefcluster::parse_init(state.init);
  } catch (const prefcluster::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (state.k > 0) config.k = state.k;

  try {
    if (synth->parsed()) {
      const auto corpus = prefcluster::make_synthetic_corpus(state.synth);
      std::ofstream out(state.synth_output);
      if (!out) throw prefcluster::IoError("cannot write " + state.synth_output);
      prefcluster::write_raw_ratings(out, corpus.ratings, config.has_count_column);
      std::cout << fmt::format("wrote {} users x {} items to {}\n", state.synth.n_users, state.synth.n_items,
                               state.synth_output);
      return 0;
    }
    if (run->parsed()) {
      const auto manifest = prefcluster::run_pipeline(config);
      if (state.json_output) {
        std::cout << manifest.document.dump(2) << '\n';
      } else {
        for (auto stage : prefcluster::kStages) {
          print_summary(stage, manifest.results().at(std::string(stage)), false);
        }
        std::cout << "manifest: " << (config.output_dir / prefcluster::artifacts::kManifest).string() << '\n';
      }
      return 0;
    }
    for (auto* cmd : stage_commands) {
      if (cmd->parsed()) {
        const std::string stage = cmd->get_name();
        print_summary(stage, prefcluster::run_stage(stage, config), state.json_output);
        return 0;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitStageFailure;
  }
  return kExitUsage;
}
