// Acceptance suites. Prints one PASS/FAIL line per criterion.
//
//   acceptance --suite properties   criteria 5-10, no external data
//   acceptance --suite jester       criteria 1-4 on the public Jester ratings
//
// The jester suite reads PREFCLUSTER_JESTER_CSV (delimited text, one user per
// row, 99 = missing), PREFCLUSTER_JESTER_COUNT_COLUMN (default 1: rows start
// with the rated-item count, as in the original distribution) and
// PREFCLUSTER_JESTER_SUBSAMPLE (users to keep, 0 = all). Without the data it
// exits with 77, which ctest reports as skipped.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <set>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "prefcluster/analysis.hpp"
#include "prefcluster/clusterability.hpp"
#include "prefcluster/clustering.hpp"
#include "prefcluster/pipeline.hpp"
#include "prefcluster/ratings_io.hpp"
#include "prefcluster/rbm.hpp"
#include "prefcluster/serialize.hpp"
#include "prefcluster/synthetic.hpp"

using namespace prefcluster;
namespace fs = std::filesystem;

namespace {

constexpr int kSkipped = 77;

class Report {
public:
  void record(int id, const std::string& name, bool pass, const std::string& detail) {
    std::cout << fmt::format("[{}] C{:<2} {:<34} {}\n", pass ? "PASS" : "FAIL", id, name, detail) << std::flush;
    failures_ += pass ? 0 : 1;
  }
  int failures() const { return failures_; }

private:
  int failures_ = 0;
};

template <typename Fn>
void timed(Report& report, int id, const std::string& name, Fn fn) {
  const auto start = std::chrono::steady_clock::now();
  std::string detail;
  bool pass = false;
  try {
    pass = fn(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.record(id, name, pass, fmt::format("{} [{:.1f}s]", detail, secs));
}

Eigen::MatrixXd random_binary(Eigen::Index n, Eigen::Index d, std::mt19937_64& rng) {
  std::bernoulli_distribution coin(0.5);
  Eigen::MatrixXd x(n, d);
  for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = coin(rng) ? 1.0 : 0.0;
  return x;
}

// ---------------------------------------------------------------- criterion 5

bool binarization_grid(std::string& detail) {
  RawRatingMatrix raw;
  raw.values.resize(1, 2002);
  for (int cents = -1000; cents <= 1000; ++cents) raw.values(0, cents + 1000) = cents / 100.0;
  raw.values(0, 2001) = 99.0;
  const auto out = binarize(raw);
  int exceptions = 0;
  for (int cents = -1000; cents <= 1000; ++cents) {
    const auto v = out(0, cents + 1000);
    const bool like_band = cents >= 700;
    if (v != (like_band ? 1 : 0)) ++exceptions;
  }
  if (out(0, 2001) != -1) ++exceptions;
  detail = fmt::format("2002 grid values, {} exceptions", exceptions);
  return exceptions == 0;
}

// ---------------------------------------------------------------- criterion 6

bool tiny_rbm_oracle(std::string& detail) {
  rbm::RbmParams p;
  p.weights.resize(2, 3);
  p.weights << 0.8, -1.1, 0.3, -0.4, 0.9, 1.2;
  p.visible_bias = Eigen::Vector3d(0.2, -0.5, 0.1);
  p.hidden_bias = Eigen::Vector2d(-0.3, 0.6);
  const oracle::ExactRbm exact{p.weights, p.visible_bias, p.hidden_bias};

  double worst = 0.0;
  for (std::uint32_t v = 0; v < 8; ++v) {
    BinaryVector bv(3);
    for (int i = 0; i < 3; ++i) bv(i) = static_cast<std::int8_t>(v >> i & 1U);
    const auto ph = rbm::hidden_probs(p, bv);
    for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(ph(j) - exact.hidden_conditional(v, j)));
  }
  for (std::uint32_t h = 0; h < 4; ++h) {
    const auto pv = rbm::visible_probs(p, Eigen::Vector2d(h & 1U, h >> 1 & 1U));
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(pv(i) - exact.visible_conditional(h, i)));
  }

  Rng rng(2024);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(1, 3);
  Eigen::Vector3d counts = Eigen::Vector3d::Zero();
  const int burn_in = 1000, steps = 100000;
  for (int t = 0; t < burn_in + steps; ++t) {
    const Eigen::MatrixXd h = rbm::sample_bernoulli(rbm::hidden_probs_batch(p, v), rng);
    v = rbm::sample_bernoulli(rbm::visible_probs_batch(p, h), rng);
    if (t >= burn_in) counts += v.row(0).transpose();
  }
  const Eigen::Vector3d empirical = counts / steps;
  const double gibbs_err = (empirical - exact.visible_marginals()).cwiseAbs().maxCoeff();
  detail = fmt::format("max conditional error {:.2e} (tol 1e-10), Gibbs marginal error {:.4f} (tol 0.02)", worst,
                       gibbs_err);
  return worst <= 1e-10 && gibbs_err <= 0.02;
}

// ---------------------------------------------------------------- criterion 7

bool descent_and_termination(std::string& detail) {
  std::mt19937_64 rng(7);
  int violations = 0, unconverged = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> n_pick(20, 200), d_pick(5, 30), k_pick(2, 6);
    const auto data = random_binary(n_pick(rng), d_pick(rng), rng);
    FitOptions options;
    options.k = k_pick(rng);
    options.init = trial % 2 == 0 ? Init::random : Init::cao;
    options.seed = static_cast<std::uint64_t>(trial);
    options.n_restarts = 1;
    options.max_iter = 500;
    const auto modes = kmodes_fit(data, options);
    const auto means = kmeans_fit(data, options);
    for (const auto* fit : {&modes, &means}) {
      for (std::size_t i = 1; i < fit->cost_trace.size(); ++i) {
        if (fit->cost_trace[i] > fit->cost_trace[i - 1] + 1e-9) ++violations;
      }
    }
    if (!modes.converged) ++unconverged;
  }
  detail = fmt::format("100 datasets: {} cost increases, {} k-modes runs without a fixpoint", violations, unconverged);
  return violations == 0 && unconverged == 0;
}

// ---------------------------------------------------------------- criterion 8

bool oracle_equivalence(std::string& detail) {
  std::mt19937_64 rng(8);
  int matches = 0, step_mismatches = 0;
  const int instances = 200;
  for (int t = 0; t < instances; ++t) {
    std::uniform_int_distribution<int> n_pick(2, 8), d_pick(1, 4);
    const auto data = random_binary(n_pick(rng), d_pick(rng), rng);
    FitOptions options;
    options.k = 2;
    options.init = Init::random;
    options.n_restarts = 32;
    options.seed = static_cast<std::uint64_t>(t);
    if (kmodes_fit(data, options).model.final_cost == oracle::optimal_two_mode_cost(data)) ++matches;

    // assignment against a per-point scan
    const auto centroids = random_binary(2, data.cols(), rng);
    const auto labels = assign(centroids, data, Metric::matching);
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const int d0 = oracle::hamming(data.row(i), centroids.row(0));
      const int d1 = oracle::hamming(data.row(i), centroids.row(1));
      if (labels(i) != (d1 < d0 ? 1 : 0)) ++step_mismatches;
    }

    // update steps against exhaustive search over candidate centroids
    const auto modes = mode_update(data, labels, centroids);
    const auto means = mean_update(data, labels, centroids);
    for (int c = 0; c < 2; ++c) {
      std::vector<Eigen::Index> members;
      for (Eigen::Index i = 0; i < data.rows(); ++i) {
        if (labels(i) == c) members.push_back(i);
      }
      if (members.empty()) continue;
      int mode_cost = 0;
      for (auto i : members) mode_cost += oracle::hamming(data.row(i), modes.row(c));
      if (mode_cost != oracle::best_binary_centroid_cost(data, members)) ++step_mismatches;

      // the mean of 0/1 rows lies on the lattice {0, 1/m, ..., 1}^d
      const auto m = static_cast<int>(members.size());
      const auto d = static_cast<int>(data.cols());
      double best = std::numeric_limits<double>::infinity();
      Eigen::RowVectorXd arg(d);
      std::vector<int> digits(static_cast<std::size_t>(d), 0);
      while (true) {
        Eigen::RowVectorXd cand(d);
        for (int j = 0; j < d; ++j) cand(j) = static_cast<double>(digits[static_cast<std::size_t>(j)]) / m;
        double cost = 0.0;
        for (auto i : members) cost += (data.row(i) - cand).squaredNorm();
        if (cost < best - 1e-12) {
          best = cost;
          arg = cand;
        }
        int j = 0;
        while (j < d && ++digits[static_cast<std::size_t>(j)] > m) digits[static_cast<std::size_t>(j++)] = 0;
        if (j == d) break;
      }
      if ((arg - means.row(c)).cwiseAbs().maxCoeff() > 1e-12) ++step_mismatches;
    }
  }
  const double rate = static_cast<double>(matches) / instances;
  detail = fmt::format("best-of-32 optimal in {}/{} ({:.1f}%, need 95%), {} step mismatches", matches, instances,
                       100.0 * rate, step_mismatches);
  return rate >= 0.95 && step_mismatches == 0;
}

// ---------------------------------------------------------------- criterion 9

bool hopkins_calibration(std::string& detail) {
  double total = 0.0;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::mt19937_64 rng(1000 + seed);
    Eigen::MatrixXd x(2000, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    total += hopkins(x, 200, seed).h;
  }
  const double mean = total / 20.0;

  Eigen::MatrixXd dup(500, 4);
  for (int i = 0; i < 500; ++i) dup.row(i) = Eigen::RowVector4d(i % 5, (i % 5) * (i % 5), 1.0, -(i % 5));
  const double h_dup = hopkins(dup, 50, 3).h;
  detail = fmt::format("uniform mean h = {:.4f} (need 0.5 +/- 0.1), duplicated rows h = {}", mean, h_dup);
  return std::abs(mean - 0.5) <= 0.1 && h_dup == 0.0;
}

// --------------------------------------------------------------- criterion 10

bool preference_overlap_determinism(std::string& detail) {
  std::mt19937_64 rng(10);
  int ratio_violations = 0, monotone_violations = 0, symmetry_violations = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::uniform_int_distribution<int> n_pick(10, 80), d_pick(2, 20), k_pick(2, 5);
    const int k = k_pick(rng);
    const auto data = random_binary(n_pick(rng), d_pick(rng), rng);
    Labels labels(data.rows());
    for (Eigen::Index i = 0; i < labels.size(); ++i) labels(i) = static_cast<int>(i % k);
    const auto pattern = preference_patterns(labels, BinaryRatingMatrix(data.cast<std::int8_t>()), k);
    if (pattern.cluster_sizes.sum() != data.rows()) ++ratio_violations;
    for (int c = 0; c < k; ++c) {
      for (Eigen::Index j = 0; j < pattern.n_items(); ++j) {
        const double v = pattern.values(c, j);
        const double scaled = v * pattern.cluster_sizes(c);
        if (v < 0.0 || v > 1.0 || std::abs(scaled - std::round(scaled)) > 1e-9 ||
            std::lround(scaled) != pattern.like_counts(c, j)) {
          ++ratio_violations;
        }
      }
    }

    const auto centroids = random_binary(k, data.cols(), rng);
    const auto metric = trial % 2 == 0 ? Metric::matching : Metric::squared_euclidean;
    const auto t0 = overlap_test(centroids, data, metric, 0.0);
    const auto t1 = overlap_test(centroids, data, metric, 1.0);
    const auto t2 = overlap_test(centroids, data, metric, 2.5);
    for (const auto* pair : {&t0, &t1}) {
      const auto& looser = pair == &t0 ? t1 : t2;
      for (const auto& [cp, count] : pair->pairs) {
        if (!looser.pairs.count(cp) || looser.pairs.at(cp) < count) ++monotone_violations;
      }
    }
    std::vector<int> perm(static_cast<std::size_t>(k));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXd permuted(k, data.cols());
    for (int c = 0; c < k; ++c) permuted.row(perm[static_cast<std::size_t>(c)]) = centroids.row(c);
    const auto relabeled = overlap_test(permuted, data, metric, 0.0);
    if (relabeled.pairs.size() != t0.pairs.size()) ++symmetry_violations;
    for (const auto& [cp, count] : t0.pairs) {
      const int a = perm[static_cast<std::size_t>(cp.first)], b = perm[static_cast<std::size_t>(cp.second)];
      const ClusterPair mapped{std::min(a, b), std::max(a, b)};
      if (!relabeled.pairs.count(mapped) || relabeled.pairs.at(mapped) != count) ++symmetry_violations;
    }
  }

  // pipeline determinism on the synthetic corpus
  const fs::path dir = fs::temp_directory_path() / "prefcluster_acceptance_c10";
  fs::remove_all(dir);
  fs::create_directories(dir);
  SyntheticSpec spec;
  spec.n_users = 3000;
  {
    std::ofstream out(dir / "ratings.csv");
    write_raw_ratings(out, make_synthetic_corpus(spec).ratings, false);
  }
  PipelineConfig config;
  config.input = dir / "ratings.csv";
  config.seed = 1234;
  int mismatched_runs = 0;
  std::string reference;
  for (int run = 0; run < 3; ++run) {
    config.output_dir = dir / fmt::format("run{}", run);
    const auto manifest = run_pipeline(config);
    const auto written = read_json_file(config.output_dir / artifacts::kManifest);
    const std::string numeric = written.at("stages").dump() + written.at("seeds").dump();
    if (run == 0) {
      reference = numeric;
    } else if (numeric != reference) {
      ++mismatched_runs;
    }
  }
  fs::remove_all(dir);
  detail = fmt::format("{} ratio, {} monotonicity, {} symmetry violations; {} of 2 reruns differ", ratio_violations,
                       monotone_violations, symmetry_violations, mismatched_runs);
  return ratio_violations == 0 && monotone_violations == 0 && symmetry_violations == 0 && mismatched_runs == 0;
}

int run_properties() {
  Report report;
  timed(report, 5, "binarization grid", binarization_grid);
  timed(report, 6, "tiny RBM exact oracle", tiny_rbm_oracle);
  timed(report, 7, "descent and termination", descent_and_termination);
  timed(report, 8, "oracle equivalence", oracle_equivalence);
  timed(report, 9, "Hopkins calibration", hopkins_calibration);
  timed(report, 10, "preference/overlap/determinism", preference_overlap_determinism);
  return report.failures() == 0 ? 0 : 1;
}

// ------------------------------------------------------------ criteria 1 - 4

long env_long(const char* name, long fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::strtol(v, nullptr, 10) : fallback;
}

int run_jester() {
  const char* path = std::getenv("PREFCLUSTER_JESTER_CSV");
  if (path == nullptr || !fs::exists(path)) {
    for (auto [id, name] : {std::pair{1, "RBM test MAE"}, std::pair{2, "Hopkins on D1"},
                            std::pair{3, "elbow at k = 3"}, std::pair{4, "overlap reduction"}}) {
      std::cout << fmt::format("[SKIP] C{:<2} {:<34} PREFCLUSTER_JESTER_CSV not set or missing\n", id, name);
    }
    return kSkipped;
  }
  const bool count_column = env_long("PREFCLUSTER_JESTER_COUNT_COLUMN", 1) != 0;
  const long subsample = env_long("PREFCLUSTER_JESTER_SUBSAMPLE", 0);

  const fs::path work = fs::temp_directory_path() / "prefcluster_acceptance_jester";
  fs::remove_all(work);
  fs::create_directories(work);
  fs::path input = path;
  if (subsample > 0) {
    // seeded user subsample, written with the same layout as the source
    auto raw = load_ratings(fs::path(path), count_column);
    if (subsample < raw.n_users()) {
      Rng rng(20240101);
      auto rows = sample_without_replacement(raw.n_users(), subsample, rng);
      std::sort(rows.begin(), rows.end());
      RawRatingMatrix sub;
      sub.values.resize(subsample, raw.n_jokes());
      for (long r = 0; r < subsample; ++r) sub.values.row(r) = raw.values.row(rows[static_cast<std::size_t>(r)]);
      raw = std::move(sub);
    }
    input = work / "subsample.csv";
    std::ofstream out(input);
    write_raw_ratings(out, raw, count_column);
  }

  Report report;
  const std::uint64_t master_seeds[] = {1, 2, 3, 4, 5};
  std::vector<double> maes, hs;
  std::vector<int> elbows;
  std::vector<std::pair<int, int>> overlap_counts;  // (kmodes pairs, kmeans pairs)
  std::string failure;
  const auto start = std::chrono::steady_clock::now();
  try {
    for (auto seed : master_seeds) {
      PipelineConfig config;
      config.input = input;
      config.has_count_column = count_column;
      config.hopkins_m = 500;
      config.seed = seed;
      config.output_dir = work / fmt::format("seed{}", seed);
      const auto manifest = run_pipeline(config);
      const auto& stages = manifest.results();
      maes.push_back(stages.at("train-rbm").at("test_mae").get<double>());
      hs.push_back(stages.at("hopkins").at("h").get<double>());
      elbows.push_back(stages.at("elbow").at("detected_k").get<int>());

      // k = 3 with both algorithms on the same D1/D2
      const Eigen::MatrixXd d1 = read_binary_matrix(config.output_dir / artifacts::kD1).as_real();
      const Eigen::MatrixXd d2 = read_binary_matrix(config.output_dir / artifacts::kD2).as_real();
      FitOptions options;
      options.k = 3;
      options.seed = derive_seed(seed, "cluster");
      options.init = Init::cao;
      const auto modes = kmodes_fit(d1, options);
      options.init = Init::random;
      const auto means = kmeans_fit(d1, options);
      const auto modes_pairs = overlap_test(modes.model.centroids, d2, Metric::matching).pairs.size();
      const auto means_pairs = overlap_test(means.model.centroids, d2, Metric::squared_euclidean).pairs.size();
      overlap_counts.emplace_back(static_cast<int>(modes_pairs), static_cast<int>(means_pairs));
      std::cout << fmt::format("  seed {}: mae {:.4f}, hopkins {:.6g}, elbow k {}, overlap pairs kmodes {} / kmeans {}\n",
                               seed, maes.back(), hs.back(), elbows.back(), modes_pairs, means_pairs)
                << std::flush;
    }
  } catch (const std::exception& e) {
    failure = e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!failure.empty()) {
    for (int id = 1; id <= 4; ++id) report.record(id, "jester pipeline", false, "exception: " + failure);
    return 1;
  }

  report.record(1, "RBM test MAE", maes.front() >= 0.12 && maes.front() <= 0.24,
                fmt::format("mae = {:.4f} (band [0.12, 0.24]); {} users; {:.0f}s for 5 seeds", maes.front(),
                            subsample > 0 ? std::to_string(subsample) : std::string("all"), secs));
  const bool hopkins_ok = std::all_of(hs.begin(), hs.end(), [](double h) { return h < 0.1; });
  report.record(2, "Hopkins on D1", hopkins_ok,
                fmt::format("max h over 5 seeds = {:.6g} (need < 0.1)", *std::max_element(hs.begin(), hs.end())));
  const auto threes = std::count(elbows.begin(), elbows.end(), 3);
  report.record(3, "elbow at k = 3", threes >= 4, fmt::format("detected k = 3 in {}/5 seeds", threes));
  const auto reduced = std::count_if(overlap_counts.begin(), overlap_counts.end(),
                                     [](const auto& p) { return p.first <= p.second; });
  report.record(4, "overlap reduction", reduced >= 4,
                fmt::format("kmodes pairs <= kmeans pairs in {}/5 seeds", reduced));
  fs::remove_all(work);
  return report.failures() == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::string suite = "properties";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--suite") suite = argv[i + 1];
  }
  if (suite == "properties") return run_properties();
  if (suite == "jester") return run_jester();
  std::cerr << "usage: acceptance --suite properties|jester\n";
  return 2;
}
