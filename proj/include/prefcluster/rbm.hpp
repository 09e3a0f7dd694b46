#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "prefcluster/random.hpp"
#include "prefcluster/types.hpp"

namespace prefcluster::rbm {

/// Bernoulli-Bernoulli RBM. `weights` is n_hidden x n_visible.
struct RbmParams {
  Eigen::MatrixXd weights;
  Eigen::VectorXd visible_bias;
  Eigen::VectorXd hidden_bias;

  Eigen::Index n_visible() const { return weights.cols(); }
  Eigen::Index n_hidden() const { return weights.rows(); }
  bool all_finite() const {
    return weights.allFinite() && visible_bias.allFinite() && hidden_bias.allFinite();
  }
};

struct TrainConfig {
  int n_hidden = 100;
  int cd_k = 10;
  double learning_rate = 0.05;
  int epochs = 10;
  int batch_size = 100;
  std::uint64_t seed = 0;
};

struct TrainHistory {
  /// Mean |reconstruction - data| over observed entries, one per epoch.
  std::vector<double> reconstruction_error;
};

struct Prediction {
  Eigen::VectorXd probs;
  BinaryVector binary;
};

struct ImputedDatasets {
  BinaryRatingMatrix d1;  ///< every cell model-generated
  BinaryRatingMatrix d2;  ///< observed cells kept, missing cells imputed
};

template <typename Derived>
auto sigmoid(const Eigen::ArrayBase<Derived>& x) {
  return (1.0 + (-x).exp()).inverse();
}

/// W ~ N(0, 0.01^2), biases zero.
RbmParams init_rbm(Eigen::Index n_visible, Eigen::Index n_hidden, std::uint64_t seed);

/// p(h_j = 1 | v) with missing (-1) visible units contributing nothing.
Eigen::VectorXd hidden_probs(const RbmParams& params, const BinaryVector& v);
/// p(v_i = 1 | h); `h` may be real-valued (mean-field activations).
Eigen::VectorXd visible_probs(const RbmParams& params, const Eigen::VectorXd& h);

/// Row-batched conditionals. `visible` must already have missing units zeroed.
Eigen::MatrixXd hidden_probs_batch(const RbmParams& params, const Eigen::MatrixXd& visible);
Eigen::MatrixXd visible_probs_batch(const RbmParams& params, const Eigen::MatrixXd& hidden);

/// Draws 0/1 with P(1) = probs(i). Consumes exactly probs.size() uniforms, row-major.
Eigen::MatrixXd sample_bernoulli(const Eigen::MatrixXd& probs, Rng& rng);

/// One CD-k step over `batch` (rows are visible vectors over {1,0,-1}).
/// Missing units stay clamped off through the Gibbs chain and are excluded
/// from both the positive and the negative statistics.
RbmParams cd_update(const RbmParams& params, const BinaryMatrix& batch, int k, double learning_rate, Rng& rng);

/// In-place variant used by `train`.
void apply_cd_update(RbmParams& params, const BinaryMatrix& batch, int k, double learning_rate, Rng& rng);

/// Called after every mini-batch with (epoch, batch index).
using BatchObserver = std::function<void(int, int)>;

struct TrainResult {
  RbmParams params;
  TrainHistory history;
};

/// Initializes with init_rbm(n_jokes, n_hidden, seed), then for each epoch
/// shuffles users and applies cd_update per mini-batch. Training RNG is
/// seeded with restart_seed(seed, 0).
TrainResult train(const TrainConfig& config, const BinaryRatingMatrix& train_data,
                  const BatchObserver& observer = {});

/// Deterministic mean-field pass; binary_i = 1 iff probs_i >= 0.5.
Prediction predict(const RbmParams& params, const BinaryVector& v);
/// Mean-field visible probabilities for every row.
Eigen::MatrixXd predict_probs(const RbmParams& params, const BinaryMatrix& data);

/// Mean |binary prediction - truth| over observed cells.
double evaluate_mae(const RbmParams& params, const BinaryRatingMatrix& test_data);

/// Mean |mean-field probability - truth| over observed cells.
double reconstruction_error(const RbmParams& params, const BinaryRatingMatrix& data);

ImputedDatasets build_d1_d2(const RbmParams& params, const BinaryRatingMatrix& full_data);

}  // namespace prefcluster::rbm
