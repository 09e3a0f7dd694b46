#include "prefcluster/rbm.hpp"

#include <fmt/format.h>

#include "prefcluster/errors.hpp"

namespace prefcluster::rbm {

namespace {

void check_visible_width(const RbmParams& params, Eigen::Index width) {
  if (width != params.n_visible()) {
    throw ShapeError(fmt::format("visible vector has {} entries, model expects {}", width, params.n_visible()));
  }
}

Eigen::MatrixXd observed_values(const BinaryMatrix& data) {
  return (data.array() == kLike).cast<double>().matrix();
}

Eigen::MatrixXd observed_mask(const BinaryMatrix& data) {
  return (data.array() != kMissing).cast<double>().matrix();
}

}  // namespace

RbmParams init_rbm(Eigen::Index n_visible, Eigen::Index n_hidden, std::uint64_t seed) {
  if (n_visible < 1 || n_hidden < 1) {
    throw ShapeError(fmt::format("RBM dimensions must be positive, got {} visible x {} hidden", n_visible, n_hidden));
  }
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 0.01);
  RbmParams params;
  params.weights.resize(n_hidden, n_visible);
  for (Eigen::Index j = 0; j < n_hidden; ++j) {
    for (Eigen::Index i = 0; i < n_visible; ++i) params.weights(j, i) = gauss(rng);
  }
  params.visible_bias = Eigen::VectorXd::Zero(n_visible);
  params.hidden_bias = Eigen::VectorXd::Zero(n_hidden);
  return params;
}

Eigen::VectorXd hidden_probs(const RbmParams& params, const BinaryVector& v) {
  check_visible_width(params, v.size());
  const Eigen::VectorXd clamped = (v.array() == kLike).cast<double>().matrix();
  return sigmoid((params.hidden_bias + params.weights * clamped).array()).matrix();
}

Eigen::VectorXd visible_probs(const RbmParams& params, const Eigen::VectorXd& h) {
  if (h.size() != params.n_hidden()) {
    throw ShapeError(fmt::format("hidden vector has {} entries, model expects {}", h.size(), params.n_hidden()));
  }
  return sigmoid((params.visible_bias + params.weights.transpose() * h).array()).matrix();
}

Eigen::MatrixXd hidden_probs_batch(const RbmParams& params, const Eigen::MatrixXd& visible) {
  check_visible_width(params, visible.cols());
  Eigen::MatrixXd act = visible * params.weights.transpose();
  act.rowwise() += params.hidden_bias.transpose();
  return sigmoid(act.array()).matrix();
}

Eigen::MatrixXd visible_probs_batch(const RbmParams& params, const Eigen::MatrixXd& hidden) {
  if (hidden.cols() != params.n_hidden()) {
    throw ShapeError(fmt::format("hidden batch has {} columns, model expects {}", hidden.cols(), params.n_hidden()));
  }
  Eigen::MatrixXd act = hidden * params.weights;
  act.rowwise() += params.visible_bias.transpose();
  return sigmoid(act.array()).matrix();
}

Eigen::MatrixXd sample_bernoulli(const Eigen::MatrixXd& probs, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Eigen::MatrixXd out(probs.rows(), probs.cols());
  for (Eigen::Index r = 0; r < probs.rows(); ++r) {
    for (Eigen::Index c = 0; c < probs.cols(); ++c) out(r, c) = unit(rng) < probs(r, c) ? 1.0 : 0.0;
  }
  return out;
}

void apply_cd_update(RbmParams& params, const BinaryMatrix& batch, int k, double learning_rate, Rng& rng) {
  if (batch.rows() == 0) throw ShapeError("CD batch is empty");
  check_visible_width(params, batch.cols());
  if (k < 1) throw ConfigError(fmt::format("CD step count must be positive, got {}", k));

  const Eigen::MatrixXd mask = observed_mask(batch);
  const Eigen::MatrixXd v0 = observed_values(batch);
  const Eigen::MatrixXd ph0 = hidden_probs_batch(params, v0);

  Eigen::MatrixXd h = sample_bernoulli(ph0, rng);
  Eigen::MatrixXd v;
  Eigen::MatrixXd ph;
  for (int step = 1; step <= k; ++step) {
    v = sample_bernoulli(visible_probs_batch(params, h), rng).cwiseProduct(mask);
    ph = hidden_probs_batch(params, v);
    if (step < k) h = sample_bernoulli(ph, rng);
  }

  const double scale = learning_rate / static_cast<double>(batch.rows());
  RbmParams next = params;
  next.weights.noalias() += scale * (ph0.transpose() * v0 - ph.transpose() * v);
  next.visible_bias += scale * (v0 - v).colwise().sum().transpose();
  next.hidden_bias += scale * (ph0 - ph).colwise().sum().transpose();
  if (!next.all_finite()) {
    throw NumericError("contrastive divergence update produced a non-finite parameter");
  }
  params = std::move(next);
}

RbmParams cd_update(const RbmParams& params, const BinaryMatrix& batch, int k, double learning_rate, Rng& rng) {
  RbmParams next = params;
  apply_cd_update(next, batch, k, learning_rate, rng);
  return next;
}

TrainResult train(const TrainConfig& config, const BinaryRatingMatrix& train_data, const BatchObserver& observer) {
  const Eigen::Index n = train_data.n_users();
  if (n == 0 || train_data.n_jokes() == 0) throw ShapeError("training data is empty");
  if (config.n_hidden < 1 || config.cd_k < 1 || config.epochs < 1 || config.batch_size < 1 ||
      !(config.learning_rate > 0.0)) {
    throw ConfigError("RBM hyperparameters must all be positive");
  }
  if (config.batch_size > n) {
    throw ConfigError(fmt::format("batch size {} exceeds {} training users", config.batch_size, n));
  }

  TrainResult result{init_rbm(train_data.n_jokes(), config.n_hidden, config.seed), {}};
  Rng rng(restart_seed(config.seed, 0));
  const auto& values = train_data.values();
  BinaryMatrix batch;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    const auto order = sample_without_replacement(n, n, rng);
    int batch_index = 0;
    for (Eigen::Index start = 0; start < n; start += config.batch_size, ++batch_index) {
      const Eigen::Index size = std::min<Eigen::Index>(config.batch_size, n - start);
      batch.resize(size, values.cols());
      for (Eigen::Index r = 0; r < size; ++r) batch.row(r) = values.row(order[static_cast<std::size_t>(start + r)]);
      apply_cd_update(result.params, batch, config.cd_k, config.learning_rate, rng);
      if (observer) observer(epoch, batch_index);
    }
    result.history.reconstruction_error.push_back(reconstruction_error(result.params, train_data));
  }
  return result;
}

Prediction predict(const RbmParams& params, const BinaryVector& v) {
  Prediction out;
  out.probs = visible_probs(params, hidden_probs(params, v));
  out.binary = (out.probs.array() >= 0.5).cast<std::int8_t>().matrix();
  return out;
}

Eigen::MatrixXd predict_probs(const RbmParams& params, const BinaryMatrix& data) {
  return visible_probs_batch(params, hidden_probs_batch(params, observed_values(data)));
}

double evaluate_mae(const RbmParams& params, const BinaryRatingMatrix& test_data) {
  const auto observed = test_data.observed_count();
  if (observed == 0) throw EvaluationError("test data has no observed ratings");
  const auto& truth = test_data.values();
  const BinaryMatrix predicted = (predict_probs(params, truth).array() >= 0.5).cast<std::int8_t>().matrix();
  const auto wrong = ((truth.array() != kMissing) && (predicted.array() != truth.array())).count();
  return static_cast<double>(wrong) / static_cast<double>(observed);
}

double reconstruction_error(const RbmParams& params, const BinaryRatingMatrix& data) {
  const auto observed = data.observed_count();
  if (observed == 0) throw EvaluationError("data has no observed ratings");
  const auto& values = data.values();
  const Eigen::MatrixXd residual =
      (predict_probs(params, values) - observed_values(values)).cwiseAbs().cwiseProduct(observed_mask(values));
  return residual.sum() / static_cast<double>(observed);
}

ImputedDatasets build_d1_d2(const RbmParams& params, const BinaryRatingMatrix& full_data) {
  const auto& source = full_data.values();
  check_visible_width(params, source.cols());
  BinaryMatrix d1 = (predict_probs(params, source).array() >= 0.5).cast<std::int8_t>().matrix();
  BinaryMatrix d2 = (source.array() == kMissing).select(d1, source);
  return {BinaryRatingMatrix(std::move(d1)), BinaryRatingMatrix(std::move(d2))};
}

}  // namespace prefcluster::rbm
