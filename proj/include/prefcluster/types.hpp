#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace prefcluster {

template <typename Scalar>
using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Entries are 1 (like), 0 (dislike) or -1 (missing).
using BinaryMatrix = RowMatrix<std::int8_t>;
using BinaryVector = Eigen::Matrix<std::int8_t, Eigen::Dynamic, 1>;
using Labels = Eigen::VectorXi;

inline constexpr std::int8_t kLike = 1;
inline constexpr std::int8_t kDislike = 0;
inline constexpr std::int8_t kMissing = -1;

/// Raw user x item ratings in [-10, 10], with 99 marking a missing rating.
struct RawRatingMatrix {
  static constexpr double kMissingSentinel = 99.0;
  static constexpr double kMinRating = -10.0;
  static constexpr double kMaxRating = 10.0;

  RowMatrix<double> values;

  Eigen::Index n_users() const { return values.rows(); }
  Eigen::Index n_jokes() const { return values.cols(); }
};

/// User x item matrix over {1, 0, -1}. The constructor validates the alphabet.
class BinaryRatingMatrix {
public:
  BinaryRatingMatrix() = default;
  explicit BinaryRatingMatrix(BinaryMatrix values);

  const BinaryMatrix& values() const { return values_; }
  Eigen::Index n_users() const { return values_.rows(); }
  Eigen::Index n_jokes() const { return values_.cols(); }
  std::int8_t operator()(Eigen::Index user, Eigen::Index joke) const { return values_(user, joke); }

  bool has_missing() const { return (values_.array() == kMissing).any(); }
  Eigen::Index observed_count() const { return (values_.array() != kMissing).count(); }

  /// 0/1 entries as doubles; throws InputError if any entry is missing.
  Eigen::MatrixXd as_real() const;

  BinaryRatingMatrix rows(const std::vector<Eigen::Index>& indices) const;

  friend bool operator==(const BinaryRatingMatrix& a, const BinaryRatingMatrix& b) {
    return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols() &&
           a.values_ == b.values_;
  }

private:
  BinaryMatrix values_;
};

}  // namespace prefcluster
