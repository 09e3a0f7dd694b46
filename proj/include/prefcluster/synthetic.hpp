#pragma once

#include <cstdint>
#include <iosfwd>

#include "prefcluster/types.hpp"

namespace prefcluster {

/// Users drawn from a few planted like/dislike archetypes.
struct SyntheticSpec {
  Eigen::Index n_users = 600;
  Eigen::Index n_items = 100;
  int n_archetypes = 3;
  double missing_fraction = 0.3;
  /// Chance that a user's rating disagrees with their archetype.
  double flip_probability = 0.05;
  std::uint64_t seed = 7;
};

struct SyntheticCorpus {
  RawRatingMatrix ratings;
  Eigen::MatrixXi archetypes;  ///< n_archetypes x n_items over {0, 1}
  Labels membership;           ///< archetype index per user
};

/// Likes are drawn uniformly from [7, 10], dislikes from [-10, 7), both
/// rounded to 2 decimals; missing cells hold the 99 sentinel. Archetypes
/// are i.i.d. fair coin flips per item.
SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec);

/// Comma-separated, 2 decimals, optionally with the leading rated-count column.
void write_raw_ratings(std::ostream& out, const RawRatingMatrix& ratings, bool with_count_column);

}  // namespace prefcluster
