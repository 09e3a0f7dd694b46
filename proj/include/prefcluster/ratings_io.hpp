#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "prefcluster/types.hpp"

namespace prefcluster {

/// Parses delimited rating text, one user per row. The delimiter (comma or
/// tab) is detected per line. With `has_count_column`, the leading field is
/// the number of rated items; it is checked against the row and dropped.
///
/// Errors carry 1-based row/column positions: ParseError for malformed
/// numbers, RangeError for values outside [-10, 10] other than 99,
/// ShapeError for ragged or empty input.
RawRatingMatrix load_ratings(std::istream& source, bool has_count_column);
RawRatingMatrix load_ratings(const std::filesystem::path& path, bool has_count_column);

/// 1 for ratings in [7, 10], 0 for [-10, 7), -1 for the 99 sentinel.
std::int8_t binarize_rating(double rating);
BinaryRatingMatrix binarize(const RawRatingMatrix& raw);

struct UserSplit {
  std::vector<Eigen::Index> train_rows;
  std::vector<Eigen::Index> test_rows;
  std::uint64_t seed = 0;
};

/// Holds out round(test_fraction * n_users) whole users. Both index lists
/// are sorted ascending.
UserSplit split_users(const BinaryRatingMatrix& data, double test_fraction, std::uint64_t seed);

void write_binary_matrix(std::ostream& out, const BinaryRatingMatrix& matrix);
void write_binary_matrix(const std::filesystem::path& path, const BinaryRatingMatrix& matrix);
BinaryRatingMatrix read_binary_matrix(std::istream& in);
BinaryRatingMatrix read_binary_matrix(const std::filesystem::path& path);

}  // namespace prefcluster
