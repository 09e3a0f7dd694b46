#include "prefcluster/ratings_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include <fmt/format.h>

#include "prefcluster/errors.hpp"
#include "prefcluster/random.hpp"

namespace prefcluster {

BinaryRatingMatrix::BinaryRatingMatrix(BinaryMatrix values) : values_(std::move(values)) {
  const auto bad = (values_.array() != kLike && values_.array() != kDislike && values_.array() != kMissing);
  if (bad.any()) {
    throw InputError("binary rating matrix entries must be 1, 0 or -1");
  }
}

Eigen::MatrixXd BinaryRatingMatrix::as_real() const {
  if (has_missing()) {
    throw InputError("matrix contains the missing marker -1");
  }
  return values_.cast<double>();
}

BinaryRatingMatrix BinaryRatingMatrix::rows(const std::vector<Eigen::Index>& indices) const {
  BinaryMatrix out(static_cast<Eigen::Index>(indices.size()), values_.cols());
  for (std::size_t r = 0; r < indices.size(); ++r) {
    out.row(static_cast<Eigen::Index>(r)) = values_.row(indices[r]);
  }
  return BinaryRatingMatrix(std::move(out));
}

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  const char delim = line.find(',') != std::string_view::npos ? ',' : '\t';
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delim, start);
    fields.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

double parse_number(std::string_view field, std::size_t row, std::size_t col) {
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() || !std::isfinite(value)) {
    throw ParseError(fmt::format("row {}, column {}: malformed number '{}'", row, col, field));
  }
  return value;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

}  // namespace

RawRatingMatrix load_ratings(std::istream& source, bool has_count_column) {
  std::vector<double> values;
  Eigen::Index n_jokes = -1;
  std::size_t row = 0;
  std::string line;
  while (std::getline(source, line)) {
    if (is_blank(line)) continue;
    ++row;
    auto fields = split_fields(line);
    const std::size_t offset = has_count_column ? 1 : 0;
    if (fields.size() <= offset) {
      throw ShapeError(fmt::format("row {}: no rating fields", row));
    }
    const auto width = static_cast<Eigen::Index>(fields.size() - offset);
    if (n_jokes < 0) {
      n_jokes = width;
    } else if (width != n_jokes) {
      throw ShapeError(fmt::format("row {}: expected {} ratings, found {}", row, n_jokes, width));
    }
    std::size_t observed = 0;
    for (std::size_t c = offset; c < fields.size(); ++c) {
      const double v = parse_number(fields[c], row, c + 1);
      if (v != RawRatingMatrix::kMissingSentinel) {
        if (v < RawRatingMatrix::kMinRating || v > RawRatingMatrix::kMaxRating) {
          throw RangeError(fmt::format("row {}, column {}: rating {} outside [-10, 10] and not 99", row, c + 1,
                                       fields[c]));
        }
        ++observed;
      }
      values.push_back(v);
    }
    if (has_count_column) {
      const double count = parse_number(fields[0], row, 1);
      if (count != static_cast<double>(observed)) {
        throw ShapeError(fmt::format("row {}: count column says {} but {} ratings are present", row, fields[0],
                                     observed));
      }
    }
  }
  if (row == 0) {
    throw ShapeError("rating input contains no rows");
  }
  RawRatingMatrix raw;
  raw.values = Eigen::Map<const RowMatrix<double>>(values.data(), static_cast<Eigen::Index>(row), n_jokes);
  return raw;
}

RawRatingMatrix load_ratings(const std::filesystem::path& path, bool has_count_column) {
  std::ifstream in(path);
  if (!in) {
    throw IoError(fmt::format("cannot open rating file '{}'", path.string()));
  }
  return load_ratings(in, has_count_column);
}

std::int8_t binarize_rating(double rating) {
  if (rating == RawRatingMatrix::kMissingSentinel) return kMissing;
  if (rating < RawRatingMatrix::kMinRating || rating > RawRatingMatrix::kMaxRating) {
    throw RangeError(fmt::format("rating {} outside [-10, 10] and not 99", rating));
  }
  return rating >= 7.0 ? kLike : kDislike;
}

BinaryRatingMatrix binarize(const RawRatingMatrix& raw) {
  if (raw.n_users() < 1 || raw.n_jokes() < 1) {
    throw ShapeError("raw rating matrix must be at least 1x1");
  }
  return BinaryRatingMatrix(raw.values.unaryExpr([](double v) { return binarize_rating(v); }));
}

UserSplit split_users(const BinaryRatingMatrix& data, double test_fraction, std::uint64_t seed) {
  const Eigen::Index n = data.n_users();
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ConfigError(fmt::format("test fraction {} must lie in (0, 1)", test_fraction));
  }
  const auto n_test = static_cast<Eigen::Index>(std::llround(test_fraction * static_cast<double>(n)));
  if (n_test <= 0 || n_test >= n) {
    throw ConfigError(fmt::format("test fraction {} over {} users leaves an empty train or test set", test_fraction, n));
  }
  Rng rng(seed);
  auto order = sample_without_replacement(n, n, rng);
  UserSplit split;
  split.seed = seed;
  split.test_rows.assign(order.begin(), order.begin() + n_test);
  split.train_rows.assign(order.begin() + n_test, order.end());
  std::sort(split.test_rows.begin(), split.test_rows.end());
  std::sort(split.train_rows.begin(), split.train_rows.end());
  return split;
}

void write_binary_matrix(std::ostream& out, const BinaryRatingMatrix& matrix) {
  const auto& v = matrix.values();
  std::string line;
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    line.clear();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
      if (j > 0) line += ',';
      line += std::to_string(static_cast<int>(v(i, j)));
    }
    line += '\n';
    out << line;
  }
}

void write_binary_matrix(const std::filesystem::path& path, const BinaryRatingMatrix& matrix) {
  std::ofstream out(path);
  if (!out) throw IoError(fmt::format("cannot write '{}'", path.string()));
  write_binary_matrix(out, matrix);
  if (!out) throw IoError(fmt::format("write failed for '{}'", path.string()));
}

BinaryRatingMatrix read_binary_matrix(std::istream& in) {
  std::vector<std::int8_t> values;
  Eigen::Index cols = -1;
  Eigen::Index rows = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    ++rows;
    const auto fields = split_fields(line);
    if (cols < 0) {
      cols = static_cast<Eigen::Index>(fields.size());
    } else if (static_cast<Eigen::Index>(fields.size()) != cols) {
      throw ShapeError(fmt::format("row {}: expected {} fields, found {}", rows, cols, fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      int v = 0;
      const auto f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || v < -1 || v > 1) {
        throw ParseError(fmt::format("row {}, column {}: expected 1, 0 or -1, found '{}'", rows, c + 1, f));
      }
      values.push_back(static_cast<std::int8_t>(v));
    }
  }
  if (rows == 0) throw ShapeError("binary matrix input contains no rows");
  return BinaryRatingMatrix(Eigen::Map<const BinaryMatrix>(values.data(), rows, cols));
}

BinaryRatingMatrix read_binary_matrix(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(fmt::format("cannot open matrix file '{}'", path.string()));
  return read_binary_matrix(in);
}

}  // namespace prefcluster
