#include "prefcluster/synthetic.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include <fmt/format.h>

#include "prefcluster/errors.hpp"
#include "prefcluster/random.hpp"

namespace prefcluster {

SyntheticCorpus make_synthetic_corpus(const SyntheticSpec& spec) {
  if (spec.n_users < 1 || spec.n_items < 1 || spec.n_archetypes < 1) {
    throw ConfigError("synthetic corpus dimensions must be positive");
  }
  if (!(spec.missing_fraction >= 0.0 && spec.missing_fraction < 1.0) ||
      !(spec.flip_probability >= 0.0 && spec.flip_probability <= 1.0)) {
    throw ConfigError("synthetic corpus probabilities out of range");
  }
  Rng rng(spec.seed);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution flip(spec.flip_probability);
  std::bernoulli_distribution missing(spec.missing_fraction);
  std::uniform_int_distribution<int> archetype(0, spec.n_archetypes - 1);
  // integer hundredths keep the 2-decimal values exact in text
  std::uniform_int_distribution<int> like_cents(700, 1000);
  std::uniform_int_distribution<int> dislike_cents(-1000, 699);

  SyntheticCorpus corpus;
  corpus.archetypes.resize(spec.n_archetypes, spec.n_items);
  for (int a = 0; a < spec.n_archetypes; ++a) {
    for (Eigen::Index j = 0; j < spec.n_items; ++j) corpus.archetypes(a, j) = coin(rng) ? 1 : 0;
  }
  corpus.membership.resize(spec.n_users);
  corpus.ratings.values.resize(spec.n_users, spec.n_items);
  for (Eigen::Index i = 0; i < spec.n_users; ++i) {
    const int a = archetype(rng);
    corpus.membership(i) = a;
    for (Eigen::Index j = 0; j < spec.n_items; ++j) {
      const bool like = (corpus.archetypes(a, j) == 1) != flip(rng);
      const int cents = like ? like_cents(rng) : dislike_cents(rng);
      corpus.ratings.values(i, j) = missing(rng) ? RawRatingMatrix::kMissingSentinel : cents / 100.0;
    }
  }
  return corpus;
}

void write_raw_ratings(std::ostream& out, const RawRatingMatrix& ratings, bool with_count_column) {
  for (Eigen::Index i = 0; i < ratings.n_users(); ++i) {
    std::string line;
    if (with_count_column) {
      line = std::to_string((ratings.values.row(i).array() != RawRatingMatrix::kMissingSentinel).count());
    }
    for (Eigen::Index j = 0; j < ratings.n_jokes(); ++j) {
      if (!line.empty() || j > 0) line += ',';
      const double v = ratings.values(i, j);
      line += v == RawRatingMatrix::kMissingSentinel ? std::string("99") : fmt::format("{:.2f}", v);
    }
    out << line << '\n';
  }
}

}  // namespace prefcluster
