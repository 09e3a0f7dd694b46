#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace prefcluster {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer; used to decorrelate related seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char c : text) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Per-stage seed: splitmix64(master ^ fnv1a64(stage)).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
  return splitmix64(master ^ fnv1a64(stage));
}

/// Seed for restart `index` of a fit seeded with `seed`.
constexpr std::uint64_t restart_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed + 0x632BE59BD9B4E019ULL * (index + 1));
}

/// `count` distinct indices from [0, n), in draw order.
inline std::vector<Eigen::Index> sample_without_replacement(Eigen::Index n, Eigen::Index count, Rng& rng) {
  std::vector<Eigen::Index> pool(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  // partial Fisher-Yates
  for (Eigen::Index i = 0; i < count; ++i) {
    std::uniform_int_distribution<Eigen::Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace prefcluster
