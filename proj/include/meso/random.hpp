#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace meso {

using Rng = std::mt19937_64;

/// Independent generator for the stream identified by `(seed, path...)`,
/// e.g. `(seed, chain_index)` or `(seed, grid_index, replicate)`.
inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> path = {}) {
  std::vector<std::uint32_t> words;
  words.reserve(2 + 2 * path.size());
  const auto push = [&](std::uint64_t v) {
    words.push_back(static_cast<std::uint32_t>(v));
    words.push_back(static_cast<std::uint32_t>(v >> 32));
  };
  push(seed);
  for (auto v : path) push(v);
  std::seed_seq seq(words.begin(), words.end());
  return Rng(seq);
}

inline double sample_uniform(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

inline double sample_beta(Rng& rng, double a, double b) {
  const double x = std::gamma_distribution<double>(a, 1.0)(rng);
  const double y = std::gamma_distribution<double>(b, 1.0)(rng);
  const double s = x + y;
  if (s <= 0.0) return a >= b ? 1.0 : 0.0;  // both gammas underflowed
  return x / s;
}

}  // namespace meso
