#ifndef DNE_SAMPLING_HPP
#define DNE_SAMPLING_HPP

#include "dne/types.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>

namespace dne::sampling {

/// Samples are generated in fixed-size chunks, each with its own engine
/// seeded from (seed, chunk index). Results do not depend on how chunks
/// are scheduled across threads.
inline constexpr std::size_t kChunkSize = 4096;

inline std::mt19937_64 chunk_engine(std::uint64_t seed, std::size_t chunk) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& engine, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(engine);
}

/// Random direction scaled by a log-uniform magnitude in [10^lo, 10^hi].
inline Vec random_vector(std::mt19937_64& engine, int dim, double log10_lo = -2.0,
                         double log10_hi = 2.0) {
  std::normal_distribution<double> normal;
  Vec v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v[i] = normal(engine);
    norm = v.norm();
  } while (norm == 0.0);
  const double magnitude = std::pow(10.0, uniform(engine, log10_lo, log10_hi));
  return v * (magnitude / norm);
}

/// Pair (xi, eta) mixing far-apart and nearly-equal draws.
inline std::pair<Vec, Vec> random_pair(std::mt19937_64& engine, int dim) {
  Vec xi = random_vector(engine, dim);
  const double mode = uniform(engine, 0.0, 1.0);
  Vec eta(dim);
  if (mode < 0.5) {
    eta = random_vector(engine, dim);
  } else if (mode < 0.8) {
    eta = xi + random_vector(engine, dim, -6.0, 0.0) * xi.norm();
  } else {
    eta = -xi * uniform(engine, 0.0, 2.0) + random_vector(engine, dim, -4.0, -1.0);
  }
  return {xi, eta};
}

} // namespace dne::sampling

#endif
