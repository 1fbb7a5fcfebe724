#pragma once

#include <cstdint>
#include <random>

#include "dam/types.hpp"

namespace dam {

using Rng = std::mt19937_64;

// SplitMix64 finalizer. Used to derive statistically independent child seeds
// (per realization, per noise stream) from one user seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(seed ^ mix_seed(stream + 0x632be59bd9b4e019ULL));
}

/// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
inline cplx complex_gaussian(Rng& rng, double variance) {
  std::normal_distribution<double> n(0.0, std::sqrt(variance / 2.0));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

inline double uniform_phase(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
  return u(rng);
}

}  // namespace dam
