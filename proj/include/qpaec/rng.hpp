#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qpaec {

/// splitmix64 mixing; derives independent streams from (master seed, index).
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Box-Muller on explicit uniforms; identical output on every platform for a
/// given engine state, unlike std::normal_distribution.
inline double gaussian(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u1 = unif(rng);
  while (u1 <= 1e-300) u1 = unif(rng);
  double u2 = unif(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

}  // namespace qpaec
