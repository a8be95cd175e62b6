#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace nirmal {

// std::mt19937_64 produces a bit-exact sequence on every platform; the
// distribution transforms below replace std::*_distribution, whose output is
// implementation-defined, so seeded trajectories reproduce everywhere.
using RngEngine = std::mt19937_64;

// splitmix64 finalizer over (seed, stream) so one run seed can feed several
// decorrelated streams (init, shuffling, knight noise, ...).
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// uniform in [0, 1), 53 random bits
inline double uniform01(RngEngine& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// uniform in (0, 1]; keeps log() in the normal transform finite
inline double uniform01_open(RngEngine& rng) { return 1.0 - uniform01(rng); }

// Box-Muller, cosine branch only. Two uniforms per normal, no cached state,
// so copying an engine copies the whole draw sequence.
inline double standard_normal(RngEngine& rng) {
  const double u1 = uniform01_open(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

// Fisher-Yates helper: uniform integer in [0, n) by rejection, unbiased and
// portable (std::uniform_int_distribution is implementation-defined).
inline std::uint64_t uniform_below(RngEngine& rng, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % n;
}

}  // namespace nirmal
