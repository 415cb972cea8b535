#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace fxga {

// std::mt19937_64 output is fixed by the standard, but the std distributions
// are not; these helpers keep seeded runs identical across standard libraries.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Independent stream seed for (master, a, b).
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD1B54A32D192ED03ull));
}

inline Rng make_rng(std::uint64_t master, std::uint64_t a = 0, std::uint64_t b = 0) {
  return Rng(derive_seed(master, a, b));
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [lo, hi], unbiased by rejection.
inline std::int64_t uniform_int(Rng& rng, std::int64_t lo, std::int64_t hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  if (span == 0) return static_cast<std::int64_t>(rng());
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return lo + static_cast<std::int64_t>(x % span);
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

/// Standard normal via Box-Muller (one draw per call).
inline double normal(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fxga
