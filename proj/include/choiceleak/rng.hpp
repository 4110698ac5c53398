#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace choiceleak {

// All randomness flows through mt19937_64 plus the hand-rolled draws below.
// The standard pins the engine's output sequence bit-for-bit, and these
// transforms avoid std::uniform_*_distribution, whose results vary across
// standard libraries. Same seed => same stream on every platform.

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a base seed and a stream tag
/// (splitmix64 finalizer).
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1), 53-bit resolution.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

/// Unbiased uniform integer in [0, n). Rejection sampling on the top chunk.
inline std::uint64_t bounded(Rng& g, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("bounded: n must be positive");
  const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
  for (;;) {
    const std::uint64_t r = g();
    if (r >= threshold) return r % n;
  }
}

/// Standard normal via Box-Muller (cosine branch). Two engine draws per
/// variate, no cached state.
inline double standard_normal(Rng& g) {
  const double u1 = static_cast<double>((g() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform01(g);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

/// In-place Fisher-Yates shuffle.
template <typename T>
void shuffle_in_place(std::vector<T>& v, Rng& g) {
  const std::size_t n = v.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(bounded(g, n - i));
    std::swap(v[i], v[j]);
  }
}

}  // namespace choiceleak
