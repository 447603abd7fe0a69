#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>
#include <initializer_list>
#include <random>

namespace gridscale::util {

/// SplitMix64 finalizer. Used to derive independent stream seeds from ids.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Combine a master seed with any number of stream labels.
inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  std::uint64_t h = mix64(seed);
  for (auto l : labels) h = mix64(h ^ mix64(l));
  return h;
}

/// Uniform double in [0, 1) from a 64-bit hash.
inline double unit_interval(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t seed, std::initializer_list<std::uint64_t> labels) {
  return Rng(derive_seed(seed, labels));
}

/// Uniform double in [0, 1).
inline double uniform(Rng& rng) { return unit_interval(rng()); }

/// Box-Muller draw; spelled out so streams do not depend on the standard
/// library's distribution implementations.
inline double standard_normal(Rng& rng) {
  double u1 = 1.0 - uniform(rng);
  double u2 = uniform(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

/// Index in [0, n). The modulo bias is below 2^-40 for n < 2^24.
inline std::size_t below(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }

/// Fisher-Yates with `below`.
template <class T>
void shuffle(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) std::swap(items[i - 1], items[below(rng, i)]);
}

}  // namespace gridscale::util
