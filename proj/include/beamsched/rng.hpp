#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace beamsched {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a parent seed and a path of
/// integer labels (replication, target, ...).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::initializer_list<std::uint64_t> path) {
  std::uint64_t s = mix64(parent);
  for (auto label : path) s = mix64(s ^ mix64(label + 0x632be59bd9b4e019ULL));
  return s;
}

// Stream labels beyond the target range.
inline constexpr std::uint64_t kTieBreakStream = 0xB1EA4ULL << 32;

/// Owned by one episode; never shared between threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) from the top 53 bits; independent of the standard
  /// library's distribution implementations.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (lo, hi).
  double uniform_open(double lo, double hi) {
    double u;
    do {
      u = uniform01();
    } while (u == 0.0);
    return lo + (hi - lo) * u;
  }

  /// Uniform integer in [0, n), n >= 1, by rejection.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~0ULL - (~0ULL % n);
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace beamsched
