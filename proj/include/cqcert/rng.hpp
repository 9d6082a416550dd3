#pragma once

// Portable deterministic random streams. std::mt19937_64 is fully specified
// by the standard; the distributions below are written out by hand because
// the std:: distributions are not, and reports must be byte-identical across
// standard libraries.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace cqcert {

inline std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent consumers of one user seed.
enum class Stream : std::uint64_t {
  EqSampling = 1,
  AffProbes = 2,
  TangentSampling = 3,
  Testing = 4,
};

class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : engine_(splitmix64(seed ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}
  Rng(std::uint64_t seed, Stream stream) : Rng(seed, static_cast<std::uint64_t>(stream)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n); n > 0.
  std::size_t below(std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return static_cast<std::size_t>(v % bound);
  }

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cqcert
