#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

namespace nmdim {

/// Seeded random stream. All randomness in the project flows through this
/// class so that a fixed seed reproduces results bit-for-bit on any platform:
/// the raw generator (mt19937_64) is fully specified by the standard, and the
/// real-valued transforms below are hand-rolled rather than delegated to the
/// implementation-defined <random> distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

  /// Uniform integer in [0, n). Rejection sampling, unbiased.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  /// Standard complex Gaussian, convention (x + iy)/sqrt(2) with x, y
  /// standard normal (unit second moment E|z|^2 = 1).
  std::complex<double> complex_gaussian() {
    const double x = gaussian();
    const double y = gaussian();
    return {x * M_SQRT1_2, y * M_SQRT1_2};
  }

  /// splitmix64 finalizer; used to derive independent child seeds.
  static std::uint64_t split(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  /// Combine a seed with one more component of a derivation path.
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t component) {
    return split(seed ^ split(component));
  }

 private:
  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace nmdim
