#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "uqeval/error.hpp"

namespace uqeval {

// Every randomized path in the library (bootstrap resampling, calibration
// splits, synthetic generation, corruption noise) draws from this wrapper
// around std::mt19937_64. The raw engine is bit-portable; the standard
// *distributions* are not, so the uniform/normal/gamma transforms are coded
// here explicitly. Identical seeds give identical streams on any platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53-bit resolution.
  double next_double() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  // Unbiased integer in [0, n), n > 0, by rejection.
  std::uint64_t next_below(std::uint64_t n) {
    const std::uint64_t threshold = (0 - n) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = gen_();
      if (x >= threshold) return x % n;
    }
  }

  // Standard normal via Box-Muller; the second draw of each pair is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    while (u1 <= 0.0) u1 = next_double();
    const double u2 = next_double();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * kPi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  // Marsaglia-Tsang squeeze for Gamma(shape, 1).
  double next_gamma(double shape) {
    if (!(shape > 0.0)) throw ValidationError("gamma shape must be > 0");
    if (shape < 1.0) {
      // Boost to shape+1 and scale back down.
      const double u = next_nonzero_double();
      return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x = next_normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = next_nonzero_double();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double next_beta(double a, double b) {
    const double x = next_gamma(a);
    const double y = next_gamma(b);
    const double s = x + y;
    return s > 0.0 ? x / s : 0.5;
  }

  bool next_bernoulli(double p) { return next_double() < p; }

  // splitmix64 step; derives independent per-replicate or per-image streams
  // from one base seed.
  static std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  double next_nonzero_double() {
    double u = next_double();
    while (u <= 0.0) u = next_double();
    return u;
  }

  std::mt19937_64 gen_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Fisher-Yates with the portable engine; std::shuffle is unspecified.
inline void shuffle_indices(std::span<std::size_t> indices, Rng& rng) {
  for (std::size_t i = indices.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
    std::swap(indices[i - 1], indices[j]);
  }
}

}  // namespace uqeval
