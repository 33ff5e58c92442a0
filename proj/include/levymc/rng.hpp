#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace levymc {

// SplitMix64 finalizer (Steele/Lea/Flood 2014, Vigna 2015). Full avalanche,
// used both as the per-stream generator and as the address hash.
inline constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

// Leaf generator of a stream: SplitMix64 sequence plus the variate kernels
// the simulation needs. Mutable; one sequence per (stream address, role).
class RngSequence {
 public:
  explicit RngSequence(std::uint64_t state) : s_(state) {}

  std::uint64_t next_u64() {
    s_ += kGolden;
    return mix64(s_);
  }

  // [0, 1)
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // (0, 1], safe under log()
  double uniform_open01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform_open01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double t = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(t);
    have_spare_ = true;
    return r * std::cos(t);
  }

  // Poisson(lambda): product-of-uniforms inversion for small rates,
  // transformed rejection (Hormann's PTRD) for lambda >= 10.
  std::int64_t poisson(double lambda) {
    if (lambda <= 0.0) return 0;
    if (lambda < 10.0) {
      const double expneg = std::exp(-lambda);
      std::int64_t k = 0;
      double prod = uniform01();
      while (prod > expneg) {
        ++k;
        prod *= uniform01();
      }
      return k;
    }
    const double b = 0.931 + 2.53 * std::sqrt(lambda);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    const double log_lambda = std::log(lambda);
    while (true) {
      double u = uniform01() - 0.5;
      double v = uniform01();
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<std::int64_t>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      if (std::log(v * inv_alpha / (a / (us * us) + b)) <=
          kf * log_lambda - lambda - std::lgamma(kf + 1.0)) {
        return static_cast<std::int64_t>(kf);
      }
    }
  }

 private:
  std::uint64_t s_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Hierarchical stream address. A stream is identified by (seed, path), the
// path being the chain of child indices taken from the root; the address is
// folded into a single 64-bit state with an avalanche hash. Streams with
// distinct addresses are statistically independent, and the same address
// always reproduces the same sequence, independent of thread scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : state_(mix64(seed + kGolden)) {}

  RngStream child(std::uint64_t index) const {
    RngStream s(*this);
    s.state_ = mix64(state_ ^ (kGolden * (index + 1)));
    return s;
  }

  RngSequence sequence() const { return RngSequence(mix64(state_ ^ 0xA5A5A5A55A5A5A5AULL)); }

  std::uint64_t state() const { return state_; }

 private:
  std::uint64_t state_;
};

inline RngStream split_stream(const RngStream& s, std::uint64_t index) {
  return s.child(index);
}

}  // namespace levymc
