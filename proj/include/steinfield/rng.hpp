#pragma once

#include <array>
#include <cmath>
#include <cstdint>

// =============================================================================
// Deterministic random number generation.
//
// Engine: xoshiro256++ seeded through SplitMix64. Uniforms take the high
// 53 bits; normals use the Box–Muller transform (pair cached); gamma uses
// Marsaglia–Tsang; Student t is normal over sqrt(chi-square/df). All
// transforms are fixed here rather than taken from <random>, whose
// distributions are implementation-defined — reproducibility across
// standard libraries requires owning the whole pipeline. The scheme is
// recorded in experiment metadata.
//
// Stream splitting: derive_seed hashes (master, a, b, c) through a
// SplitMix64 chain, so replicates/sweep points get independent streams
// that do not depend on evaluation order.
// =============================================================================

namespace steinfield {

struct SplitMix64 {
  std::uint64_t state;

  std::uint64_t next() noexcept {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
};

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a = 0,
                                 std::uint64_t b = 0, std::uint64_t c = 0) noexcept {
  SplitMix64 sm{master};
  sm.state ^= sm.next() + a;
  sm.state ^= sm.next() + b;
  sm.state ^= sm.next() + c;
  return sm.next();
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    SplitMix64 sm{seed};
    for (auto& w : s_) w = sm.next();
  }

  std::uint64_t seed() const noexcept { return seed_; }

  // Independent stream derived from this stream's seed (not its position).
  Rng derive(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const noexcept {
    return Rng(derive_seed(seed_, a, b, c));
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53-bit resolution.
  double uniform() noexcept { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log argument.
  double uniform_pos() noexcept { return 1.0 - uniform(); }

  // Standard normal via Box–Muller; the second member of each pair is cached.
  double normal() noexcept {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform_pos()));
    const double th = 6.28318530717958647692 * uniform();
    cached_ = r * std::sin(th);
    have_cached_ = true;
    return r * std::cos(th);
  }

  // Gamma(shape, 1) by Marsaglia–Tsang squeeze (shape boost below 1).
  double gamma(double shape) noexcept {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Student t with df degrees of freedom (variance df/(df-2) when df > 2).
  double student_t(double df) noexcept {
    const double z = normal();
    const double chi2 = 2.0 * gamma(0.5 * df);
    return z / std::sqrt(chi2 / df);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> s_{};
  std::uint64_t seed_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace steinfield
