#pragma once

#include <cstdint>

#include "kornlab/core.hpp"

namespace kornlab {

// Counter-based generator built on the splitmix64 mixer.  Output i of a
// stream keyed by `key` equals the i-th output of a sequentially stepped
// splitmix64 seeded with `key`, so known-answer vectors apply directly,
// while random access by counter keeps blocked parallel sampling
// reproducible under any thread count.
struct Rng {
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

  std::uint64_t key = 0;
  std::uint64_t counter = 0;

  static constexpr std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  static constexpr std::uint64_t at(std::uint64_t key, std::uint64_t i) {
    return mix(key + (i + 1) * kGolden);
  }

  std::uint64_t next_u64() { return at(key, counter++); }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * next_unit(); }
};

// Decorrelates (seed, stream) pairs; streams of a fixed seed are themselves
// a splitmix64-style sequence over a mixed base key.
inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t stream) {
  return Rng::mix(Rng::mix(seed + Rng::kGolden) + stream * Rng::kGolden);
}

// FNV-1a over a byte-view of a string, used to hash labels into stream ids.
inline std::uint64_t hash_label(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

template <int D>
inline Vec<D> sample_box(Rng& rng, const Box<D>& b) {
  Vec<D> x;
  for (int i = 0; i < D; ++i) x[i] = rng.uniform(b.lo[i], b.hi[i]);
  return x;
}

// Uniform direction on the unit sphere.
template <int D>
inline Vec<D> sample_direction(Rng& rng) {
  if constexpr (D == 1) {
    return {rng.next_unit() < 0.5 ? -1.0 : 1.0};
  } else if constexpr (D == 2) {
    double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    return {std::cos(t), std::sin(t)};
  } else if constexpr (D == 3) {
    double c = rng.uniform(-1.0, 1.0);
    double t = rng.uniform(0.0, 2.0 * std::numbers::pi);
    double s = std::sqrt(std::max(0.0, 1.0 - c * c));
    return {s * std::cos(t), s * std::sin(t), c};
  } else {
    // Normal rejection is overkill for the dimensions used here.
    static_assert(D <= 3, "sample_direction supports d <= 3");
  }
}

// Uniform point in the annulus r_lo <= |y - c| <= r_hi (radius density
// proportional to rho^{d-1}, inverted in closed form).
template <int D>
inline Vec<D> sample_annulus(Rng& rng, const Vec<D>& c, double r_lo,
                             double r_hi) {
  double u = rng.next_unit();
  double a = std::pow(r_lo, D), b = std::pow(r_hi, D);
  double rho = std::pow(a + u * (b - a), 1.0 / D);
  Vec<D> dir = sample_direction<D>(rng);
  return c + rho * dir;
}

template <int D>
inline Vec<D> sample_ball(Rng& rng, const Vec<D>& c, double r) {
  return sample_annulus<D>(rng, c, 0.0, r);
}

}  // namespace kornlab
