#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kornlab {

template <int D>
using Vec = std::array<double, D>;

template <int D>
using Mat = std::array<Vec<D>, D>;  // row-major: m[i][j]

template <int D>
constexpr Vec<D> zero_vec() {
  Vec<D> v{};
  return v;
}

// Element-wise helpers are templated on the array extent (size_t) so that
// argument deduction works on std::array directly.
template <std::size_t N>
inline std::array<double, N> operator+(const std::array<double, N>& a,
                                       const std::array<double, N>& b) {
  std::array<double, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] + b[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N> operator-(const std::array<double, N>& a,
                                       const std::array<double, N>& b) {
  std::array<double, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = a[i] - b[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N> operator*(double c,
                                       const std::array<double, N>& a) {
  std::array<double, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = c * a[i];
  return r;
}

template <std::size_t N>
inline std::array<double, N>& operator+=(std::array<double, N>& a,
                                         const std::array<double, N>& b) {
  for (std::size_t i = 0; i < N; ++i) a[i] += b[i];
  return a;
}

template <std::size_t N>
inline double dot(const std::array<double, N>& a,
                  const std::array<double, N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) s += a[i] * b[i];
  return s;
}

template <std::size_t N>
inline double norm2(const std::array<double, N>& a) {
  return dot(a, a);
}

template <std::size_t N>
inline double norm(const std::array<double, N>& a) {
  return std::sqrt(norm2(a));
}

template <std::size_t N>
inline double dist(const std::array<double, N>& a,
                   const std::array<double, N>& b) {
  return norm(a - b);
}

template <std::size_t N>
inline std::array<double, N> matvec(
    const std::array<std::array<double, N>, N>& m,
    const std::array<double, N>& v) {
  std::array<double, N> r;
  for (std::size_t i = 0; i < N; ++i) r[i] = dot(m[i], v);
  return r;
}

// Drops the last coordinate: x = (x', x_d) -> x'.
template <int D>
inline Vec<D - 1> head(const Vec<D>& x) {
  Vec<D - 1> r;
  for (int i = 0; i < D - 1; ++i) r[i] = x[i];
  return r;
}

template <int D>
inline Vec<D + 1> append(const Vec<D>& xp, double last) {
  Vec<D + 1> r;
  for (int i = 0; i < D; ++i) r[i] = xp[i];
  r[D] = last;
  return r;
}

template <int D>
struct Box {
  Vec<D> lo{};
  Vec<D> hi{};

  double volume() const {
    double v = 1.0;
    for (int i = 0; i < D; ++i) v *= hi[i] - lo[i];
    return v;
  }

  bool contains(const Vec<D>& x) const {
    for (int i = 0; i < D; ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  double diameter() const {
    Vec<D> e;
    for (int i = 0; i < D; ++i) e[i] = hi[i] - lo[i];
    return norm(e);
  }

  Vec<D> center() const {
    Vec<D> c;
    for (int i = 0; i < D; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

// Smallest ball enclosing a box (center of the box, half its diameter).
template <int D>
struct EnclosingBall {
  Vec<D> center;
  double radius;
};

template <int D>
inline EnclosingBall<D> enclose_box(const Box<D>& b) {
  return {b.center(), 0.5 * b.diameter()};
}

inline double ball_volume(int d, double r) {
  switch (d) {
    case 1: return 2.0 * r;
    case 2: return std::numbers::pi * r * r;
    case 3: return 4.0 / 3.0 * std::numbers::pi * r * r * r;
    default:
      return std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0) *
             std::pow(r, d);
  }
}

inline double sphere_area(int d, double r) {
  return d * ball_volume(d, r) / r;
}

struct HypothesisUnmet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateParameters : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NonFiniteSample : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kornlab
