#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "kornlab/core.hpp"
#include "kornlab/profile.hpp"
#include "kornlab/reduce.hpp"
#include "kornlab/rng.hpp"

namespace kornlab::geometry {

template <int D>
struct BallDomain {
  Vec<D> center{};
  double radius = 1.0;

  bool contains(const Vec<D>& x) const {
    return dist(x, center) < radius;
  }

  BallDomain half() const { return {center, 0.5 * radius}; }
  double volume() const { return ball_volume(D, radius); }
};

// Region above a Lipschitz graph: { x : x_d > f(x') }.
template <int D>
struct EpigraphDomain {
  Profile<D - 1> profile;

  bool contains(const Vec<D>& x) const {
    return x[D - 1] > profile(head<D>(x));
  }

  // Signed vertical distance to the graph, positive inside.
  double height(const Vec<D>& x) const {
    return x[D - 1] - profile(head<D>(x));
  }

  double lipschitz() const { return profile.lipschitz; }
};

template <int D>
EpigraphDomain<D> half_space_domain() {
  return {zero_profile<D - 1>()};
}

// Sheared slab { (x', f(x') + t) : x' in footprint, 0 < t < height }.
// The shear has unit Jacobian, so sampling footprint x (0, height)
// uniformly and shearing gives exact uniform samples of the slab, whose
// volume is vol(footprint) * height.
template <int D>
struct EpigraphWindow {
  Box<D - 1> footprint{};
  double height = 1.0;

  double volume() const { return footprint.volume() * height; }
};

template <int D>
Vec<D> sample_epigraph(Rng& rng, const EpigraphDomain<D>& dom,
                       const EpigraphWindow<D>& w) {
  Vec<D - 1> xp = sample_box<D - 1>(rng, w.footprint);
  double t = rng.uniform(0.0, w.height);
  return append<D - 1>(xp, dom.profile(xp) + t);
}

// Orthogonal matrix plus shift.  Construction rejects matrices whose
// orthonormality defect exceeds 1e-12.
template <int D>
struct RigidMotion {
  Mat<D> rot{};
  Vec<D> shift{};

  static double orthonormality_defect(const Mat<D>& r) {
    double worst = 0.0;
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) {
        double g = 0.0;
        for (int k = 0; k < D; ++k) g += r[k][i] * r[k][j];
        worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
      }
    return worst;
  }

  static RigidMotion make(const Mat<D>& rot, const Vec<D>& shift) {
    if (orthonormality_defect(rot) > 1e-12)
      throw DegenerateParameters("rigid motion: matrix is not orthogonal");
    return {rot, shift};
  }

  Vec<D> apply(const Vec<D>& x) const { return matvec(rot, x) + shift; }

  Vec<D> apply_inverse(const Vec<D>& y) const {
    Vec<D> z = y - shift;
    Vec<D> r;
    for (int i = 0; i < D; ++i) {
      r[i] = 0.0;
      for (int k = 0; k < D; ++k) r[i] += rot[k][i] * z[k];
    }
    return r;
  }
};

inline RigidMotion<2> rotation2d(double angle, const Vec<2>& shift = {}) {
  double c = std::cos(angle), s = std::sin(angle);
  return RigidMotion<2>::make({{{c, -s}, {s, c}}}, shift);
}

inline RigidMotion<3> rotation3d_z(double angle, const Vec<3>& shift = {}) {
  double c = std::cos(angle), s = std::sin(angle);
  return RigidMotion<3>::make({{{c, -s, 0.0}, {s, c, 0.0}, {0.0, 0.0, 1.0}}},
                              shift);
}

// Vertical reflection-dilation across the graph, mapping the region below
// the graph onto the epigraph: (x', x_d) -> (x', f(x') + eta (f(x') - x_d)).
template <int D>
Vec<D> phi_eta(const EpigraphDomain<D>& dom, double eta, const Vec<D>& x) {
  Vec<D - 1> xp = head<D>(x);
  double f = dom.profile(xp);
  return append<D - 1>(xp, f + eta * (f - x[D - 1]));
}

template <int D>
Vec<D> phi_eta_inverse(const EpigraphDomain<D>& dom, double eta,
                       const Vec<D>& x) {
  Vec<D - 1> xp = head<D>(x);
  double f = dom.profile(xp);
  return append<D - 1>(xp, f + (f - x[D - 1]) / eta);
}

// Graph-flattening shear (x', x_d) -> (x', x_d - f(x')), with unit Jacobian;
// maps the epigraph onto the upper half space.
template <int D>
Vec<D> straighten(const EpigraphDomain<D>& dom, const Vec<D>& x) {
  Vec<D - 1> xp = head<D>(x);
  return append<D - 1>(xp, x[D - 1] - dom.profile(xp));
}

template <int D>
Vec<D> straighten_inverse(const EpigraphDomain<D>& dom, const Vec<D>& x) {
  Vec<D - 1> xp = head<D>(x);
  return append<D - 1>(xp, x[D - 1] + dom.profile(xp));
}

// Comparability threshold for the reflected-distance inequality
// |z - y| <= C |phi_eta^{-1}(z) - y|: it holds for all z, y in the epigraph
// whenever lipschitz^2 <= (C^2 - eta^2)(C^2 - 1) / (C^2 + eta)^2 and
// C > max(1, eta).
inline double comparability_expression(double eta, double c) {
  return (c * c - eta * eta) * (c * c - 1.0) /
         ((c * c + eta) * (c * c + eta));
}

inline bool comparability_hypothesis_ok(double lipschitz, double eta,
                                        double c) {
  if (c <= std::max(1.0, eta)) return false;
  return lipschitz * lipschitz <= comparability_expression(eta, c);
}

// Default comparability constant; at this choice the admissible Lipschitz
// range includes every slope below 3/5 uniformly in eta.
inline double default_comparability_constant(double eta) {
  return 2.0 * std::max(1.0, eta);
}

constexpr double kMaxUniformLipschitz = 3.0 / 5.0;

struct GeomCheckReport {
  std::uint64_t n_pairs = 0;
  std::uint64_t violations = 0;
  double worst_ratio = 0.0;
  double c_eta = 0.0;
  bool hypothesis_ok = false;
  double hypothesis_margin = 0.0;
};

// Samples pairs z, y in the epigraph and verifies
// |z - y| <= c_eta * |phi_eta^{-1}(z) - y|.  A failed hypothesis is
// reported as such, not as a violation; sampling still runs so that the
// sharpness of the threshold can be probed.
template <int D>
GeomCheckReport geometric_inequality_check(const EpigraphDomain<D>& dom,
                                           double eta, double c_eta,
                                           const EpigraphWindow<D>& window,
                                           std::uint64_t n_pairs,
                                           std::uint64_t seed,
                                           int n_threads = 1) {
  GeomCheckReport rep;
  rep.n_pairs = n_pairs;
  rep.c_eta = c_eta;
  rep.hypothesis_ok = comparability_hypothesis_ok(dom.lipschitz(), eta, c_eta);
  rep.hypothesis_margin = comparability_expression(eta, c_eta) -
                          dom.lipschitz() * dom.lipschitz();

  const std::uint64_t block = 4096;
  std::uint64_t n_blocks = (n_pairs + block - 1) / block;
  std::vector<double> block_worst(n_blocks, 0.0);
  auto res = blocked_parallel_sum<1>(n_blocks, n_threads, [&](std::uint64_t b) {
    Rng rng{derive_key(seed, b), 0};
    std::uint64_t lo = b * block, hi = std::min(n_pairs, lo + block);
    double worst = 0.0, bad = 0.0;
    for (std::uint64_t i = lo; i < hi; ++i) {
      Vec<D> z = sample_epigraph<D>(rng, dom, window);
      Vec<D> y = sample_epigraph<D>(rng, dom, window);
      double denom = dist(phi_eta_inverse<D>(dom, eta, z), y);
      if (denom == 0.0) continue;
      double ratio = dist(z, y) / denom;
      worst = std::max(worst, ratio);
      if (ratio > c_eta * (1.0 + 1e-12)) bad += 1.0;
    }
    block_worst[b] = worst;
    return std::array<double, 1>{bad};
  });
  rep.violations = static_cast<std::uint64_t>(res[0]);
  rep.worst_ratio = *std::max_element(block_worst.begin(), block_worst.end());
  return rep;
}

// Log-spaced grid scan of the comparability expression at the default
// constant; returns the minimal margin over the squared uniform threshold.
struct ComparabilityScan {
  double min_margin = 0.0;
  double min_expression = 0.0;
  int n_grid = 0;
};

inline ComparabilityScan comparability_grid_scan(int n_grid = 100,
                                                 double eta_lo = 0.01,
                                                 double eta_hi = 100.0) {
  ComparabilityScan scan;
  scan.n_grid = n_grid;
  double bound = kMaxUniformLipschitz * kMaxUniformLipschitz;
  scan.min_margin = std::numeric_limits<double>::infinity();
  scan.min_expression = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    double t = n_grid == 1 ? 0.0 : double(i) / (n_grid - 1);
    double eta = eta_lo * std::pow(eta_hi / eta_lo, t);
    double expr =
        comparability_expression(eta, default_comparability_constant(eta));
    scan.min_expression = std::min(scan.min_expression, expr);
    scan.min_margin = std::min(scan.min_margin, expr - bound);
  }
  return scan;
}

}  // namespace kornlab::geometry
