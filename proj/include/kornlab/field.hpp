#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kornlab/core.hpp"
#include "kornlab/domain.hpp"
#include "kornlab/rng.hpp"

namespace kornlab::fields {

using geometry::BallDomain;
using geometry::EpigraphDomain;
using geometry::RigidMotion;

// Vector field with compact support: eval returns exactly zero outside the
// declared support ball.  jac is optional (null when only finite
// differences are available).
template <int D>
struct SmoothField {
  std::string name;
  std::function<Vec<D>(const Vec<D>&)> eval;
  EnclosingBall<D> support{};
  std::function<Mat<D>(const Vec<D>&)> jac;

  Vec<D> operator()(const Vec<D>& x) const { return eval(x); }
  bool has_jacobian() const { return static_cast<bool>(jac); }
};

// One mollifier atom
//   u(x) = [amp + skew (x-c) + radial (x-c)] * B(x),
//   B(x) = exp(-1 / (1 - |x-c|^2/rho^2))  inside the ball, 0 outside,
// where skew is the antisymmetric matrix built from the coefficient list
// (pairs (i,j), i<j, in lexicographic order).  Skew atoms are infinitesimal
// rotations, the near-null directions of the projected difference.
template <int D>
struct BumpAtom {
  static constexpr int kSkewCoefs = D * (D - 1) / 2;

  Vec<D> center{};
  double radius = 1.0;
  Vec<D> amp{};
  std::array<double, kSkewCoefs> skew{};
  double radial = 0.0;
};

template <int D>
Mat<D> skew_matrix(const std::array<double, D*(D - 1) / 2>& w) {
  Mat<D> s{};
  int k = 0;
  for (int i = 0; i < D; ++i)
    for (int j = i + 1; j < D; ++j, ++k) {
      s[i][j] = -w[k];
      s[j][i] = w[k];
    }
  return s;
}

// Scalar bump and its radial profile derivative factor; returns B and
// dB_dt with t = |x-c|^2 / rho^2, where grad B = dB_dt * 2 (x-c) / rho^2.
inline std::pair<double, double> bump_scalar(double t) {
  if (t >= 1.0) return {0.0, 0.0};
  double om = 1.0 - t;
  double b = std::exp(-1.0 / om);
  return {b, -b / (om * om)};
}

template <int D>
SmoothField<D> bump_field(std::string name, std::vector<BumpAtom<D>> atoms) {
  if (atoms.empty())
    throw DegenerateParameters("bump_field: at least one atom required");
  Box<D> bb;
  for (int i = 0; i < D; ++i) {
    bb.lo[i] = std::numeric_limits<double>::infinity();
    bb.hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& a : atoms)
    for (int i = 0; i < D; ++i) {
      bb.lo[i] = std::min(bb.lo[i], a.center[i] - a.radius);
      bb.hi[i] = std::max(bb.hi[i], a.center[i] + a.radius);
    }

  auto eval = [atoms](const Vec<D>& x) {
    Vec<D> u{};
    for (const auto& a : atoms) {
      Vec<D> r = x - a.center;
      double t = norm2(r) / (a.radius * a.radius);
      auto [b, db] = bump_scalar(t);
      if (b == 0.0) continue;
      Mat<D> s = skew_matrix<D>(a.skew);
      Vec<D> lin = a.amp + matvec(s, r) + a.radial * r;
      u += b * lin;
    }
    return u;
  };

  auto jac = [atoms](const Vec<D>& x) {
    Mat<D> j{};
    for (const auto& a : atoms) {
      Vec<D> r = x - a.center;
      double rho2 = a.radius * a.radius;
      double t = norm2(r) / rho2;
      auto [b, db] = bump_scalar(t);
      if (b == 0.0) continue;
      Mat<D> s = skew_matrix<D>(a.skew);
      Vec<D> lin = a.amp + matvec(s, r) + a.radial * r;
      Vec<D> gb = (2.0 * db / rho2) * r;
      for (int i = 0; i < D; ++i)
        for (int k = 0; k < D; ++k)
          j[i][k] += lin[i] * gb[k] + (s[i][k] + a.radial * (i == k)) * b;
    }
    return j;
  };

  return {std::move(name), eval, enclose_box(bb), jac};
}

template <int D>
SmoothField<D> zero_field() {
  return {"zero", [](const Vec<D>&) { return zero_vec<D>(); },
          {zero_vec<D>(), 1e-3}, [](const Vec<D>&) { return Mat<D>{}; }};
}

// Smooth cutoff supported in the half ball: psi == 1 for
// |x - x0| <= plateau * r/2, psi == 0 for |x - x0| >= r/2, quintic
// smoothstep in between.  sup |grad psi| = (15/8) / ((1-plateau) r/2),
// recorded as grad_bound_coef / r.
template <int D>
struct CutoffFunction {
  BallDomain<D> ball{};
  double plateau = 0.5;

  double grad_bound_coef() const { return 3.75 / (1.0 - plateau); }

  double operator()(const Vec<D>& x) const {
    double rho = dist(x, ball.center);
    double a = plateau * 0.5 * ball.radius, b = 0.5 * ball.radius;
    if (rho <= a) return 1.0;
    if (rho >= b) return 0.0;
    double u = (rho - a) / (b - a);
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));
  }

  Vec<D> gradient(const Vec<D>& x) const {
    double rho = dist(x, ball.center);
    double a = plateau * 0.5 * ball.radius, b = 0.5 * ball.radius;
    if (rho <= a || rho >= b || rho == 0.0) return zero_vec<D>();
    double u = (rho - a) / (b - a);
    double ds = 30.0 * u * u * (1.0 - u) * (1.0 - u) / (b - a);
    return (-ds / rho) * (x - ball.center);
  }
};

// (u(x) - u(y)) . (x - y) / |x - y|; the coincident-point case is a caller
// error, not a quadrature sample to be smoothed over.
template <int D>
double projected_difference(const SmoothField<D>& u, const Vec<D>& x,
                            const Vec<D>& y) {
  Vec<D> e = x - y;
  double r = norm(e);
  if (r == 0.0)
    throw DegenerateParameters("projected_difference: coincident points");
  return dot(u(x) - u(y), e) / r;
}

// v(x', x_d) = u(x', f(x') + x_d): pullback of u under the inverse
// graph-straightening shear.  Supported in the sheared image of supp u.
template <int D>
SmoothField<D> straighten_field(const SmoothField<D>& u,
                                const EpigraphDomain<D>& dom) {
  double r = u.support.radius;
  Vec<D - 1> cp = head<D>(u.support.center);
  double fmax = std::abs(dom.profile(cp)) +
                dom.lipschitz() * r * std::sqrt(double(D - 1));
  Box<D> bb;
  for (int i = 0; i < D - 1; ++i) {
    bb.lo[i] = u.support.center[i] - r;
    bb.hi[i] = u.support.center[i] + r;
  }
  bb.lo[D - 1] = u.support.center[D - 1] - r - fmax;
  bb.hi[D - 1] = u.support.center[D - 1] + r + fmax;

  auto eval = [u, dom](const Vec<D>& x) {
    return u(geometry::straighten_inverse<D>(dom, x));
  };
  return {u.name + "|straightened", eval, enclose_box(bb), nullptr};
}

// Component-anisotropic dilation (w', w_d)(x) -> (w'(x', x_d)/eta,
// w_d(x', eta x_d)).
template <int D>
SmoothField<D> f_eta_map(const SmoothField<D>& w, double eta) {
  if (eta <= 0.0) throw DegenerateParameters("f_eta_map: eta must be > 0");
  double r = w.support.radius;
  const Vec<D>& c = w.support.center;
  Box<D> bb;
  for (int i = 0; i < D - 1; ++i) {
    bb.lo[i] = c[i] - r;
    bb.hi[i] = c[i] + r;
  }
  double lo = c[D - 1] - r, hi = c[D - 1] + r;
  bb.lo[D - 1] = std::min(lo, lo / eta);
  bb.hi[D - 1] = std::max(hi, hi / eta);

  auto eval = [w, eta](const Vec<D>& x) {
    Vec<D> xs = x;
    xs[D - 1] = eta * x[D - 1];
    Vec<D> a = w(x), b = w(xs);
    Vec<D> out;
    for (int i = 0; i < D - 1; ++i) out[i] = a[i] / eta;
    out[D - 1] = b[D - 1];
    return out;
  };
  return {w.name + "|f_eta", eval, enclose_box(bb), nullptr};
}

template <int D>
SmoothField<D> truncate(const SmoothField<D>& u, const CutoffFunction<D>& psi) {
  EnclosingBall<D> supp{psi.ball.center, 0.5 * psi.ball.radius};
  if (u.support.radius < supp.radius) supp = u.support;
  auto eval = [u, psi](const Vec<D>& x) { return psi(x) * u(x); };
  return {u.name + "|cut", eval, supp, nullptr};
}

// Extension of u by zero from `from` to the larger `to`; the moat
// hypothesis dist(supp u, to \ from) >= beta is verified by sampling
// points of the shell and probing u on beta-balls around them.
template <int D>
SmoothField<D> zero_extend(const SmoothField<D>& u, const BallDomain<D>& from,
                           const BallDomain<D>& to, double beta,
                           std::uint64_t n_check, std::uint64_t seed) {
  Rng rng{derive_key(seed, hash_label("zero_extend")), 0};
  std::uint64_t found = 0, attempts = 0;
  while (found < n_check) {
    if (++attempts > 1000 * (n_check + 1))
      throw DegenerateParameters(
          "zero_extend: could not sample the annulus (is `to` larger?)");
    Vec<D> y = sample_ball<D>(rng, to.center, to.radius);
    if (from.contains(y)) continue;
    ++found;
    for (int k = 0; k < 8; ++k) {
      Vec<D> z = sample_ball<D>(rng, y, beta);
      if (norm(u(z)) != 0.0)
        throw DegenerateParameters(
            "zero_extend: support comes closer than beta to the annulus");
    }
  }
  return {u.name + "|ext0", u.eval, u.support, u.jac};
}

// v(x) = u(x0 + r x) / r^s; matches the seminorm scaling identities on
// balls.
template <int D>
SmoothField<D> rescale(const SmoothField<D>& u, const Vec<D>& x0, double r,
                       double s_exp) {
  double rs = std::pow(r, s_exp);
  EnclosingBall<D> supp{(1.0 / r) * (u.support.center - x0),
                        u.support.radius / r};
  auto eval = [u, x0, r, rs](const Vec<D>& x) {
    return (1.0 / rs) * u(x0 + r * x);
  };
  return {u.name + "|rescaled", eval, supp, nullptr};
}

// v(x) = R^T u(T x); the projected difference is invariant under this
// pullback.
template <int D>
SmoothField<D> rigid_pullback(const SmoothField<D>& u,
                              const RigidMotion<D>& t) {
  EnclosingBall<D> supp{t.apply_inverse(u.support.center), u.support.radius};
  auto eval = [u, t](const Vec<D>& x) {
    Vec<D> v = u(t.apply(x));
    Vec<D> out;
    for (int i = 0; i < D; ++i) {
      out[i] = 0.0;
      for (int k = 0; k < D; ++k) out[i] += t.rot[k][i] * v[k];
    }
    return out;
  };
  return {u.name + "|rigid", eval, supp, nullptr};
}

// Bundled field catalog.  All supports sit inside the ball of radius 0.85
// about the origin so every entry is usable on the unit ball.
template <int D>
std::vector<std::string> catalog_names() {
  return {"bump", "skew_bump", "radial", "two_bumps", "random8"};
}

template <int D>
SmoothField<D> make_field(const std::string& name, std::uint64_t seed = 0) {
  auto amp_of = [](std::initializer_list<double> v) {
    Vec<D> a{};
    int i = 0;
    for (double c : v) {
      if (i >= D) break;
      a[i++] = c;
    }
    return a;
  };

  if (name == "zero") return zero_field<D>();

  if (name == "bump") {
    BumpAtom<D> a;
    a.radius = 0.8;
    a.amp = amp_of({1.0, 0.3, 0.2});
    return bump_field<D>("bump", {a});
  }

  if (name == "skew_bump") {
    BumpAtom<D> a;
    a.radius = 0.8;
    a.skew[0] = 0.8;
    return bump_field<D>("skew_bump", {a});
  }

  if (name == "radial") {
    BumpAtom<D> a;
    a.radius = 0.8;
    a.radial = 1.0;
    return bump_field<D>("radial", {a});
  }

  if (name == "two_bumps") {
    BumpAtom<D> a, b;
    a.center[0] = -0.35;
    a.radius = 0.45;
    a.amp = amp_of({0.8, -0.4, 0.3});
    a.skew[0] = 0.3;
    b.center[0] = 0.35;
    b.radius = 0.45;
    b.amp = amp_of({-0.5, 0.6, -0.2});
    b.skew[0] = -0.3;
    return bump_field<D>("two_bumps", {a, b});
  }

  if (name == "random8") {
    Rng rng{derive_key(seed, hash_label("catalog/random8")), 0};
    std::vector<BumpAtom<D>> atoms(8);
    for (auto& a : atoms) {
      a.center = sample_ball<D>(rng, zero_vec<D>(), 0.45);
      a.radius = rng.uniform(0.25, 0.4);
      for (int i = 0; i < D; ++i) a.amp[i] = rng.uniform(-1.0, 1.0);
      for (auto& w : a.skew) w = rng.uniform(-1.0, 1.0);
      a.radial = rng.uniform(-0.5, 0.5);
    }
    return bump_field<D>("random8", std::move(atoms));
  }

  throw DegenerateParameters("unknown field: " + name);
}

template <int D>
std::vector<SmoothField<D>> field_catalog(std::uint64_t seed = 0) {
  std::vector<SmoothField<D>> out;
  for (const auto& n : catalog_names<D>()) out.push_back(make_field<D>(n, seed));
  return out;
}

}  // namespace kornlab::fields
