#pragma once

#include <cstdint>
#include <string>

#include "kornlab/field.hpp"
#include "kornlab/quadrature.hpp"

namespace kornlab::seminorms {

using fields::SmoothField;
using quadrature::Estimate;
using quadrature::PairSamplingPlan;
using quadrature::Region;

// Fractional order s in (0,1) and exponent p > 1.  Several identities
// degenerate at s p = 1; callers that rely on them must request the guard.
struct SeminormParams {
  double s = 0.5;
  double p = 2.0;

  void validate(bool require_sp_ne_1 = false, int solver_dim = 0) const {
    if (!(s > 0.0 && s < 1.0))
      throw DegenerateParameters("seminorm params: need 0 < s < 1");
    if (!(p > 1.0)) throw DegenerateParameters("seminorm params: need p > 1");
    if (require_sp_ne_1 && std::abs(s * p - 1.0) <= 1e-9)
      throw DegenerateParameters("seminorm params: s p == 1 is degenerate");
    if (solver_dim > 0 && !(s * p < solver_dim))
      throw DegenerateParameters("seminorm params: need s p < d");
  }

  double sp() const { return s * p; }
};

// Derives a per-estimate stream so that differently labeled estimates are
// statistically independent while identical labels share samples exactly.
inline std::uint64_t label_seed(std::uint64_t seed, const std::string& label) {
  return derive_key(seed, hash_label(label));
}

// Integrand of the projected-difference seminorm
//   [u]_X^p = iint |(u(x)-u(y)) . (x-y)|^p / (|x-y|^p |x-y|^{d+sp}) dy dx.
template <int D>
auto x_integrand(const SmoothField<D>& u, const SeminormParams& prm) {
  return [u, prm](const Vec<D>& x, const Vec<D>& y) {
    Vec<D> e = x - y;
    double r = norm(e);
    double proj = dot(u(x) - u(y), e) / r;
    return std::pow(std::abs(proj), prm.p) *
           std::pow(r, -double(D) - prm.sp());
  };
}

// Integrand of the Gagliardo seminorm |u|_W^p.
template <int D>
auto w_integrand(const SmoothField<D>& u, const SeminormParams& prm) {
  return [u, prm](const Vec<D>& x, const Vec<D>& y) {
    double diff = norm(u(x) - u(y));
    return std::pow(diff, prm.p) *
           std::pow(dist(x, y), -double(D) - prm.sp());
  };
}

template <int D>
Estimate x_seminorm_p(const SmoothField<D>& u, const Region<D>& region,
                      const SeminormParams& prm, const PairSamplingPlan& plan,
                      std::uint64_t seed, int n_threads = 1) {
  prm.validate();
  return quadrature::estimate_pair_integral<D>(x_integrand<D>(u, prm), region,
                                               plan, seed, n_threads);
}

template <int D>
Estimate w_seminorm_p(const SmoothField<D>& u, const Region<D>& region,
                      const SeminormParams& prm, const PairSamplingPlan& plan,
                      std::uint64_t seed, int n_threads = 1) {
  prm.validate();
  return quadrature::estimate_pair_integral<D>(w_integrand<D>(u, prm), region,
                                               plan, seed, n_threads);
}

// Both seminorms over one common-random-number pair stream; the projected
// estimate is then dominated by the Gagliardo estimate sample by sample.
template <int D>
std::array<Estimate, 2> xw_seminorms_p(const SmoothField<D>& u,
                                       const Region<D>& region,
                                       const SeminormParams& prm,
                                       const PairSamplingPlan& plan,
                                       std::uint64_t seed, int n_threads = 1) {
  prm.validate();
  auto g = [u, prm](const Vec<D>& x, const Vec<D>& y) {
    Vec<D> du = u(x) - u(y);
    Vec<D> e = x - y;
    double r = norm(e);
    double kern = std::pow(r, -double(D) - prm.sp());
    double proj = std::abs(dot(du, e)) / r;
    return std::array<double, 2>{std::pow(proj, prm.p) * kern,
                                 std::pow(norm(du), prm.p) * kern};
  };
  return quadrature::estimate_pair_integral_multi<D, 2>(g, region, plan, seed,
                                                        n_threads);
}

// int_Omega |u|^p through the region window (exact for compactly supported
// fields whose support the window covers).
template <int D>
Estimate lp_norm_p(const SmoothField<D>& u, const Region<D>& region, double p,
                   std::uint64_t n_samples, std::uint64_t seed,
                   int n_threads = 1) {
  auto g = [u, p](const Vec<D>& x) { return std::pow(norm(u(x)), p); };
  return quadrature::estimate_region_integral<D>(g, region, n_samples, seed,
                                                 n_threads);
}

// Hardy-type weighted integral int_{x_d > 0} |g(x)|^p / x_d^{sp} dx for
// fields supported strictly above the boundary hyperplane.
template <int D>
Estimate hardy_weighted_p(const SmoothField<D>& g, double p, double sp,
                          std::uint64_t n_samples, std::uint64_t seed,
                          int n_threads = 1) {
  double clearance = g.support.center[D - 1] - g.support.radius;
  if (clearance < 1e-6)
    throw DegenerateParameters(
        "hardy_weighted_p: support must clear the boundary hyperplane");
  auto region = quadrature::ball_region<D>({g.support.center,
                                            g.support.radius});
  auto integrand = [g, p, sp](const Vec<D>& x) {
    return std::pow(norm(g(x)), p) * std::pow(x[D - 1], -sp);
  };
  return quadrature::estimate_region_integral<D>(integrand, region, n_samples,
                                                 seed, n_threads);
}

// Full-norm combination ||u||_X = [u]_X + ||u||_Lp from p-th power
// estimates.
inline double norm_from_powers(double seminorm_p, double lp_p, double p) {
  return std::pow(std::max(0.0, seminorm_p), 1.0 / p) +
         std::pow(std::max(0.0, lp_p), 1.0 / p);
}

}  // namespace kornlab::seminorms
