#pragma once

#include <cstdint>
#include <string>

#include "kornlab/field.hpp"
#include "kornlab/seminorm.hpp"

namespace kornlab::extension {

using fields::SmoothField;
using geometry::EpigraphDomain;
using quadrature::Estimate;
using seminorms::SeminormParams;

// Coefficients of the two-layer reflection
//   (E u)_i = k u_i^lambda + l u_i^mu   (tangential components)
//   (E u)_d = m u_d^lambda + n u_d^mu   (normal component),
// where u^eta is the pullback along the vertical reflection-dilation of
// ratio eta.  The four constants are pinned by matching the zeroth and
// first order traces: k + l = 1 = m + n, lambda k = -m, mu l = -n, which
// has a unique solution for distinct positive lambda, mu.
struct ReflectionConstants {
  double lambda = 1.0;
  double mu = 2.0;
  double k = 0.0;
  double l = 0.0;
  double m = 0.0;
  double n = 0.0;

  double residual() const {
    double r = std::abs(k + l - 1.0);
    r = std::max(r, std::abs(m + n - 1.0));
    r = std::max(r, std::abs(lambda * k + m));
    r = std::max(r, std::abs(mu * l + n));
    return r;
  }
};

inline ReflectionConstants solve_reflection_constants(double lambda,
                                                      double mu) {
  if (!(lambda > 0.0) || !(mu > 0.0))
    throw DegenerateParameters(
        "reflection constants: ratios must be positive");
  if (std::abs(lambda - mu) < 1e-12)
    throw DegenerateParameters(
        "reflection constants: equal ratios are degenerate");
  ReflectionConstants c;
  c.lambda = lambda;
  c.mu = mu;
  c.k = (1.0 + mu) / (mu - lambda);
  c.l = 1.0 - c.k;
  c.m = -lambda * c.k;
  c.n = -mu * c.l;
  return c;
}

// Single reflected component u_j(Phi_eta(x)) for x below the graph.
template <int D>
double reflect_component(const SmoothField<D>& u, const EpigraphDomain<D>& dom,
                         double eta, int j, const Vec<D>& x) {
  return u(geometry::phi_eta<D>(dom, eta, x))[j];
}

// Whole-space extension of a field supported in the epigraph.  Inside the
// domain the original evaluator is used unchanged; below the graph the
// two-layer reflection combination is taken.
template <int D>
SmoothField<D> extend(const SmoothField<D>& u, const EpigraphDomain<D>& dom,
                      const ReflectionConstants& c) {
  double r = u.support.radius;
  const Vec<D>& ctr = u.support.center;
  Vec<D - 1> cp = head<D>(ctr);
  double fspread = std::abs(dom.profile(cp)) +
                   dom.lipschitz() * r * std::sqrt(double(D - 1));
  double depth = (std::abs(ctr[D - 1]) + r + fspread) /
                 std::min({c.lambda, c.mu, 1.0});
  Box<D> bb;
  for (int i = 0; i < D - 1; ++i) {
    bb.lo[i] = ctr[i] - r;
    bb.hi[i] = ctr[i] + r;
  }
  bb.lo[D - 1] = -fspread - depth;
  bb.hi[D - 1] = ctr[D - 1] + r;

  auto eval = [u, dom, c](const Vec<D>& x) {
    if (dom.height(x) >= 0.0) return u(x);
    Vec<D> ul = u(geometry::phi_eta<D>(dom, c.lambda, x));
    Vec<D> um = u(geometry::phi_eta<D>(dom, c.mu, x));
    Vec<D> out;
    for (int i = 0; i < D - 1; ++i) out[i] = c.k * ul[i] + c.l * um[i];
    out[D - 1] = c.m * ul[D - 1] + c.n * um[D - 1];
    return out;
  };
  return {u.name + "|extended", eval, enclose_box(bb), nullptr};
}

// Sheared slab window covering supp(u) within the epigraph.
template <int D>
geometry::EpigraphWindow<D> epigraph_window_for(const SmoothField<D>& u,
                                                const EpigraphDomain<D>& dom,
                                                double margin = 0.05) {
  double r = u.support.radius * (1.0 + margin);
  Vec<D - 1> cp = head<D>(u.support.center);
  geometry::EpigraphWindow<D> w;
  for (int i = 0; i < D - 1; ++i) {
    w.footprint.lo[i] = cp[i] - r;
    w.footprint.hi[i] = cp[i] + r;
  }
  double fmin = dom.profile(cp) - dom.lipschitz() * r * std::sqrt(double(D - 1));
  w.height = u.support.center[D - 1] + r - fmin;
  return w;
}

template <int D>
struct ExtensionReport {
  ReflectionConstants constants;
  SeminormParams prm;
  double lipschitz = 0.0;
  Estimate lhs_x_p, lhs_lp_p;
  Estimate rhs_x_p, rhs_w_p, rhs_lp_p;
  double lhs_norm = 0.0;
  double rhs_norm = 0.0;
  double c_emp = 0.0;
};

// Empirical constant of the extension bound
//   ||E u||_X(R^d) <= C (||u||_X(D) + Lip(f) ||u||_W(D)).
// The whole-space seminorm is taken through a ball window of twice the
// extension's support radius; the domain-side quantities go through the
// sheared slab.  Graphs at or beyond the uniform Lipschitz threshold are
// outside the bound's hypotheses.
template <int D>
ExtensionReport<D> extension_bound_check(const SmoothField<D>& u,
                                         const EpigraphDomain<D>& dom,
                                         const ReflectionConstants& c,
                                         const SeminormParams& prm,
                                         std::uint64_t pair_budget,
                                         std::uint64_t lp_budget,
                                         std::uint64_t seed,
                                         int n_threads = 1) {
  prm.validate();
  if (dom.lipschitz() >= geometry::kMaxUniformLipschitz)
    throw HypothesisUnmet(
        "extension bound: Lipschitz constant must be below 3/5");

  ExtensionReport<D> rep;
  rep.constants = c;
  rep.prm = prm;
  rep.lipschitz = dom.lipschitz();

  auto e = extend<D>(u, dom, c);
  auto whole = quadrature::full_space_region<D>(
      {e.support.center, 2.0 * e.support.radius});
  auto slab = quadrature::epigraph_region<D>(dom,
                                             epigraph_window_for<D>(u, dom));

  using seminorms::label_seed;
  auto plan_whole =
      quadrature::make_tail_pair_plan(whole.diameter, pair_budget);
  auto plan_slab = quadrature::make_tail_pair_plan(slab.diameter, pair_budget);

  rep.lhs_x_p = seminorms::x_seminorm_p<D>(e, whole, prm, plan_whole,
                                           label_seed(seed, "ext/lhs_x"),
                                           n_threads);
  rep.lhs_lp_p = seminorms::lp_norm_p<D>(e, whole, prm.p, lp_budget,
                                         label_seed(seed, "ext/lhs_lp"),
                                         n_threads);
  auto rhs_xw = seminorms::xw_seminorms_p<D>(u, slab, prm, plan_slab,
                                             label_seed(seed, "ext/rhs_xw"),
                                             n_threads);
  rep.rhs_x_p = rhs_xw[0];
  rep.rhs_w_p = rhs_xw[1];
  rep.rhs_lp_p = seminorms::lp_norm_p<D>(u, slab, prm.p, lp_budget,
                                         label_seed(seed, "ext/rhs_lp"),
                                         n_threads);

  rep.lhs_norm =
      seminorms::norm_from_powers(rep.lhs_x_p.value, rep.lhs_lp_p.value, prm.p);
  double rhs_x_norm =
      seminorms::norm_from_powers(rep.rhs_x_p.value, rep.rhs_lp_p.value, prm.p);
  double rhs_w_norm =
      seminorms::norm_from_powers(rep.rhs_w_p.value, rep.rhs_lp_p.value, prm.p);
  rep.rhs_norm = rhs_x_norm + rep.lipschitz * rhs_w_norm;
  if (rep.rhs_norm <= 0.0)
    throw DegenerateParameters("extension bound: zero field");
  rep.c_emp = rep.lhs_norm / rep.rhs_norm;
  return rep;
}

}  // namespace kornlab::extension
