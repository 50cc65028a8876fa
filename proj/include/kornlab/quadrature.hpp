#pragma once

#include <cstdint>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "kornlab/core.hpp"
#include "kornlab/domain.hpp"
#include "kornlab/reduce.hpp"
#include "kornlab/rng.hpp"

namespace kornlab::quadrature {

using geometry::BallDomain;
using geometry::EpigraphDomain;
using geometry::EpigraphWindow;

// Result of one numerical integration.  std_error is zero only for the
// deterministic dense oracle.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::string method;
};

// Integration region Omega together with a sampling window W.  The window
// is a subset of Omega carrying an exact uniform sampler and a known
// volume; for bounded regions W == Omega (window_exact).  For unbounded
// regions W must contain the support of every integrand factor, and the
// pair estimator compensates for the x-side truncation exactly (see
// estimate_pair_integral).
template <int D>
struct Region {
  std::string name;
  std::function<bool(const Vec<D>&)> contains;
  std::function<bool(const Vec<D>&)> in_window;
  std::function<Vec<D>(Rng&)> sample;
  double window_volume = 0.0;
  double diameter = 0.0;
  bool window_exact = false;
  Box<D> bounding_box{};
};

template <int D>
Region<D> ball_region(const BallDomain<D>& b) {
  Region<D> r;
  r.name = "ball";
  r.contains = [b](const Vec<D>& x) { return b.contains(x); };
  r.in_window = r.contains;
  r.sample = [b](Rng& rng) { return sample_ball<D>(rng, b.center, b.radius); };
  r.window_volume = b.volume();
  r.diameter = 2.0 * b.radius;
  r.window_exact = true;
  for (int i = 0; i < D; ++i) {
    r.bounding_box.lo[i] = b.center[i] - b.radius;
    r.bounding_box.hi[i] = b.center[i] + b.radius;
  }
  return r;
}

template <int D>
Region<D> box_region(const Box<D>& b) {
  Region<D> r;
  r.name = "box";
  r.contains = [b](const Vec<D>& x) { return b.contains(x); };
  r.in_window = r.contains;
  r.sample = [b](Rng& rng) { return sample_box<D>(rng, b); };
  r.window_volume = b.volume();
  r.diameter = b.diameter();
  r.window_exact = true;
  r.bounding_box = b;
  return r;
}

// Epigraph domain sampled through a sheared slab window.
template <int D>
Region<D> epigraph_region(const EpigraphDomain<D>& dom,
                          const EpigraphWindow<D>& w) {
  Region<D> r;
  r.name = "epigraph";
  r.contains = [dom](const Vec<D>& x) { return dom.contains(x); };
  r.in_window = [dom, w](const Vec<D>& x) {
    if (!w.footprint.contains(head<D>(x))) return false;
    double t = dom.height(x);
    return t > 0.0 && t < w.height;
  };
  r.sample = [dom, w](Rng& rng) { return sample_epigraph<D>(rng, dom, w); };
  r.window_volume = w.volume();
  double fr = dom.lipschitz() * 0.5 * w.footprint.diameter();
  Box<D> bb;
  for (int i = 0; i < D - 1; ++i) {
    bb.lo[i] = w.footprint.lo[i];
    bb.hi[i] = w.footprint.hi[i];
  }
  Vec<D - 1> fc = w.footprint.center();
  double f0 = dom.profile(fc);
  bb.lo[D - 1] = f0 - fr;
  bb.hi[D - 1] = f0 + fr + w.height;
  r.bounding_box = bb;
  r.diameter = bb.diameter();
  r.window_exact = false;
  return r;
}

// All of R^d, sampled through a ball window that must cover the supports.
template <int D>
Region<D> full_space_region(const BallDomain<D>& window) {
  Region<D> r = ball_region<D>(window);
  r.name = "full_space";
  r.contains = [](const Vec<D>&) { return true; };
  r.window_exact = false;
  return r;
}

// Upper half space x_d > 0 with a ball window, which must not dip below
// the boundary hyperplane (the window has to be a subset of the region).
template <int D>
Region<D> half_space_region(const BallDomain<D>& window) {
  if (window.center[D - 1] - window.radius < 0.0)
    throw DegenerateParameters(
        "half_space_region: window ball crosses the boundary");
  Region<D> r = ball_region<D>(window);
  r.name = "half_space";
  r.contains = [](const Vec<D>& x) { return x[D - 1] > 0.0; };
  r.window_exact = false;
  return r;
}

// Geometric shells for the pair distance |x - y|, listed from the outermost
// bound down to a strictly positive core radius.  Pairs closer than the
// core are excluded from every estimator and oracle alike; the exclusion
// radius is core_frac * diameter.
struct PairSamplingPlan {
  std::vector<double> shell_bounds;
  std::uint64_t samples_per_shell = 0;

  void validate() const {
    if (shell_bounds.size() < 2)
      throw DegenerateParameters("pair plan: need at least one shell");
    for (std::size_t i = 0; i + 1 < shell_bounds.size(); ++i)
      if (!(shell_bounds[i] > shell_bounds[i + 1]))
        throw DegenerateParameters("pair plan: bounds must decrease");
    if (!(shell_bounds.back() > 0.0))
      throw DegenerateParameters("pair plan: core radius must be positive");
    if (samples_per_shell == 0)
      throw DegenerateParameters("pair plan: empty budget");
  }

  std::uint64_t n_shells() const { return shell_bounds.size() - 1; }
  std::uint64_t total_samples() const { return n_shells() * samples_per_shell; }
};

inline PairSamplingPlan make_pair_plan(double diameter, std::uint64_t budget,
                                       double core_frac = 1e-4,
                                       double tail_factor = 1.0) {
  double r_max = diameter * tail_factor;
  double r_core = diameter * core_frac;
  int n_shells = std::max(1, (int)std::ceil(std::log2(r_max / r_core)));
  PairSamplingPlan plan;
  plan.shell_bounds.resize(n_shells + 1);
  for (int k = 0; k <= n_shells; ++k)
    plan.shell_bounds[k] =
        r_max * std::pow(r_core / r_max, double(k) / n_shells);
  plan.shell_bounds.back() = r_core;
  plan.samples_per_shell = std::max<std::uint64_t>(
      2, budget / static_cast<std::uint64_t>(n_shells));
  plan.validate();
  return plan;
}

// Pair plan for unbounded regions: the outer bound is pushed far past the
// window so that the omitted far-field tail (kernel decay against a
// compactly supported field) is negligible.
inline PairSamplingPlan make_tail_pair_plan(double diameter,
                                            std::uint64_t budget,
                                            double core_frac = 1e-4,
                                            double tail_factor = 1024.0) {
  return make_pair_plan(diameter, budget, core_frac, tail_factor);
}

namespace detail {

[[noreturn]] inline void throw_non_finite(const char* what, const double* x,
                                          const double* y, int d) {
  char buf[256];
  int off = std::snprintf(buf, sizeof buf, "%s: non-finite sample at x=(", what);
  for (int i = 0; i < d; ++i)
    off += std::snprintf(buf + off, sizeof buf - off, "%.17g%s", x[i],
                         i + 1 < d ? "," : ")");
  if (y) {
    off += std::snprintf(buf + off, sizeof buf - off, " y=(");
    for (int i = 0; i < d; ++i)
      off += std::snprintf(buf + off, sizeof buf - off, "%.17g%s", y[i],
                           i + 1 < d ? "," : ")");
  }
  throw NonFiniteSample(buf);
}

}  // namespace detail

// Unbiased shell-stratified estimator of the symmetric pair integral
//   I_m = iint_{Omega x Omega} g_m(x, y) dy dx
// for M integrands sharing one sample stream (common random numbers).
// x is drawn uniformly from the window W, y uniformly from the distance
// shell around x, and membership of y in Omega is resolved by indicator.
// When W is a strict subset of Omega (unbounded domains) the identity
//   I = 2 iint_{W x Omega} - iint_{W x W},
// valid whenever the integrands vanish on pairs outside W x W union its
// mirror, is applied per sample, so the only systematic truncations are
// the documented pair-distance core and outer bound.
template <int D, std::size_t M, class G>
std::array<Estimate, M> estimate_pair_integral_multi(
    const G& g, const Region<D>& region, const PairSamplingPlan& plan,
    std::uint64_t seed, int n_threads = 1) {
  plan.validate();
  const std::uint64_t n_shells = plan.n_shells();
  const std::uint64_t n_per = plan.samples_per_shell;
  const double wvol = region.window_volume;
  const bool exact = region.window_exact;

  std::array<Neumaier, M> value{}, variance{};
  const std::uint64_t block = 4096;
  const std::uint64_t blocks = (n_per + block - 1) / block;

  for (std::uint64_t k = 0; k < n_shells; ++k) {
    double r_hi = plan.shell_bounds[k], r_lo = plan.shell_bounds[k + 1];
    double svol = ball_volume(D, r_hi) - ball_volume(D, r_lo);
    double weight = wvol * svol;

    auto res = blocked_parallel_sum<2 * M>(
        blocks, n_threads, [&](std::uint64_t b) {
          Rng rng{derive_key(seed, k * blocks + b), 0};
          std::uint64_t lo = b * block, hi = std::min(n_per, lo + block);
          std::array<Neumaier, 2 * M> acc{};
          for (std::uint64_t i = lo; i < hi; ++i) {
            Vec<D> x = region.sample(rng);
            Vec<D> y = sample_annulus<D>(rng, x, r_lo, r_hi);
            double ind;
            if (exact) {
              ind = region.contains(y) ? 1.0 : 0.0;
            } else {
              ind = (region.contains(y) ? 2.0 : 0.0) -
                    (region.in_window(y) ? 1.0 : 0.0);
            }
            if (ind == 0.0) continue;
            std::array<double, M> gs = g(x, y);
            for (std::size_t m = 0; m < M; ++m) {
              if (!std::isfinite(gs[m]))
                detail::throw_non_finite("pair integral", x.data(), y.data(),
                                         D);
              double c = weight * ind * gs[m];
              acc[2 * m].add(c);
              acc[2 * m + 1].add(c * c);
            }
          }
          std::array<double, 2 * M> out{};
          for (std::size_t m = 0; m < 2 * M; ++m) out[m] = acc[m].value();
          return out;
        });

    for (std::size_t m = 0; m < M; ++m) {
      double mean = res[2 * m] / double(n_per);
      double mean2 = res[2 * m + 1] / double(n_per);
      value[m].add(mean);
      if (n_per > 1) {
        double var = std::max(0.0, mean2 - mean * mean) / double(n_per - 1);
        variance[m].add(var);
      }
    }
  }

  std::array<Estimate, M> out;
  for (std::size_t m = 0; m < M; ++m) {
    out[m].value = value[m].value();
    out[m].std_error = std::sqrt(std::max(0.0, variance[m].value()));
    out[m].n_samples = plan.total_samples();
    out[m].seed = seed;
    out[m].method = "monte_carlo";
  }
  return out;
}

template <int D, class G>
Estimate estimate_pair_integral(const G& g, const Region<D>& region,
                                const PairSamplingPlan& plan,
                                std::uint64_t seed, int n_threads = 1) {
  auto wrap = [&g](const Vec<D>& x, const Vec<D>& y) {
    return std::array<double, 1>{g(x, y)};
  };
  return estimate_pair_integral_multi<D, 1>(wrap, region, plan, seed,
                                            n_threads)[0];
}

// Replays the exact pair stream the estimator consumes; used by
// per-sample comparison tests.  fn(x, y, indicator_weight) is called for
// every drawn pair whose indicator is non-zero.
template <int D, class Fn>
void for_each_pair(const Region<D>& region, const PairSamplingPlan& plan,
                   std::uint64_t seed, Fn&& fn) {
  plan.validate();
  const std::uint64_t n_per = plan.samples_per_shell;
  const std::uint64_t block = 4096;
  const std::uint64_t blocks = (n_per + block - 1) / block;
  for (std::uint64_t k = 0; k < plan.n_shells(); ++k) {
    double r_hi = plan.shell_bounds[k], r_lo = plan.shell_bounds[k + 1];
    for (std::uint64_t b = 0; b < blocks; ++b) {
      Rng rng{derive_key(seed, k * blocks + b), 0};
      std::uint64_t lo = b * block, hi = std::min(n_per, lo + block);
      for (std::uint64_t i = lo; i < hi; ++i) {
        Vec<D> x = region.sample(rng);
        Vec<D> y = sample_annulus<D>(rng, x, r_lo, r_hi);
        double ind;
        if (region.window_exact) {
          ind = region.contains(y) ? 1.0 : 0.0;
        } else {
          ind = (region.contains(y) ? 2.0 : 0.0) -
                (region.in_window(y) ? 1.0 : 0.0);
        }
        if (ind != 0.0) fn(x, y, ind);
      }
    }
  }
}

// Unbiased estimator of the single integral int_Omega g_m(x) dx through
// the region's window; integrands must vanish on Omega outside the window.
template <int D, std::size_t M, class G>
std::array<Estimate, M> estimate_region_integral_multi(
    const G& g, const Region<D>& region, std::uint64_t n_samples,
    std::uint64_t seed, int n_threads = 1) {
  const std::uint64_t block = 4096;
  const std::uint64_t blocks = (n_samples + block - 1) / block;
  auto res =
      blocked_parallel_sum<2 * M>(blocks, n_threads, [&](std::uint64_t b) {
        Rng rng{derive_key(seed, b), 0};
        std::uint64_t lo = b * block, hi = std::min(n_samples, lo + block);
        std::array<Neumaier, 2 * M> acc{};
        for (std::uint64_t i = lo; i < hi; ++i) {
          Vec<D> x = region.sample(rng);
          std::array<double, M> gs = g(x);
          for (std::size_t m = 0; m < M; ++m) {
            if (!std::isfinite(gs[m]))
              detail::throw_non_finite("region integral", x.data(), nullptr,
                                       D);
            double c = region.window_volume * gs[m];
            acc[2 * m].add(c);
            acc[2 * m + 1].add(c * c);
          }
        }
        std::array<double, 2 * M> out{};
        for (std::size_t m = 0; m < 2 * M; ++m) out[m] = acc[m].value();
        return out;
      });

  std::array<Estimate, M> out;
  for (std::size_t m = 0; m < M; ++m) {
    double mean = res[2 * m] / double(n_samples);
    double mean2 = res[2 * m + 1] / double(n_samples);
    out[m].value = mean;
    out[m].std_error =
        n_samples > 1 ? std::sqrt(std::max(0.0, mean2 - mean * mean) /
                                  double(n_samples - 1))
                      : 0.0;
    out[m].n_samples = n_samples;
    out[m].seed = seed;
    out[m].method = "monte_carlo";
  }
  return out;
}

template <int D, class G>
Estimate estimate_region_integral(const G& g, const Region<D>& region,
                                  std::uint64_t n_samples, std::uint64_t seed,
                                  int n_threads = 1) {
  auto wrap = [&g](const Vec<D>& x) { return std::array<double, 1>{g(x)}; };
  return estimate_region_integral_multi<D, 1>(wrap, region, n_samples, seed,
                                              n_threads)[0];
}

// Shell-stratified estimate of int_{r_inner < |y - x0| < r_outer} g(y) dy,
// with an optional membership indicator folded into g.  Shells double in
// radius, so integrable kernel tails converge with a logarithmic number of
// shells.
template <int D, class G>
Estimate estimate_shell_integral(const G& g, const Vec<D>& x0, double r_inner,
                                 double r_outer, std::uint64_t budget,
                                 std::uint64_t seed, int n_threads = 1) {
  if (!(r_outer > r_inner) || !(r_inner > 0.0))
    throw DegenerateParameters("shell integral: need 0 < r_inner < r_outer");
  int n_shells = std::max(1, (int)std::ceil(std::log2(r_outer / r_inner)));
  std::uint64_t n_per = std::max<std::uint64_t>(2, budget / n_shells);

  Neumaier value, variance;
  const std::uint64_t block = 4096;
  const std::uint64_t blocks = (n_per + block - 1) / block;
  std::uint64_t total = 0;
  for (int k = 0; k < n_shells; ++k) {
    double r_lo = r_inner * std::pow(r_outer / r_inner, double(k) / n_shells);
    double r_hi =
        r_inner * std::pow(r_outer / r_inner, double(k + 1) / n_shells);
    double svol = ball_volume(D, r_hi) - ball_volume(D, r_lo);
    auto res = blocked_parallel_sum<2>(blocks, n_threads, [&](std::uint64_t b) {
      Rng rng{derive_key(seed, std::uint64_t(k) * blocks + b), 0};
      std::uint64_t lo = b * block, hi = std::min(n_per, lo + block);
      Neumaier s, s2;
      for (std::uint64_t i = lo; i < hi; ++i) {
        Vec<D> y = sample_annulus<D>(rng, x0, r_lo, r_hi);
        double v = g(y);
        if (!std::isfinite(v))
          detail::throw_non_finite("shell integral", y.data(), nullptr, D);
        double c = svol * v;
        s.add(c);
        s2.add(c * c);
      }
      return std::array<double, 2>{s.value(), s2.value()};
    });
    double mean = res[0] / double(n_per);
    double mean2 = res[1] / double(n_per);
    value.add(mean);
    variance.add(std::max(0.0, mean2 - mean * mean) / double(n_per - 1));
    total += n_per;
  }

  Estimate est;
  est.value = value.value();
  est.std_error = std::sqrt(std::max(0.0, variance.value()));
  est.n_samples = total;
  est.seed = seed;
  est.method = "monte_carlo";
  return est;
}

// Deterministic reference for bounded-region pair integrals: a tensor
// midpoint rule over cell pairs at center distance beyond a few cells,
// plus a per-cell polar rule (geometric radial subshells, uniform angles)
// resolving the near-diagonal band down to the common core radius
// core_frac * diameter.  Bias of the default configuration against
// converged Monte Carlo references is a few parts per thousand for the
// kernels used here.
struct OracleParams {
  double band_cells = 5.0;
  double core_frac = 1e-4;
  int n_ang = 48;
  int rad_per_octave = 8;
  int n_polar3d = 8;
  int n_azim3d = 16;
  std::uint64_t pair_cap = 300'000'000;
};

template <int D, std::size_t M, class G>
std::array<Estimate, M> dense_oracle_multi(const G& g, const Region<D>& region,
                                           int n_per_axis,
                                           OracleParams prm = {}) {
  static_assert(D == 2 || D == 3, "dense oracle supports d = 2, 3");
  if (n_per_axis < 8)
    throw DegenerateParameters("dense oracle: need at least 8 cells per axis");
  if (!region.window_exact)
    throw DegenerateParameters("dense oracle: bounded regions only");

  const Box<D>& bb = region.bounding_box;
  Vec<D> h;
  double h_max = 0.0, cell_vol = 1.0;
  for (int i = 0; i < D; ++i) {
    h[i] = (bb.hi[i] - bb.lo[i]) / n_per_axis;
    h_max = std::max(h_max, h[i]);
    cell_vol *= h[i];
  }

  std::vector<Vec<D>> cells;
  {
    std::array<int, D> idx{};
    for (;;) {
      Vec<D> c;
      for (int i = 0; i < D; ++i) c[i] = bb.lo[i] + (idx[i] + 0.5) * h[i];
      if (region.contains(c)) cells.push_back(c);
      int i = 0;
      while (i < D && ++idx[i] == n_per_axis) idx[i++] = 0;
      if (i == D) break;
    }
  }
  if (cells.size() * cells.size() > prm.pair_cap)
    throw DegenerateParameters("dense oracle: pair count exceeds cap");

  const double band = prm.band_cells * h_max;
  const double r_min = prm.core_frac * region.diameter;

  std::array<Neumaier, M> acc{};
  std::uint64_t evals = 0;

  const double band2 = band * band;
  for (const auto& x : cells)
    for (const auto& y : cells) {
      Vec<D> d = x - y;
      if (norm2(d) <= band2) continue;
      std::array<double, M> gs = g(x, y);
      ++evals;
      for (std::size_t m = 0; m < M; ++m) {
        if (!std::isfinite(gs[m]))
          detail::throw_non_finite("dense oracle", x.data(), y.data(), D);
        acc[m].add(cell_vol * cell_vol * gs[m]);
      }
    }

  int n_oct = std::max(1, (int)std::ceil(std::log2(band / r_min)));
  int n_sub = n_oct * prm.rad_per_octave;

  std::vector<Vec<D>> dirs;
  std::vector<double> dir_frac;
  if constexpr (D == 2) {
    dirs.resize(prm.n_ang);
    dir_frac.assign(prm.n_ang, 1.0 / prm.n_ang);
    for (int m = 0; m < prm.n_ang; ++m) {
      double t = (m + 0.5) * 2.0 * std::numbers::pi / prm.n_ang;
      dirs[m] = {std::cos(t), std::sin(t)};
    }
  } else {
    for (int a = 0; a < prm.n_polar3d; ++a) {
      double mu = -1.0 + (a + 0.5) * 2.0 / prm.n_polar3d;
      double s = std::sqrt(std::max(0.0, 1.0 - mu * mu));
      for (int b = 0; b < prm.n_azim3d; ++b) {
        double t = (b + 0.5) * 2.0 * std::numbers::pi / prm.n_azim3d;
        dirs.push_back({s * std::cos(t), s * std::sin(t), mu});
        dir_frac.push_back(1.0 / (prm.n_polar3d * prm.n_azim3d));
      }
    }
  }

  for (const auto& x : cells) {
    for (int k = 0; k < n_sub; ++k) {
      double r_lo = r_min * std::pow(band / r_min, double(k) / n_sub);
      double r_hi = r_min * std::pow(band / r_min, double(k + 1) / n_sub);
      double rm = 0.5 * (r_lo + r_hi);
      double svol = ball_volume(D, r_hi) - ball_volume(D, r_lo);
      for (std::size_t q = 0; q < dirs.size(); ++q) {
        Vec<D> y = x + rm * dirs[q];
        if (!region.contains(y)) continue;
        std::array<double, M> gs = g(x, y);
        ++evals;
        for (std::size_t m = 0; m < M; ++m) {
          if (!std::isfinite(gs[m]))
            detail::throw_non_finite("dense oracle", x.data(), y.data(), D);
          acc[m].add(cell_vol * svol * dir_frac[q] * gs[m]);
        }
      }
    }
  }

  std::array<Estimate, M> out;
  for (std::size_t m = 0; m < M; ++m) {
    out[m].value = acc[m].value();
    out[m].std_error = 0.0;
    out[m].n_samples = evals;
    out[m].seed = 0;
    out[m].method = "dense_oracle";
  }
  return out;
}

template <int D, class G>
Estimate dense_oracle(const G& g, const Region<D>& region, int n_per_axis,
                      OracleParams prm = {}) {
  auto wrap = [&g](const Vec<D>& x, const Vec<D>& y) {
    return std::array<double, 1>{g(x, y)};
  };
  return dense_oracle_multi<D, 1>(wrap, region, n_per_axis, prm)[0];
}

}  // namespace kornlab::quadrature
