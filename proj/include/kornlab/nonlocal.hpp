#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "kornlab/seminorm.hpp"

namespace kornlab::nonlocal {

using fields::SmoothField;
using geometry::BallDomain;
using quadrature::Estimate;
using seminorms::label_seed;
using seminorms::SeminormParams;

// Interaction coefficient A(x, y): symmetric, measurable, elliptic in the
// band [1/lam, lam].  The checkerboard flips between lam and 1/lam with the
// joint parity of the cell indices of both arguments; the seeded-random kind
// hashes the unordered pair of cells, so symmetry is exact by construction.
template <int D>
struct Coefficient {
  enum class Kind { kConstant, kCheckerboard, kSeededRandom };

  Kind kind = Kind::kConstant;
  double lam = 2.0;
  double cell = 0.25;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(lam > 1.0))
      throw DegenerateParameters("coefficient: ellipticity bound must be > 1");
    if (!(cell > 0.0))
      throw DegenerateParameters("coefficient: cell size must be positive");
  }

  double operator()(const Vec<D>& x, const Vec<D>& y) const {
    switch (kind) {
      case Kind::kConstant:
        return 1.0;
      case Kind::kCheckerboard: {
        long long parity = 0;
        for (int i = 0; i < D; ++i) {
          parity += (long long)std::floor(x[i] / cell);
          parity += (long long)std::floor(y[i] / cell);
        }
        return (parity & 1) ? 1.0 / lam : lam;
      }
      case Kind::kSeededRandom: {
        std::uint64_t ka = cell_key(x), kb = cell_key(y);
        if (ka > kb) std::swap(ka, kb);
        std::uint64_t h = Rng::mix(Rng::mix(seed + ka) + kb);
        double u = double(h >> 11) * 0x1.0p-53;
        return 1.0 / lam + u * (lam - 1.0 / lam);
      }
    }
    return 1.0;
  }

 private:
  std::uint64_t cell_key(const Vec<D>& x) const {
    std::uint64_t k = 0xcbf29ce484222325ull;
    for (int i = 0; i < D; ++i) {
      auto q = (std::int64_t)std::floor(x[i] / cell);
      k = (k ^ std::uint64_t(q)) * 0x100000001b3ull;
    }
    return k;
  }
};

// Strongly coupled nonlocal p-Laplace problem: minimize over fields
// vanishing outside omega the energy whose first variation pairs the
// projected difference of u against that of the test field.
template <int D>
struct NonlocalProblem {
  SeminormParams prm{0.4, 2.0};
  BallDomain<D> omega{{}, 1.0};
  Coefficient<D> coeff{};
  SmoothField<D> force = fields::zero_field<D>();

  double p_prime() const { return prm.p / (prm.p - 1.0); }
  double p_prime_star() const {
    double pp = p_prime();
    return pp * D / (D + pp * prm.s);
  }

  void validate() const {
    prm.validate(true, D);
    if (!(prm.p >= 2.0))
      throw DegenerateParameters("nonlocal problem: p must be at least 2");
    coeff.validate();
  }
};

// Cell-centered lattice over a square box; nodes carry weight h^d.
template <int D>
struct Grid {
  Box<D> box{};
  int n = 17;

  double h() const { return (box.hi[0] - box.lo[0]) / n; }
  double weight() const { return std::pow(h(), D); }

  std::uint64_t total() const {
    std::uint64_t t = 1;
    for (int i = 0; i < D; ++i) t *= std::uint64_t(n);
    return t;
  }

  Vec<D> node(std::uint64_t flat) const {
    Vec<D> x;
    for (int i = 0; i < D; ++i) {
      x[i] = box.lo[i] + (double(flat % n) + 0.5) * h();
      flat /= n;
    }
    return x;
  }

  void validate() const {
    if (n < 8 || n > 96)
      throw DegenerateParameters("grid: nodes per axis out of range");
    double w = box.hi[0] - box.lo[0];
    for (int i = 0; i < D; ++i) {
      if (!(box.hi[i] - box.lo[i] > 0.0) ||
          std::abs((box.hi[i] - box.lo[i]) - w) > 1e-12 * w)
        throw DegenerateParameters("grid: box must be square");
    }
  }
};

// Nodal trial field: values are free inside omega and frozen to exactly
// zero elsewhere, which realizes the complement constraint of the
// variational setting on the truncated box.
template <int D>
struct DiscreteField {
  Grid<D> grid{};
  std::vector<Vec<D>> values;
  std::vector<std::uint8_t> is_free;
  std::uint64_t n_free = 0;

  void enforce_frozen() {
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!is_free[i]) values[i] = Vec<D>{};
  }
};

template <int D>
DiscreteField<D> make_discrete_field(const Grid<D>& grid,
                                     const BallDomain<D>& omega) {
  grid.validate();
  if (2.0 * omega.radius / grid.h() < 9.0)
    throw DegenerateParameters(
        "grid: fewer than 9 free nodes per axis across omega");
  DiscreteField<D> df;
  df.grid = grid;
  df.values.assign(grid.total(), Vec<D>{});
  df.is_free.assign(grid.total(), 0);
  for (std::uint64_t i = 0; i < grid.total(); ++i) {
    if (omega.contains(grid.node(i))) {
      df.is_free[i] = 1;
      ++df.n_free;
    }
  }
  if (df.n_free == 0)
    throw DegenerateParameters("grid: omega contains no nodes");
  return df;
}

// Precomputed interaction table.  Pairs with both endpoints frozen never
// move any value, so only pairs touching at least one free node are kept;
// c already folds both node weights and the kernel.
template <int D>
struct PairTable {
  struct Entry {
    std::uint32_t i, j;
    double c;
    Vec<D> e;
  };
  std::vector<Entry> entries;
  std::vector<Vec<D>> nodes;
  double node_weight = 0.0;
};

template <int D>
PairTable<D> build_pair_table(const DiscreteField<D>& df,
                              const NonlocalProblem<D>& prob) {
  prob.validate();
  const std::uint64_t n = df.grid.total();
  PairTable<D> tab;
  tab.node_weight = df.grid.weight();
  tab.nodes.resize(n);
  for (std::uint64_t i = 0; i < n; ++i) tab.nodes[i] = df.grid.node(i);

  double w2 = tab.node_weight * tab.node_weight;
  double expo = double(D) + prob.prm.sp();
  for (std::uint64_t i = 0; i < n; ++i) {
    for (std::uint64_t j = i + 1; j < n; ++j) {
      if (!df.is_free[i] && !df.is_free[j]) continue;
      Vec<D> diff = tab.nodes[i] - tab.nodes[j];
      double r = norm(diff);
      double c = w2 * prob.coeff(tab.nodes[i], tab.nodes[j]) *
                 std::pow(r, -expo);
      tab.entries.push_back(
          {std::uint32_t(i), std::uint32_t(j), c, (1.0 / r) * diff});
    }
  }
  return tab;
}

namespace detail {

constexpr std::uint64_t kPairBlock = 65536;

template <int D>
double projected_jump(const PairTable<D>& tab,
                      const typename PairTable<D>::Entry& en,
                      const std::vector<Vec<D>>& v) {
  return dot(v[en.i] - v[en.j], en.e);
}

}  // namespace detail

// (1/p)-scaled interaction energy minus the load term; ordered pairs are
// folded into the unordered table by the factor 2.
template <int D>
double energy(const DiscreteField<D>& df, const PairTable<D>& tab,
              const NonlocalProblem<D>& prob, int n_threads = 1) {
  const double p = prob.prm.p;
  const std::uint64_t blocks =
      (tab.entries.size() + detail::kPairBlock - 1) / detail::kPairBlock;
  auto sums = blocked_parallel_sum<1>(
      std::max<std::uint64_t>(blocks, 1), n_threads, [&](std::uint64_t b) {
        Neumaier acc;
        std::uint64_t lo = b * detail::kPairBlock;
        std::uint64_t hi =
            std::min<std::uint64_t>(tab.entries.size(), lo + detail::kPairBlock);
        for (std::uint64_t k = lo; k < hi; ++k) {
          const auto& en = tab.entries[k];
          double d = detail::projected_jump<D>(tab, en, df.values);
          acc.add(en.c * std::pow(std::abs(d), p));
        }
        return std::array<double, 1>{acc.value()};
      });
  double interaction = 2.0 / p * sums[0];
  if (!std::isfinite(interaction))
    throw NonFiniteSample("nonlocal energy: interaction sum is not finite");

  Neumaier load;
  for (std::uint64_t i = 0; i < df.grid.total(); ++i) {
    if (!df.is_free[i]) continue;
    load.add(tab.node_weight * dot(prob.force(tab.nodes[i]), df.values[i]));
  }
  return interaction - load.value();
}

// Nodal gradient of the energy; frozen components are identically zero.
// Blocks of the pair table accumulate into private buffers merged in fixed
// order, so the result is bit-identical for any thread count.
template <int D>
std::vector<Vec<D>> energy_gradient(const DiscreteField<D>& df,
                                    const PairTable<D>& tab,
                                    const NonlocalProblem<D>& prob,
                                    int n_threads = 1) {
  const double p = prob.prm.p;
  const std::uint64_t n = df.grid.total();
  const std::uint64_t blocks = std::max<std::uint64_t>(
      (tab.entries.size() + detail::kPairBlock - 1) / detail::kPairBlock, 1);

  std::vector<std::vector<Vec<D>>> partial(blocks);
  auto marks = blocked_parallel_sum<1>(blocks, n_threads, [&](std::uint64_t b) {
    auto& g = partial[b];
    g.assign(n, Vec<D>{});
    std::uint64_t lo = b * detail::kPairBlock;
    std::uint64_t hi =
        std::min<std::uint64_t>(tab.entries.size(), lo + detail::kPairBlock);
    for (std::uint64_t k = lo; k < hi; ++k) {
      const auto& en = tab.entries[k];
      double d = detail::projected_jump<D>(tab, en, df.values);
      double t = 2.0 * en.c * std::pow(std::abs(d), p - 2.0) * d;
      for (int c = 0; c < D; ++c) {
        g[en.i][c] += t * en.e[c];
        g[en.j][c] -= t * en.e[c];
      }
    }
    return std::array<double, 1>{0.0};
  });
  (void)marks;

  std::vector<Vec<D>> grad(n, Vec<D>{});
  for (std::uint64_t b = 0; b < blocks; ++b)
    for (std::uint64_t i = 0; i < n; ++i) grad[i] += partial[b][i];

  for (std::uint64_t i = 0; i < n; ++i) {
    if (!df.is_free[i]) {
      grad[i] = Vec<D>{};
      continue;
    }
    grad[i] = grad[i] - tab.node_weight * prob.force(tab.nodes[i]);
    for (int c = 0; c < D; ++c)
      if (!std::isfinite(grad[i][c]))
        throw NonFiniteSample("nonlocal gradient: non-finite component");
  }
  return grad;
}

// First-order pairing of the current iterate against a test field supported
// on free nodes: the discrete weak form of the system evaluated at U.
template <int D>
double weak_residual(const DiscreteField<D>& df, const PairTable<D>& tab,
                     const NonlocalProblem<D>& prob, const SmoothField<D>& phi,
                     int n_threads = 1) {
  auto grad = energy_gradient<D>(df, tab, prob, n_threads);
  Neumaier acc;
  for (std::uint64_t i = 0; i < df.grid.total(); ++i) {
    if (!df.is_free[i]) continue;
    acc.add(dot(grad[i], phi(tab.nodes[i])));
  }
  return acc.value();
}

// Discrete Sobolev-type scale of a test field, used to normalize weak
// residuals: the p-th root of the nodal Gagliardo sum plus the nodal Lp
// norm.
template <int D>
double test_field_scale(const DiscreteField<D>& df, const PairTable<D>& tab,
                        const NonlocalProblem<D>& prob,
                        const SmoothField<D>& phi) {
  const double p = prob.prm.p;
  std::vector<Vec<D>> ph(df.grid.total());
  for (std::uint64_t i = 0; i < df.grid.total(); ++i)
    ph[i] = df.is_free[i] ? phi(tab.nodes[i]) : Vec<D>{};
  Neumaier semi;
  for (const auto& en : tab.entries) {
    double scale = en.c * 2.0;
    semi.add(scale * std::pow(norm(ph[en.i] - ph[en.j]), p));
  }
  Neumaier lp;
  for (std::uint64_t i = 0; i < df.grid.total(); ++i)
    lp.add(tab.node_weight * std::pow(norm(ph[i]), p));
  return std::pow(semi.value(), 1.0 / p) + std::pow(lp.value(), 1.0 / p);
}

struct SolveReport {
  double final_energy = 0.0;
  std::vector<double> energy_trace;
  std::vector<double> grad_norm_trace;
  std::vector<double> residual_panel;
  std::vector<double> residual_scales;
  int iterations = 0;
  bool converged = false;
  double wall_seconds = 0.0;
};

namespace detail {

template <int D>
double free_dot(const DiscreteField<D>& df, const std::vector<Vec<D>>& a,
                const std::vector<Vec<D>>& b) {
  Neumaier acc;
  for (std::uint64_t i = 0; i < a.size(); ++i)
    if (df.is_free[i]) acc.add(dot(a[i], b[i]));
  return acc.value();
}

// Random bump fields compactly supported in omega, for the residual panel.
template <int D>
SmoothField<D> panel_field(const BallDomain<D>& omega, std::uint64_t seed,
                           int index) {
  Rng rng{derive_key(seed, hash_label("nonlocal/panel") +
                               std::uint64_t(index)),
          0};
  std::vector<fields::BumpAtom<D>> atoms(2);
  for (auto& a : atoms) {
    a.center = sample_ball<D>(rng, omega.center, 0.5 * omega.radius);
    a.radius = omega.radius * rng.uniform(0.2, 0.35);
    for (int c = 0; c < D; ++c) a.amp[c] = rng.uniform(-1.0, 1.0);
    for (auto& s : a.skew) s = rng.uniform(-1.0, 1.0);
    a.radial = rng.uniform(-0.5, 0.5);
  }
  return fields::bump_field<D>("panel" + std::to_string(index), atoms);
}

}  // namespace detail

// Energy minimization by Polak-Ribiere conjugate gradients with restart on
// non-descent directions and Armijo backtracking.  Descent is enforced by
// the acceptance test, so the energy trace is nonincreasing by
// construction; a failed backtrack signals a broken gradient, not data.
template <int D>
std::pair<DiscreteField<D>, SolveReport> solve(const NonlocalProblem<D>& prob,
                                               const Grid<D>& grid, double tol,
                                               int max_iter,
                                               std::uint64_t seed,
                                               int n_threads = 1) {
  if (!(tol > 0.0))
    throw DegenerateParameters("solve: tolerance must be positive");
  auto t0 = std::chrono::steady_clock::now();

  auto df = make_discrete_field<D>(grid, prob.omega);
  auto tab = build_pair_table<D>(df, prob);
  SolveReport rep;

  const double c1 = 1e-4;
  auto grad = energy_gradient<D>(df, tab, prob, n_threads);
  double gn2 = detail::free_dot<D>(df, grad, grad);
  double e0 = energy<D>(df, tab, prob, n_threads);
  rep.energy_trace.push_back(e0);
  rep.grad_norm_trace.push_back(std::sqrt(gn2));

  std::vector<Vec<D>> dir(grad.size());
  for (std::uint64_t i = 0; i < grad.size(); ++i) dir[i] = -1.0 * grad[i];
  double alpha = 1.0;

  DiscreteField<D> trial = df;
  while (rep.grad_norm_trace.back() > tol && rep.iterations < max_iter) {
    double gd = detail::free_dot<D>(df, grad, dir);
    if (gd >= 0.0) {
      for (std::uint64_t i = 0; i < grad.size(); ++i) dir[i] = -1.0 * grad[i];
      gd = -gn2;
    }

    alpha = std::min(2.0 * alpha, 1e8);
    double e1 = 0.0;
    for (;;) {
      for (std::uint64_t i = 0; i < df.values.size(); ++i) {
        if (df.is_free[i])
          trial.values[i] = df.values[i] + alpha * dir[i];
      }
      e1 = energy<D>(trial, tab, prob, n_threads);
      if (e1 <= e0 + c1 * alpha * gd) break;
      alpha *= 0.5;
      if (alpha < 1e-18)
        throw std::runtime_error(
            "solve: backtracking exhausted on a descent direction");
    }
    std::swap(df.values, trial.values);
    e0 = e1;
    ++rep.iterations;
    rep.energy_trace.push_back(e0);

    auto grad_new = energy_gradient<D>(df, tab, prob, n_threads);
    double gn2_new = detail::free_dot<D>(df, grad_new, grad_new);
    double mixed = detail::free_dot<D>(df, grad_new, grad);
    double beta = std::max(0.0, (gn2_new - mixed) / gn2);
    for (std::uint64_t i = 0; i < grad.size(); ++i)
      dir[i] = -1.0 * grad_new[i] + beta * dir[i];
    grad = std::move(grad_new);
    gn2 = gn2_new;
    rep.grad_norm_trace.push_back(std::sqrt(gn2));
  }
  rep.converged = rep.grad_norm_trace.back() <= tol;
  df.enforce_frozen();
  rep.final_energy = e0;

  for (int k = 0; k < 10; ++k) {
    auto phi = detail::panel_field<D>(prob.omega, seed, k);
    rep.residual_panel.push_back(
        weak_residual<D>(df, tab, prob, phi, n_threads));
    rep.residual_scales.push_back(test_field_scale<D>(df, tab, prob, phi));
  }
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return {std::move(df), std::move(rep)};
}

// Piecewise-multilinear interpolant of the nodal field, vanishing one cell
// beyond the outermost node ring.
template <int D>
SmoothField<D> interpolant_field(const DiscreteField<D>& df) {
  Grid<D> grid = df.grid;
  auto values = df.values;
  double h = grid.h();

  auto eval = [grid, values, h](const Vec<D>& x) {
    int base[D];
    double frac[D];
    for (int c = 0; c < D; ++c) {
      double t = (x[c] - grid.box.lo[c]) / h - 0.5;
      double fl = std::floor(t);
      base[c] = int(fl);
      frac[c] = t - fl;
    }
    Vec<D> out{};
    for (int corner = 0; corner < (1 << D); ++corner) {
      double wgt = 1.0;
      std::uint64_t flat = 0, stride = 1;
      bool inside = true;
      for (int c = 0; c < D; ++c) {
        int idx = base[c] + ((corner >> c) & 1);
        wgt *= ((corner >> c) & 1) ? frac[c] : 1.0 - frac[c];
        if (idx < 0 || idx >= grid.n) inside = false;
        flat += stride * std::uint64_t(std::max(idx, 0));
        stride *= std::uint64_t(grid.n);
      }
      if (inside && wgt != 0.0) out += wgt * values[flat];
    }
    return out;
  };

  Vec<D> center;
  double span2 = 0.0;
  for (int c = 0; c < D; ++c) {
    center[c] = 0.5 * (grid.box.lo[c] + grid.box.hi[c]);
    double half = 0.5 * (grid.box.hi[c] - grid.box.lo[c]) + h;
    span2 += half * half;
  }
  return {"nodal|interp", eval, {center, std::sqrt(span2)}, nullptr};
}

struct CaccioppoliReport {
  double radius = 0.0;
  double lhs = 0.0;
  double rhs_mass = 0.0;
  double rhs_tail = 0.0;
  double rhs_force = 0.0;
  double ratio = 0.0;
  bool degenerate = false;
  std::uint64_t nodes_in_ball = 0;
};

// Energy localization diagnostic: the cutoff-localized Gagliardo sum over
// the ball against the mass, exterior-tail, and force terms that bound it.
// All four pieces are plain nodal sums, so refinement studies compare like
// with like.
template <int D>
CaccioppoliReport caccioppoli_check(const DiscreteField<D>& df,
                                    const NonlocalProblem<D>& prob,
                                    const BallDomain<D>& ball,
                                    const fields::CutoffFunction<D>& psi) {
  prob.validate();
  if (dist(psi.ball.center, ball.center) > 1e-12 ||
      std::abs(psi.ball.radius - ball.radius) > 1e-12)
    throw DegenerateParameters("caccioppoli: cutoff must live on the ball");
  const double p = prob.prm.p;
  const double sp = prob.prm.sp();
  const double w = df.grid.weight();

  CaccioppoliReport rep;
  rep.radius = ball.radius;

  std::vector<std::uint64_t> in_ball;
  for (std::uint64_t i = 0; i < df.grid.total(); ++i)
    if (ball.contains(df.grid.node(i))) in_ball.push_back(i);
  rep.nodes_in_ball = in_ball.size();

  Neumaier lhs;
  for (std::size_t a = 0; a < in_ball.size(); ++a) {
    Vec<D> xa = df.grid.node(in_ball[a]);
    Vec<D> va = psi(xa) * df.values[in_ball[a]];
    for (std::size_t b = a + 1; b < in_ball.size(); ++b) {
      Vec<D> xb = df.grid.node(in_ball[b]);
      Vec<D> vb = psi(xb) * df.values[in_ball[b]];
      double r = dist(xa, xb);
      lhs.add(2.0 * w * w * std::pow(norm(va - vb), p) *
              std::pow(r, -double(D) - sp));
    }
  }
  rep.lhs = lhs.value();

  Neumaier mass, small_mass, tail, favg;
  for (auto i : in_ball) {
    mass.add(w * std::pow(norm(df.values[i]), p));
    small_mass.add(w * norm(df.values[i]));
    favg.add(w * std::pow(norm(prob.force(df.grid.node(i))),
                          prob.p_prime_star()));
  }
  rep.rhs_mass = std::pow(ball.radius, -sp) * mass.value();

  for (std::uint64_t i = 0; i < df.grid.total(); ++i) {
    if (ball.contains(df.grid.node(i))) continue;
    double u_norm = norm(df.values[i]);
    if (u_norm == 0.0) continue;
    double r = dist(df.grid.node(i), ball.center);
    tail.add(w * std::pow(u_norm, p - 1.0) *
             std::pow(r, -double(D) - sp));
  }
  rep.rhs_tail = tail.value() * small_mass.value();

  double ball_vol = w * double(in_ball.size());
  double sp_prime = prob.prm.s * prob.p_prime();
  if (ball_vol > 0.0) {
    double mean = favg.value() / ball_vol;
    rep.rhs_force = std::pow(ball.radius, double(D) + sp_prime) *
                    std::pow(mean, prob.p_prime() / prob.p_prime_star());
  }

  double denom = rep.rhs_mass + rep.rhs_tail + rep.rhs_force;
  if (denom > 0.0) {
    rep.ratio = rep.lhs / denom;
  } else {
    rep.degenerate = true;
  }
  return rep;
}

struct PoincareSobolevReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double q_star = 0.0;
  bool degenerate = false;
};

// Fractional Poincare-Sobolev ratio on a ball: the q*-mean of v/r^t
// against the mixed mean-integral Gagliardo functional of order (t, q).
// The inner integral carries the ball-average normalization, the outer one
// does not.
template <int D>
PoincareSobolevReport poincare_sobolev_check(const SmoothField<D>& v,
                                             const BallDomain<D>& ball,
                                             double t, double q,
                                             std::uint64_t pair_budget,
                                             std::uint64_t mean_budget,
                                             std::uint64_t seed,
                                             int n_threads = 1) {
  if (!(t > 0.0) || !(t < 1.0) || !(q >= 1.0))
    throw DegenerateParameters("poincare-sobolev: need 0 < t < 1 and q >= 1");
  if (!(t * q < double(D)))
    throw DegenerateParameters("poincare-sobolev: requires tq < d");

  PoincareSobolevReport rep;
  rep.q_star = double(D) * q / (double(D) - t * q);
  auto region = quadrature::ball_region<D>(ball);
  double vol = ball.volume();

  auto mean = quadrature::estimate_region_integral<D>(
      [v, qs = rep.q_star](const Vec<D>& x) {
        return std::pow(norm(v(x)), qs);
      },
      region, mean_budget, label_seed(seed, "ps/mean"), n_threads);
  rep.lhs = std::pow(mean.value / vol, 1.0 / rep.q_star) /
            std::pow(ball.radius, t);

  auto plan = quadrature::make_pair_plan(region.diameter, pair_budget);
  auto dbl = quadrature::estimate_pair_integral<D>(
      [v, q, t](const Vec<D>& x, const Vec<D>& y) {
        return std::pow(norm(v(x) - v(y)), q) *
               std::pow(dist(x, y), -double(D) - t * q);
      },
      region, plan, label_seed(seed, "ps/pair"), n_threads);
  rep.rhs = std::pow(dbl.value / vol, 1.0 / q);

  if (rep.lhs == 0.0 && rep.rhs == 0.0) {
    rep.degenerate = true;
    return rep;
  }
  rep.ratio = rep.lhs / rep.rhs;
  return rep;
}

struct DualPairRow {
  double delta = 0.0;
  double value = 0.0;
  double std_error = 0.0;
  double value_doubled = 0.0;
  bool stable = false;
};

struct DualPairReport {
  double eps = 0.0;
  std::vector<DualPairRow> rows;
  double largest_stable_delta = 0.0;
  bool any_stable = false;
};

// Self-improvement diagnostic through the dual pair: the (p+delta)-mass of
// the quotient U(x,y) = |u(x)-u(y)| / |x-y|^{s+eps} under the measure with
// density |x-y|^{-(d-eps p)}, which collapses to the plain Gagliardo
// p-seminorm over the ball at delta = 0.  Each delta is probed at the base
// budget and at twice the budget; agreement marks it stable.
template <int D>
DualPairReport dual_pair_diagnostic(const SmoothField<D>& u,
                                    const BallDomain<D>& ball,
                                    const SeminormParams& prm, double eps,
                                    const std::vector<double>& deltas,
                                    std::uint64_t pair_budget,
                                    std::uint64_t seed, int n_threads = 1) {
  prm.validate();
  if (!(eps > 0.0) || !(eps < 1.0 - prm.s))
    throw DegenerateParameters("dual pair: eps must lie in (0, 1-s)");

  DualPairReport rep;
  rep.eps = eps;
  auto region = quadrature::ball_region<D>(ball);

  for (std::size_t k = 0; k < deltas.size(); ++k) {
    double delta = deltas[k];
    if (delta < 0.0)
      throw DegenerateParameters("dual pair: delta must be nonnegative");
    double expo = double(D) + (prm.p + delta) * prm.s + delta * eps;
    auto g = [u, q = prm.p + delta, expo](const Vec<D>& x, const Vec<D>& y) {
      return std::pow(norm(u(x) - u(y)), q) * std::pow(dist(x, y), -expo);
    };
    std::uint64_t sd = label_seed(seed + k, "dual/delta");
    auto base = quadrature::estimate_pair_integral<D>(
        g, region, quadrature::make_pair_plan(region.diameter, pair_budget),
        sd, n_threads);
    auto twice = quadrature::estimate_pair_integral<D>(
        g, region,
        quadrature::make_pair_plan(region.diameter, 2 * pair_budget), sd,
        n_threads);

    DualPairRow row;
    row.delta = delta;
    row.value = base.value;
    row.std_error = base.std_error;
    row.value_doubled = twice.value;
    double se = std::hypot(base.std_error, twice.std_error);
    row.stable = std::abs(base.value - twice.value) <=
                 std::max(3.0 * se, 0.05 * std::max(base.value, twice.value));
    rep.rows.push_back(row);
    if (row.stable && row.delta >= rep.largest_stable_delta) {
      rep.largest_stable_delta = row.delta;
      rep.any_stable = true;
    }
  }
  return rep;
}

struct NuMassReport {
  std::uint64_t n_pairs = 0;
  std::uint64_t violations = 0;
  std::uint64_t skipped_far = 0;
};

// Per-sample monotonicity of the dual measure in eps: on sub-unit pair
// separations the density |x-y|^{-(d-eps p)} can only shrink when eps
// grows.  Pairs are replayed with common random numbers.
template <int D>
NuMassReport nu_mass_monotone(const BallDomain<D>& ball,
                              const SeminormParams& prm, double eps_lo,
                              double eps_hi, std::uint64_t pair_budget,
                              std::uint64_t seed) {
  prm.validate();
  if (!(eps_lo < eps_hi))
    throw DegenerateParameters("nu mass: need eps_lo < eps_hi");
  auto region = quadrature::ball_region<D>(ball);
  auto plan = quadrature::make_pair_plan(region.diameter, pair_budget);

  NuMassReport rep;
  quadrature::for_each_pair<D>(
      region, plan, seed,
      [&](const Vec<D>& x, const Vec<D>& y, double) {
        double r = dist(x, y);
        ++rep.n_pairs;
        if (r >= 1.0) {
          ++rep.skipped_far;
          return;
        }
        double lo = std::pow(r, -(double(D) - eps_lo * prm.p));
        double hi = std::pow(r, -(double(D) - eps_hi * prm.p));
        if (hi > lo) ++rep.violations;
      });
  return rep;
}

}  // namespace kornlab::nonlocal
