#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

namespace kornlab::optimize {

struct NelderMeadResult {
  std::vector<double> best_x;
  double best_value = 0.0;
  std::uint64_t n_evals = 0;
};

// Downhill simplex with the standard reflection / expansion / contraction /
// shrink coefficients.  Fully deterministic given the starting point; the
// iteration count is the only stopping rule so runs are reproducible across
// platforms regardless of floating-point tie behaviour.
template <class F>
NelderMeadResult nelder_mead(F&& f, const std::vector<double>& x0,
                             double initial_step, int max_iters) {
  const std::size_t n = x0.size();
  const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

  struct Vertex {
    std::vector<double> x;
    double value;
  };
  std::vector<Vertex> simplex(n + 1);
  NelderMeadResult res;
  res.best_x = x0;
  res.best_value = std::numeric_limits<double>::infinity();

  auto eval = [&](const std::vector<double>& x) {
    double v = f(x);
    ++res.n_evals;
    if (v < res.best_value) {
      res.best_value = v;
      res.best_x = x;
    }
    return v;
  };

  simplex[0] = {x0, eval(x0)};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> x = x0;
    x[i] += initial_step;
    simplex[i + 1] = {x, eval(x)};
  }

  for (int iter = 0; iter < max_iters; ++iter) {
    std::sort(simplex.begin(), simplex.end(),
              [](const Vertex& a, const Vertex& b) { return a.value < b.value; });
    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i].x[j];
    }
    for (auto& c : centroid) c /= double(n);

    auto blend = [&](const std::vector<double>& far, double t) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = centroid[j] + t * (far[j] - centroid[j]);
      return x;
    };

    const Vertex& worst = simplex[n];
    std::vector<double> xr = blend(worst.x, -alpha);
    double fr = eval(xr);
    if (fr < simplex[0].value) {
      std::vector<double> xe = blend(worst.x, -gamma);
      double fe = eval(xe);
      simplex[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
      continue;
    }
    if (fr < simplex[n - 1].value) {
      simplex[n] = {xr, fr};
      continue;
    }
    std::vector<double> xc = blend(worst.x, rho);
    double fc = eval(xc);
    if (fc < worst.value) {
      simplex[n] = {xc, fc};
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j)
        x[j] = simplex[0].x[j] + sigma * (simplex[i].x[j] - simplex[0].x[j]);
      simplex[i] = {x, eval(x)};
    }
  }
  return res;
}

}  // namespace kornlab::optimize
