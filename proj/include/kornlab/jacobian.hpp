#pragma once

#include <functional>

#include "kornlab/core.hpp"

namespace kornlab {

// Central finite-difference Jacobian with step h * (1 + |x_j|) per
// coordinate.  Returns J[i][j] = d map_i / d x_j.
template <int D, class Map>
Mat<D> fd_jacobian(const Map& map, const Vec<D>& x, double h = 1e-5) {
  Mat<D> j{};
  for (int col = 0; col < D; ++col) {
    double step = h * (1.0 + std::abs(x[col]));
    Vec<D> xp = x, xm = x;
    xp[col] += step;
    xm[col] -= step;
    Vec<D> fp = map(xp), fm = map(xm);
    for (int row = 0; row < D; ++row)
      j[row][col] = (fp[row] - fm[row]) / (2.0 * step);
  }
  return j;
}

// Central finite-difference gradient of a scalar function.
template <int D, class F>
Vec<D> fd_gradient(const F& f, const Vec<D>& x, double h = 1e-5) {
  Vec<D> g{};
  for (int col = 0; col < D; ++col) {
    double step = h * (1.0 + std::abs(x[col]));
    Vec<D> xp = x, xm = x;
    xp[col] += step;
    xm[col] -= step;
    g[col] = (f(xp) - f(xm)) / (2.0 * step);
  }
  return g;
}

inline double det(const Mat<2>& m) {
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

inline double det(const Mat<3>& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

}  // namespace kornlab
