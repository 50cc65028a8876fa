#pragma once

#include <functional>
#include <string>

#include "kornlab/core.hpp"

namespace kornlab::geometry {

// Lipschitz graph profile f : R^{d-1} -> R with a certified bound
// lipschitz >= sup |grad f|.  DM1 is the graph's domain dimension d-1.
template <int DM1>
struct Profile {
  std::string name;
  double lipschitz = 0.0;
  std::function<double(const Vec<DM1>&)> f;

  double operator()(const Vec<DM1>& xp) const { return f(xp); }
};

template <int DM1>
Profile<DM1> zero_profile() {
  return {"zero", 0.0, [](const Vec<DM1>&) { return 0.0; }};
}

// amp * sin(freq * x_1); sup |grad f| = |amp * freq|.
template <int DM1>
Profile<DM1> sine_profile(double amp, double freq) {
  return {"sine", std::abs(amp * freq),
          [=](const Vec<DM1>& xp) { return amp * std::sin(freq * xp[0]); }};
}

// Affine slope a in x_1 clipped smoothly at scale w:
// f = a*w*tanh(x_1/w); derivative a*sech^2(x_1/w) peaks at |a|.
template <int DM1>
Profile<DM1> tanh_profile(double slope, double width) {
  return {"tanh", std::abs(slope), [=](const Vec<DM1>& xp) {
            return slope * width * std::tanh(xp[0] / width);
          }};
}

// Smoothed radial ridge amp*(exp(-|x'|^2/(2 w^2)) - 1); vanishes with zero
// gradient at the origin, sup |grad f| = |amp| e^{-1/2} / w attained at
// |x'| = w.
template <int DM1>
Profile<DM1> ridge_profile(double amp, double width) {
  return {"ridge", std::abs(amp) * std::exp(-0.5) / width,
          [=](const Vec<DM1>& xp) {
            return amp * (std::exp(-0.5 * norm2(xp) / (width * width)) - 1.0);
          }};
}

// Convenience registry used by the command line and by parameter sweeps.
template <int DM1>
Profile<DM1> make_profile(const std::string& name, double a, double b) {
  if (name == "zero") return zero_profile<DM1>();
  if (name == "sine") return sine_profile<DM1>(a, b);
  if (name == "tanh") return tanh_profile<DM1>(a, b);
  if (name == "ridge") return ridge_profile<DM1>(a, b);
  throw DegenerateParameters("unknown profile: " + name);
}

}  // namespace kornlab::geometry
