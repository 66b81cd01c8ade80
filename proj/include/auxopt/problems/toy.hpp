#pragma once

#include <stdexcept>

#include "auxopt/core/oracle.hpp"

namespace auxopt::problems {

/// Affine bound ||grad f - grad h||^2 <= m ||grad f||^2 + zeta_sq.
struct BiasBound {
  double m = 0.0;
  double zeta_sq = 0.0;
};

/// One-dimensional pair f(x) = x^2/2, h(x) = (1+delta)/2 (x - zeta/(1+delta))^2.
///
/// grad f(x) = x and grad h(x) = (1+delta) x - zeta, so the Hessians differ by
/// exactly delta and grad f - grad h = zeta - delta x.
struct ToyProblem {
  double delta = 0.0;
  double zeta = 0.0;
  double smoothness = 1.0;  // L
  BiasBound bias;
  OraclePair oracle;
};

inline ToyProblem make_toy_pair(double delta, double zeta, const NoiseSpec& noise) {
  if (!(delta >= 0.0)) throw std::invalid_argument("make_toy_pair: delta must be >= 0");
  ToyProblem p;
  p.delta = delta;
  p.zeta = zeta;
  p.smoothness = std::max(1.0, 1.0 + delta);
  // (zeta - delta x)^2 <= 2 delta^2 x^2 + 2 zeta^2; tight when delta = 0.
  p.bias = delta == 0.0 ? BiasBound{0.0, zeta * zeta}
                        : BiasBound{2.0 * delta * delta, 2.0 * zeta * zeta};

  const double curvature = 1.0 + delta;
  auto grad_f = [](const Vector& x) { return x; };
  auto grad_h = [curvature, zeta](const Vector& x) {
    Vector g = curvature * x;
    for (std::size_t i = 0; i < g.size(); ++i) g.set(i, g[i] - zeta);
    return g;
  };
  auto value_f = [](const Vector& x) { return 0.5 * x.squared_norm(); };
  auto value_h = [curvature, zeta](const Vector& x) {
    double acc = 0.0;
    for (double v : x) {
      const double shifted = v - zeta / curvature;
      acc += 0.5 * curvature * shifted * shifted;
    }
    return acc;
  };
  p.oracle = make_additive_noise_oracle(1, grad_f, grad_h, value_f, value_h, noise);
  return p;
}

}  // namespace auxopt::problems
