#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "auxopt/core/random.hpp"
#include "auxopt/core/vector.hpp"

namespace auxopt::theory {

using GradientFn = std::function<Vector(const Vector&)>;

/// `count` points with i.i.d. N(0, radius^2) coordinates.
inline std::vector<Vector> make_probe_points(std::size_t dim, std::size_t count,
                                             double radius, const RandomToken& token) {
  std::vector<Vector> points;
  points.reserve(count);
  for (std::size_t p = 0; p < count; ++p) {
    NoiseStream stream(stream_fork(token, p));
    std::vector<double> v(dim);
    for (double& c : v) c = radius * stream.next_gaussian();
    points.emplace_back(std::move(v));
  }
  return points;
}

struct DeltaEstimateOptions {
  int restarts = 5;          // random start directions per probe point
  int max_iterations = 500;
  double tolerance = 1e-8;   // relative change of the eigenvalue estimate
  double step_scale = 1e-4;  // finite-difference step is step_scale * (1 + ||x||)
  double zero_floor = 1e-9;  // ||Hv|| below this is finite-difference noise; stop there
  RandomToken token{0x5eed, 0};
};

/// Largest |eigenvalue| of the Hessian of f - h, maximized over probe points.
///
/// Hessian-vector products come from central differences of grad f - grad h;
/// power iteration runs on v -> Hv and the estimate is ||Hv|| for unit v,
/// which is insensitive to the sign of the dominant eigenvalue.
inline double estimate_delta(const GradientFn& f_grad, const GradientFn& h_grad,
                             const std::vector<Vector>& probes,
                             const DeltaEstimateOptions& opt = {}) {
  if (probes.empty()) throw std::invalid_argument("estimate_delta: empty probe set");
  auto diff = [&](const Vector& x) {
    Vector g = f_grad(x);
    g -= h_grad(x);
    return g;
  };
  double best = 0.0;
  for (std::size_t p = 0; p < probes.size(); ++p) {
    const Vector& x = probes[p];
    const double eps = opt.step_scale * (1.0 + x.norm());
    auto hvp = [&](const Vector& v) {
      Vector hv = diff(x + eps * v);
      hv -= diff(x - eps * v);
      hv *= 1.0 / (2.0 * eps);
      return hv;
    };
    for (int r = 0; r < opt.restarts; ++r) {
      NoiseStream stream(stream_fork(stream_fork(opt.token, p), static_cast<std::uint64_t>(r)));
      std::vector<double> start(x.size());
      for (double& c : start) c = stream.next_gaussian();
      Vector v(std::move(start));
      v *= 1.0 / v.norm();
      double estimate = 0.0;
      for (int it = 0; it < opt.max_iterations; ++it) {
        Vector hv = hvp(v);
        const double norm = hv.norm();
        if (norm <= opt.zero_floor) {
          estimate = std::max(estimate, norm);
          break;
        }
        const bool converged =
            it > 0 && std::abs(norm - estimate) <= opt.tolerance * std::max(norm, 1e-300);
        estimate = norm;
        if (converged) break;
        v = std::move(hv);
        v *= 1.0 / norm;
      }
      best = std::max(best, estimate);
    }
  }
  return best;
}

/// Constants of ||grad f - grad h||^2 <= m ||grad f||^2 + zeta_sq.
struct BiasEstimate {
  double m = 0.0;
  double zeta_sq = 0.0;
};

/// Tightest affine bound over the probes, minimizing the total slack.
///
/// With r_i = ||grad f - grad h||^2 and g_i = ||grad f||^2 at probe i, picks
/// m >= 0 minimizing m * mean(g) + zeta_sq(m), where zeta_sq(m) =
/// max(0, max_i r_i - m g_i). The objective is convex and piecewise linear in
/// m, so only breakpoints are candidates. Probes with ||grad f|| at or below
/// `grad_threshold` only constrain zeta_sq.
inline BiasEstimate estimate_bias(const GradientFn& f_grad, const GradientFn& h_grad,
                                  const std::vector<Vector>& probes,
                                  double grad_threshold = 1e-8) {
  if (probes.empty()) throw std::invalid_argument("estimate_bias: empty probe set");
  std::vector<double> r, g;
  for (const auto& x : probes) {
    const Vector gf = f_grad(x);
    r.push_back(squared_distance(gf, h_grad(x)));
    g.push_back(gf.squared_norm());
  }
  const std::size_t n = r.size();
  double mean_g = 0.0;
  for (double v : g) mean_g += v;
  mean_g /= static_cast<double>(n);

  auto zeta_for = [&](double m) {
    double z = 0.0;
    for (std::size_t i = 0; i < n; ++i) z = std::max(z, r[i] - m * g[i]);
    return z;
  };

  std::vector<double> candidates{0.0};
  const double g_floor = grad_threshold * grad_threshold;
  for (std::size_t i = 0; i < n; ++i) {
    if (g[i] <= g_floor) continue;
    candidates.push_back(r[i] / g[i]);
    for (std::size_t j = 0; j < n; ++j) {
      if (g[j] <= g_floor || g[i] <= g[j]) continue;
      const double slope = (r[i] - r[j]) / (g[i] - g[j]);
      if (slope > 0.0) candidates.push_back(slope);
    }
  }

  BiasEstimate best{0.0, zeta_for(0.0)};
  double best_objective = best.zeta_sq;
  for (double m : candidates) {
    const double z = zeta_for(m);
    const double objective = m * mean_g + z;
    if (objective < best_objective) {
      best_objective = objective;
      best = {m, z};
    }
  }
  // Round-off may leave m g_i + zeta_sq a hair below r_i.
  for (std::size_t i = 0; i < n; ++i) {
    const double deficit = r[i] - (best.m * g[i] + best.zeta_sq);
    if (deficit > 0.0) best.zeta_sq += deficit;
  }
  return best;
}

}  // namespace auxopt::theory
