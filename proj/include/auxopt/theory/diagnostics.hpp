#pragma once

#include <span>
#include <stdexcept>

#include "auxopt/core/oracle.hpp"
#include "auxopt/optimizers/cycles.hpp"
#include "auxopt/optimizers/state.hpp"

namespace auxopt::theory {

struct CycleDiagnostics {
  double E = 0.0;      // ||m^t - target(x^{t-1})||^2
  double Delta = 0.0;  // ||x^t - x^{t-1}||^2
  double G = 0.0;      // (1/K) sum_{k<K} ||grad f(y_k)||^2
};

/// Diagnostics of the cycle that produced `state`.
///
/// `inner_iterates` holds y_0 .. y_K of that cycle. The momentum error is
/// measured against grad f - grad h for the auxiliary methods and against
/// grad f for methods whose momentum tracks f.
inline CycleDiagnostics diagnostics(const optimizers::OptimizerState& state,
                                    const OraclePair& oracle,
                                    std::span<const Vector> inner_iterates,
                                    optimizers::MomentumTarget target =
                                        optimizers::MomentumTarget::f_minus_h) {
  const auto& gf = oracle.require_exact_f("diagnostics");
  const auto& gh = oracle.require_exact_h("diagnostics");
  CycleDiagnostics d;
  switch (target) {
    case optimizers::MomentumTarget::f_minus_h:
      d.E = squared_distance(state.m, gf(state.x_prev) - gh(state.x_prev));
      break;
    case optimizers::MomentumTarget::f:
      d.E = squared_distance(state.m, gf(state.x_prev));
      break;
    case optimizers::MomentumTarget::h:
      d.E = squared_distance(state.m, gh(state.x_prev));
      break;
    case optimizers::MomentumTarget::none:
      d.E = 0.0;
      break;
  }
  d.Delta = squared_distance(state.x, state.x_prev);
  if (inner_iterates.size() >= 2) {
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < inner_iterates.size(); ++k) {
      acc += gf(inner_iterates[k]).squared_norm();
    }
    d.G = acc / static_cast<double>(inner_iterates.size() - 1);
  } else {
    d.G = gf(state.x).squared_norm();
  }
  return d;
}

}  // namespace auxopt::theory
