#pragma once

#include <optional>

#include "auxopt/decentralized/weak_convexity.hpp"
#include "auxopt/harness/experiment.hpp"
#include "auxopt/harness/problem.hpp"
#include "auxopt/theory/estimators.hpp"

namespace auxopt::harness {

struct CheckOptions {
  std::size_t probes = 20;
  double radius = 1.0;
  int restarts = 5;
  int max_iterations = 500;
  std::size_t convexity_points = 200;
};

struct CheckReport {
  double delta_hat = 0.0;
  std::optional<double> delta_exact;
  theory::BiasEstimate bias;
  double smoothness = 0.0;
  decentralized::WeakConvexityReport weak_convexity;  // of f - h with delta_hat
};

/// Estimates the similarity and bias constants of the configured pair.
inline CheckReport check_problem(const ExperimentConfig& cfg, const CheckOptions& opt = {}) {
  const RandomToken tok = repeat_token(cfg.seed, 0);
  const BuiltProblem problem = build_problem(cfg, stream_fork(tok, kProblemLabel));
  const auto& o = problem.oracle;
  o.require_exact_f("check");
  o.require_exact_h("check");
  const auto probes = theory::make_probe_points(o.dim, opt.probes, opt.radius, stream_fork(tok, 10));

  CheckReport report;
  report.smoothness = problem.smoothness;
  report.delta_exact = problem.delta;
  theory::DeltaEstimateOptions dopt;
  dopt.restarts = opt.restarts;
  dopt.max_iterations = opt.max_iterations;
  dopt.token = stream_fork(tok, 11);
  report.delta_hat = theory::estimate_delta(*o.exact_grad_f, *o.exact_grad_h, probes, dopt);
  report.bias = theory::estimate_bias(*o.exact_grad_f, *o.exact_grad_h, probes);
  if (o.value_f && o.value_h) {
    const auto vf = *o.value_f;
    const auto vh = *o.value_h;
    auto diff = [vf, vh](const Vector& x) { return vf(x) - vh(x); };
    // The difference f - h is delta-weakly convex when its Hessian is >= -delta I.
    report.weak_convexity = decentralized::check_weak_convexity(
        diff, o.dim, report.delta_hat * (1.0 + 1e-6), opt.convexity_points, stream_fork(tok, 12),
        opt.radius);
  }
  return report;
}

}  // namespace auxopt::harness
