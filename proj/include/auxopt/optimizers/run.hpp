#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "auxopt/core/oracle.hpp"
#include "auxopt/optimizers/cycles.hpp"
#include "auxopt/theory/diagnostics.hpp"

namespace auxopt::optimizers {

/// One recorded iterate: y^t_k after inner step k of cycle t. The row
/// (0, 0) holds x^0 and (t, K) holds x^t.
struct TrajectoryRow {
  long t = 0;
  long k = 0;
  double f_value = 0.0;
  double grad_norm_sq = 0.0;
  double E_t = 0.0;
  double Delta_t = 0.0;  // ||y^t_k - x^{t-1}||^2
  long calls_f = 0;
  long calls_h = 0;
  long calls_fmh = 0;
};

struct CycleSummary {
  long t = 0;
  double E = 0.0;
  double Delta = 0.0;
  double G = 0.0;
  double f_value = 0.0;       // f(x^t)
  double grad_norm_sq = 0.0;  // ||grad f(x^t)||^2
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<CycleSummary> cycles;
  OptimizerState final_state;
  OptimizerConfig config;

  double final_grad_norm_sq() const {
    return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().grad_norm_sq;
  }
  double final_f_value() const {
    return rows.empty() ? std::numeric_limits<double>::quiet_NaN() : rows.back().f_value;
  }

  /// First cycle t with ||grad f(x^t)||^2 < threshold, or -1.
  long cycles_to_threshold(double threshold) const {
    for (const auto& c : cycles) {
      if (c.grad_norm_sq < threshold) return c.t;
    }
    if (!rows.empty() && rows.front().grad_norm_sq < threshold) return 0;
    return -1;
  }
};

/// Raised when an iterate blows up; carries everything recorded before it.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}

  const Trajectory& partial() const noexcept { return partial_; }

 private:
  Trajectory partial_;
};

inline constexpr double kDivergenceThreshold = 1e12;

/// Runs cfg.T cycles from x0. Cycle t (1-based) draws from stream_fork(token, t);
/// m^0 draws from stream_fork(token, 0).
///
/// With exact gradients available the rows carry f and ||grad f||^2 at every
/// inner iterate; otherwise those columns are NaN. E_t is NaN when
/// diagnostics are off or exact gradients are missing.
inline Trajectory run(const OraclePair& oracle, const Vector& x0, const OptimizerConfig& cfg,
                      const RandomToken& token, bool diagnostics_on = true) {
  cfg.validate();
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  const bool exact = oracle.has_exact();
  auto f_at = [&](const Vector& v) { return oracle.value_f ? (*oracle.value_f)(v) : nan; };
  auto g2_at = [&](const Vector& v) {
    return oracle.exact_grad_f ? (*oracle.exact_grad_f)(v).squared_norm() : nan;
  };

  Trajectory traj;
  traj.config = cfg;
  traj.rows.reserve(static_cast<std::size_t>(cfg.T) * static_cast<std::size_t>(cfg.K) + 1);

  auto diverged = [&](const std::string& why) -> DivergenceError {
    return DivergenceError(why, traj);
  };

  OptimizerState state;
  try {
    state = initial_state(oracle, x0, cfg, stream_fork(token, 0));
  } catch (const NonFiniteError& e) {
    throw diverged(std::string("non-finite momentum initialization: ") + e.what());
  }
  double E0 = nan;
  if (diagnostics_on && exact) {
    E0 = theory::diagnostics(state, oracle, {}, initial_momentum_target(cfg)).E;
  }
  traj.rows.push_back({0, 0, f_at(x0), g2_at(x0), E0, 0.0, 0, 0, 0});

  CycleTrace trace;
  for (long t = 1; t <= cfg.T; ++t) {
    const Vector snapshot = state.x;
    try {
      state = cycle(std::move(state), oracle, cfg, stream_fork(token, static_cast<std::uint64_t>(t)),
                    &trace);
    } catch (const NonFiniteError& e) {
      traj.final_state = state;
      throw diverged("cycle " + std::to_string(t) + ": " + e.what());
    }

    double E = nan;
    CycleSummary summary;
    summary.t = t;
    if (diagnostics_on && exact) {
      const auto d =
          theory::diagnostics(state, oracle, trace.iterates, cycle_momentum_target(cfg, t));
      E = d.E;
      summary.E = d.E;
      summary.Delta = d.Delta;
      summary.G = d.G;
    } else {
      summary.E = nan;
      summary.Delta = squared_distance(state.x, snapshot);
      summary.G = nan;
    }

    for (std::size_t k = 1; k < trace.iterates.size(); ++k) {
      const Vector& y = trace.iterates[k];
      const double fv = f_at(y);
      if (std::isfinite(fv) ? fv > kDivergenceThreshold : oracle.value_f.has_value()) {
        traj.final_state = state;
        throw diverged("cycle " + std::to_string(t) + ": f exceeded divergence threshold");
      }
      const auto& c = trace.counters[k - 1];
      traj.rows.push_back({t, static_cast<long>(k), fv, g2_at(y), E,
                           squared_distance(y, snapshot), c[0], c[1], c[2]});
    }
    summary.f_value = traj.rows.back().f_value;
    summary.grad_norm_sq = traj.rows.back().grad_norm_sq;
    traj.cycles.push_back(summary);
  }
  traj.final_state = std::move(state);
  return traj;
}

}  // namespace auxopt::optimizers
