#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "auxopt/core/oracle.hpp"
#include "auxopt/optimizers/config.hpp"
#include "auxopt/optimizers/state.hpp"

namespace auxopt::optimizers {

/// Token layout inside one cycle. The momentum sample and each helper's
/// inner steps draw from disjoint child streams of the cycle token.
namespace tokens {
inline constexpr std::uint64_t kMomentum = 0;
inline constexpr std::uint64_t kPhaseSwitch = 1;
inline constexpr std::uint64_t kHelperBase = 1000;

inline RandomToken momentum(const RandomToken& cycle) { return stream_fork(cycle, kMomentum); }
inline RandomToken helper(const RandomToken& cycle, std::size_t index) {
  return stream_fork(cycle, kHelperBase + index);
}
inline RandomToken inner(const RandomToken& helper_token, long k) {
  return stream_fork(helper_token, static_cast<std::uint64_t>(k));
}
}  // namespace tokens

/// Which gradient the momentum tracks.
enum class MomentumTarget { f, h, f_minus_h, none };

inline MomentumTarget momentum_target(Algorithm a) {
  switch (a) {
    case Algorithm::AuxMOM:
    case Algorithm::AuxMVR: return MomentumTarget::f_minus_h;
    case Algorithm::AuxMOM_V0:
    case Algorithm::SGDm:
    case Algorithm::MVR:
    case Algorithm::FineTune: return MomentumTarget::f;
    case Algorithm::Naive: return MomentumTarget::f;
    case Algorithm::GD: return MomentumTarget::none;
  }
  return MomentumTarget::none;
}

inline Vector sample_gradient(const OraclePair& oracle, MomentumTarget target,
                              const Vector& x, const RandomToken& token) {
  switch (target) {
    case MomentumTarget::f: return oracle.grad_f(x, token);
    case MomentumTarget::h: return oracle.grad_h(x, token);
    case MomentumTarget::f_minus_h: return oracle.grad_f_minus_h(x, token);
    case MomentumTarget::none: break;
  }
  return Vector::zeros(x.size());
}

/// m^0 for the given target; returns the number of samples consumed.
inline long init_momentum(const OraclePair& oracle, MomentumTarget target, const Vector& x0,
                          MomentumInit mode, int batch, const RandomToken& token, Vector& m) {
  m = Vector::zeros(x0.size());
  if (target == MomentumTarget::none || mode == MomentumInit::zero) return 0;
  if (mode == MomentumInit::single_sample) {
    m = sample_gradient(oracle, target, x0, stream_fork(token, 0));
    return 1;
  }
  for (int i = 0; i < batch; ++i) {
    m += sample_gradient(oracle, target, x0, stream_fork(token, static_cast<std::uint64_t>(i)));
  }
  m *= 1.0 / static_cast<double>(batch);
  return batch;
}

/// Number of FineTune steps spent on h out of the T*K budget.
inline long finetune_helper_steps(const OptimizerConfig& cfg) {
  const double total = static_cast<double>(cfg.T) * cfg.K;
  return static_cast<long>(std::floor(cfg.split_fraction * total + 1e-9));
}

/// What m^0 estimates: nothing for Naive, grad h when FineTune opens on h.
inline MomentumTarget initial_momentum_target(const OptimizerConfig& cfg) {
  if (cfg.algorithm == Algorithm::Naive) return MomentumTarget::none;
  if (cfg.algorithm == Algorithm::FineTune && finetune_helper_steps(cfg) > 0) {
    return MomentumTarget::h;
  }
  return momentum_target(cfg.algorithm);
}

/// What the momentum estimates at the end of cycle t.
inline MomentumTarget cycle_momentum_target(const OptimizerConfig& cfg, long t) {
  if (cfg.algorithm == Algorithm::FineTune &&
      t * static_cast<long>(cfg.K) <= finetune_helper_steps(cfg)) {
    return MomentumTarget::h;
  }
  return momentum_target(cfg.algorithm);
}

/// State at t = 0 with m^0 seeded per cfg.m0_mode.
inline OptimizerState initial_state(const OraclePair& oracle, const Vector& x0,
                                    const OptimizerConfig& cfg, const RandomToken& token) {
  cfg.validate();
  if (x0.size() != oracle.dim) throw DimensionError(oracle.dim, x0.size());
  OptimizerState s;
  s.x_prev = x0;
  s.x = x0;
  s.y = x0;
  s.m = Vector::zeros(x0.size());
  s.init_calls =
      init_momentum(oracle, initial_momentum_target(cfg), x0, cfg.m0_mode, cfg.T, token, s.m);
  return s;
}

/// One step of y - eta (grad h(y) - grad h(x) + grad f(x)) with exact gradients.
inline Vector local_update_step(const Vector& y, const Vector& x_snapshot,
                                const OraclePair& oracle, double eta) {
  const auto& gf = oracle.require_exact_f("local_update_step");
  const auto& gh = oracle.require_exact_h("local_update_step");
  Vector d = gh(y) - gh(x_snapshot) + gf(x_snapshot);
  return y - eta * d;
}

namespace detail {

inline void record(CycleTrace* trace, const Vector& y, const OptimizerState& s) {
  if (trace == nullptr) return;
  trace->iterates.push_back(y);
  trace->counters.push_back({s.calls_f, s.calls_h, s.calls_fmh});
}

inline void begin_trace(CycleTrace* trace, const Vector& y0) {
  if (trace == nullptr) return;
  trace->iterates.assign(1, y0);
  trace->counters.clear();
}

inline void require(const OptimizerConfig& cfg, Algorithm expected, const char* who) {
  if (cfg.algorithm != expected) {
    throw std::invalid_argument(std::string(who) + ": config selects " +
                                std::string(to_string(cfg.algorithm)));
  }
}

/// K steps y <- y - eta (g_h(y) + correction) from y_0 = x, as run by one helper.
inline Vector helper_inner_loop(const Vector& x, const Vector& correction,
                                const OraclePair& oracle, const OptimizerConfig& cfg,
                                const RandomToken& helper_token, OptimizerState& counters,
                                CycleTrace* trace) {
  Vector y = x;
  begin_trace(trace, y);
  for (long k = 0; k < cfg.K; ++k) {
    Vector d = oracle.grad_h(y, tokens::inner(helper_token, k));
    d += correction;
    y.axpy(-cfg.eta, d);
    counters.calls_h += 1;
    record(trace, y, counters);
  }
  return y;
}

inline OptimizerState finish_cycle(OptimizerState s, Vector y_last) {
  s.x_prev = std::move(s.x);
  s.x = y_last;
  s.y = std::move(y_last);
  s.t += 1;
  s.k = 0;
  return s;
}

}  // namespace detail

/// One gradient of f, then K-1 uncorrected helper gradients.
inline OptimizerState naive_cycle(OptimizerState s, const OraclePair& oracle,
                                  const OptimizerConfig& cfg, const RandomToken& token,
                                  CycleTrace* trace = nullptr) {
  detail::require(cfg, Algorithm::Naive, "naive_cycle");
  s.m = oracle.grad_f(s.x, tokens::momentum(token));
  s.calls_f += 1;
  Vector y = s.x;
  detail::begin_trace(trace, y);
  y.axpy(-cfg.eta, s.m);
  detail::record(trace, y, s);
  const RandomToken helper_token = tokens::helper(token, 0);
  for (long k = 1; k < cfg.K; ++k) {
    y.axpy(-cfg.eta, oracle.grad_h(y, tokens::inner(helper_token, k)));
    s.calls_h += 1;
    detail::record(trace, y, s);
  }
  return detail::finish_cycle(std::move(s), std::move(y));
}

/// Classical momentum on g_{f-h}, then K corrected helper steps.
inline OptimizerState auxmom_cycle(OptimizerState s, const OraclePair& oracle,
                                   const OptimizerConfig& cfg, const RandomToken& token,
                                   CycleTrace* trace = nullptr) {
  detail::require(cfg, Algorithm::AuxMOM, "auxmom_cycle");
  Vector g = oracle.grad_f_minus_h(s.x, tokens::momentum(token));
  s.calls_fmh += 1;
  s.m = (1.0 - cfg.a) * s.m + cfg.a * g;
  Vector y = detail::helper_inner_loop(s.x, s.m, oracle, cfg, tokens::helper(token, 0), s, trace);
  return detail::finish_cycle(std::move(s), std::move(y));
}

/// Momentum on g_f; inner direction g_h(y) - g_h(x) + m with a shared sample.
inline OptimizerState auxmom_v0_cycle(OptimizerState s, const OraclePair& oracle,
                                      const OptimizerConfig& cfg, const RandomToken& token,
                                      CycleTrace* trace = nullptr) {
  detail::require(cfg, Algorithm::AuxMOM_V0, "auxmom_v0_cycle");
  Vector g = oracle.grad_f(s.x, tokens::momentum(token));
  s.calls_f += 1;
  s.m = (1.0 - cfg.a) * s.m + cfg.a * g;
  const RandomToken helper_token = tokens::helper(token, 0);
  Vector y = s.x;
  detail::begin_trace(trace, y);
  for (long k = 0; k < cfg.K; ++k) {
    const RandomToken sample = tokens::inner(helper_token, k);
    Vector d = oracle.grad_h(y, sample) - oracle.grad_h(s.x, sample);
    d += s.m;
    y.axpy(-cfg.eta, d);
    s.calls_h += 2;
    detail::record(trace, y, s);
  }
  return detail::finish_cycle(std::move(s), std::move(y));
}

/// STORM-style momentum on g_{f-h}: both evaluations share one sample.
inline OptimizerState auxmvr_cycle(OptimizerState s, const OraclePair& oracle,
                                   const OptimizerConfig& cfg, const RandomToken& token,
                                   CycleTrace* trace = nullptr) {
  detail::require(cfg, Algorithm::AuxMVR, "auxmvr_cycle");
  const RandomToken sample = tokens::momentum(token);
  Vector g = oracle.grad_f_minus_h(s.x, sample);
  Vector g_prev = oracle.grad_f_minus_h(s.x_prev, sample);
  s.calls_fmh += 2;
  const double a = cfg.a;
  Vector m = (1.0 - a) * s.m + a * g;
  m.axpy(1.0 - a, g - g_prev);
  s.m = std::move(m);
  Vector y = detail::helper_inner_loop(s.x, s.m, oracle, cfg, tokens::helper(token, 0), s, trace);
  return detail::finish_cycle(std::move(s), std::move(y));
}

/// SGDm, MVR (STORM), GD and FineTune, each running K steps per cycle.
inline OptimizerState baseline_cycle(OptimizerState s, const OraclePair& oracle,
                                     const OptimizerConfig& cfg, const RandomToken& token,
                                     CycleTrace* trace = nullptr) {
  const RandomToken step_stream = tokens::helper(token, 0);
  const double a = cfg.a;
  Vector y = s.x;
  Vector y_prev = s.x_prev;
  detail::begin_trace(trace, y);
  switch (cfg.algorithm) {
    case Algorithm::SGDm:
      for (long k = 0; k < cfg.K; ++k) {
        s.m = (1.0 - a) * s.m + a * oracle.grad_f(y, tokens::inner(step_stream, k));
        s.calls_f += 1;
        y.axpy(-cfg.eta, s.m);
        detail::record(trace, y, s);
      }
      break;
    case Algorithm::MVR:
      for (long k = 0; k < cfg.K; ++k) {
        const RandomToken sample = tokens::inner(step_stream, k);
        Vector g = oracle.grad_f(y, sample);
        Vector g_prev = oracle.grad_f(y_prev, sample);
        s.calls_f += 2;
        Vector m = g;
        m.axpy(1.0 - a, s.m - g_prev);
        s.m = std::move(m);
        y_prev = y;
        y.axpy(-cfg.eta, s.m);
        detail::record(trace, y, s);
      }
      break;
    case Algorithm::GD: {
      const auto& gf = oracle.require_exact_f("baseline_cycle(GD)");
      for (long k = 0; k < cfg.K; ++k) {
        y.axpy(-cfg.eta, gf(y));
        s.calls_f += 1;
        detail::record(trace, y, s);
      }
      break;
    }
    case Algorithm::FineTune: {
      const long helper_steps = finetune_helper_steps(cfg);
      for (long k = 0; k < cfg.K; ++k) {
        const long step = s.t * cfg.K + k;
        const RandomToken sample = tokens::inner(step_stream, k);
        if (step == helper_steps && helper_steps > 0) {
          // Fresh optimizer for the f phase.
          s.init_calls += init_momentum(oracle, MomentumTarget::f, y, cfg.m0_mode, cfg.T,
                                        stream_fork(token, tokens::kPhaseSwitch), s.m);
        }
        if (step < helper_steps) {
          s.m = (1.0 - a) * s.m + a * oracle.grad_h(y, sample);
          s.calls_h += 1;
        } else {
          s.m = (1.0 - a) * s.m + a * oracle.grad_f(y, sample);
          s.calls_f += 1;
        }
        y.axpy(-cfg.eta, s.m);
        detail::record(trace, y, s);
      }
      break;
    }
    default:
      throw std::invalid_argument("baseline_cycle: not a baseline algorithm");
  }
  s.x_prev = cfg.algorithm == Algorithm::MVR ? std::move(y_prev) : std::move(s.x);
  s.x = y;
  s.y = std::move(y);
  s.t += 1;
  s.k = 0;
  return s;
}

/// Dispatches one cycle of cfg.algorithm.
inline OptimizerState cycle(OptimizerState s, const OraclePair& oracle,
                            const OptimizerConfig& cfg, const RandomToken& token,
                            CycleTrace* trace = nullptr) {
  switch (cfg.algorithm) {
    case Algorithm::Naive: return naive_cycle(std::move(s), oracle, cfg, token, trace);
    case Algorithm::AuxMOM: return auxmom_cycle(std::move(s), oracle, cfg, token, trace);
    case Algorithm::AuxMOM_V0: return auxmom_v0_cycle(std::move(s), oracle, cfg, token, trace);
    case Algorithm::AuxMVR: return auxmvr_cycle(std::move(s), oracle, cfg, token, trace);
    default: return baseline_cycle(std::move(s), oracle, cfg, token, trace);
  }
}

/// Exact (calls_f, calls_h, calls_fmh) consumed by `cycles` cycles.
inline std::array<long, 3> expected_calls(const OptimizerConfig& cfg, long cycles) {
  const long K = cfg.K;
  switch (cfg.algorithm) {
    case Algorithm::Naive: return {cycles, cycles * (K - 1), 0};
    case Algorithm::AuxMOM: return {0, cycles * K, cycles};
    case Algorithm::AuxMVR: return {0, cycles * K, 2 * cycles};
    case Algorithm::AuxMOM_V0: return {cycles, 2 * cycles * K, 0};
    case Algorithm::SGDm:
    case Algorithm::GD: return {cycles * K, 0, 0};
    case Algorithm::MVR: return {2 * cycles * K, 0, 0};
    case Algorithm::FineTune: {
      const long steps = cycles * K;
      const long on_h = std::min(steps, finetune_helper_steps(cfg));
      return {steps - on_h, on_h, 0};
    }
  }
  return {0, 0, 0};
}

}  // namespace auxopt::optimizers
