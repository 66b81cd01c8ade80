#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "auxopt/core/oracle.hpp"
#include "auxopt/optimizers/cycles.hpp"

namespace auxopt::decentralized {

enum class Variant { AuxMOM, AuxMVR };

/// N helpers sharing one target f; helper i sees the pair (f, h_i).
struct HelperSet {
  std::vector<OraclePair> helpers;
  std::size_t S = 1;  // helpers sampled per cycle

  std::size_t N() const { return helpers.size(); }

  void validate() const {
    if (helpers.empty()) throw std::invalid_argument("HelperSet: no helpers");
    if (S < 1 || S > helpers.size()) {
      throw std::invalid_argument("HelperSet: S must lie in [1, N]");
    }
    for (const auto& h : helpers) {
      if (h.dim != helpers.front().dim) {
        throw std::invalid_argument("HelperSet: helpers disagree on dimension");
      }
    }
  }
};

/// Shared snapshot plus the per-helper momenta m_i.
struct DecentralizedState {
  Vector x_prev;
  Vector x;
  std::vector<Vector> momenta;
  std::vector<std::size_t> last_sampled;
  long t = 0;
  long calls_fmh = 0;  // broadcast evaluations, one per cycle (two for AuxMVR)
  long calls_h = 0;
};

inline constexpr std::uint64_t kSamplingLabel = 7;

/// The S helpers used in the cycle driven by `token`, in ascending order.
inline std::vector<std::size_t> sample_helpers(const RandomToken& token, std::size_t N,
                                               std::size_t S) {
  auto chosen = sample_without_replacement(N, S, stream_fork(token, kSamplingLabel));
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

/// Seeds every helper's momentum at x0 with its own g_{f - h_i} samples.
inline DecentralizedState initial_decentralized_state(const HelperSet& set, const Vector& x0,
                                                      optimizers::MomentumInit mode, int batch,
                                                      const RandomToken& token) {
  set.validate();
  DecentralizedState s;
  s.x_prev = x0;
  s.x = x0;
  s.momenta.resize(set.N());
  for (std::size_t i = 0; i < set.N(); ++i) {
    optimizers::init_momentum(set.helpers[i], optimizers::MomentumTarget::f_minus_h, x0, mode,
                              batch, stream_fork(token, i), s.momenta[i]);
  }
  return s;
}

/// One round: sample S helpers, refresh their momenta (update, then use),
/// run K corrected inner steps from x on each, and average the end points.
///
/// The f-side sample is drawn once from the cycle's momentum token and shared
/// by every sampled helper. Unsampled helpers keep their momenta untouched.
inline DecentralizedState decentralized_cycle(DecentralizedState s, const HelperSet& set,
                                              const optimizers::OptimizerConfig& cfg,
                                              const RandomToken& token, Variant variant) {
  set.validate();
  cfg.validate();
  if (s.momenta.size() != set.N()) {
    throw std::invalid_argument("decentralized_cycle: momentum count differs from N");
  }
  const auto chosen = sample_helpers(token, set.N(), set.S);
  const RandomToken shared = optimizers::tokens::momentum(token);
  const double a = cfg.a;

  Vector sum = Vector::zeros(s.x.size());
  optimizers::OptimizerState counters;
  for (std::size_t i : chosen) {
    const OraclePair& oracle = set.helpers[i];
    Vector g = oracle.grad_f_minus_h(s.x, shared);
    Vector m = (1.0 - a) * s.momenta[i] + a * g;
    if (variant == Variant::AuxMVR) {
      m.axpy(1.0 - a, g - oracle.grad_f_minus_h(s.x_prev, shared));
    }
    s.momenta[i] = std::move(m);
    sum += optimizers::detail::helper_inner_loop(s.x, s.momenta[i], oracle, cfg,
                                                 optimizers::tokens::helper(token, i), counters,
                                                 nullptr);
  }
  s.calls_fmh += variant == Variant::AuxMVR ? 2 : 1;
  s.calls_h += counters.calls_h;
  s.x_prev = std::move(s.x);
  s.x = std::move(sum);
  s.x *= 1.0 / static_cast<double>(chosen.size());
  s.last_sampled = chosen;
  s.t += 1;
  return s;
}

/// T rounds; returns x^0 .. x^T. Round t draws from stream_fork(token, t).
inline std::vector<Vector> run_decentralized(const HelperSet& set, const Vector& x0,
                                             const optimizers::OptimizerConfig& cfg,
                                             const RandomToken& token, Variant variant,
                                             DecentralizedState* final_state = nullptr) {
  DecentralizedState s =
      initial_decentralized_state(set, x0, cfg.m0_mode, cfg.T, stream_fork(token, 0));
  std::vector<Vector> xs{x0};
  for (long t = 1; t <= cfg.T; ++t) {
    s = decentralized_cycle(std::move(s), set, cfg, stream_fork(token, static_cast<std::uint64_t>(t)),
                            variant);
    xs.push_back(s.x);
  }
  if (final_state != nullptr) *final_state = std::move(s);
  return xs;
}

}  // namespace auxopt::decentralized
