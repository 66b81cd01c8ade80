#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <string_view>

namespace auxopt::optimizers {

enum class Algorithm { Naive, AuxMOM, AuxMOM_V0, AuxMVR, SGDm, MVR, GD, FineTune };

/// How the momentum is seeded before the first cycle.
enum class MomentumInit {
  zero,
  single_sample,
  big_batch,  // mean of T independent samples
};

inline std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Naive: return "Naive";
    case Algorithm::AuxMOM: return "AuxMOM";
    case Algorithm::AuxMOM_V0: return "AuxMOM_V0";
    case Algorithm::AuxMVR: return "AuxMVR";
    case Algorithm::SGDm: return "SGDm";
    case Algorithm::MVR: return "MVR";
    case Algorithm::GD: return "GD";
    case Algorithm::FineTune: return "FineTune";
  }
  return "?";
}

inline bool parse_algorithm(std::string_view name, Algorithm& out) {
  for (auto a : {Algorithm::Naive, Algorithm::AuxMOM, Algorithm::AuxMOM_V0,
                 Algorithm::AuxMVR, Algorithm::SGDm, Algorithm::MVR, Algorithm::GD,
                 Algorithm::FineTune}) {
    if (to_string(a) == name) {
      out = a;
      return true;
    }
  }
  return false;
}

inline std::string_view to_string(MomentumInit m) {
  switch (m) {
    case MomentumInit::zero: return "zero";
    case MomentumInit::single_sample: return "single_sample";
    case MomentumInit::big_batch: return "big_batch";
  }
  return "?";
}

inline bool parse_momentum_init(std::string_view name, MomentumInit& out) {
  for (auto m : {MomentumInit::zero, MomentumInit::single_sample, MomentumInit::big_batch}) {
    if (to_string(m) == name) {
      out = m;
      return true;
    }
  }
  return false;
}

struct OptimizerConfig {
  Algorithm algorithm = Algorithm::AuxMOM;
  double eta = 0.1;  // step size
  double a = 1.0;    // momentum parameter in (0, 1]
  int K = 1;         // inner steps per cycle
  int T = 1;         // cycles
  MomentumInit m0_mode = MomentumInit::single_sample;
  double split_fraction = 0.5;  // FineTune: share of the T*K steps spent on h

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw std::invalid_argument("eta must be > 0");
    if (!(a > 0.0 && a <= 1.0)) throw std::invalid_argument("a must lie in (0, 1]");
    if (K < 1) throw std::invalid_argument("K must be >= 1");
    if (T < 1) throw std::invalid_argument("T must be >= 1");
    if (!(split_fraction >= 0.0 && split_fraction <= 1.0)) {
      throw std::invalid_argument("split_fraction must lie in [0, 1]");
    }
  }
};

}  // namespace auxopt::optimizers
