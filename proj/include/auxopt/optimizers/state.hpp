#pragma once

#include <array>
#include <vector>

#include "auxopt/core/vector.hpp"

namespace auxopt::optimizers {

/// Iterates and gradient-call counters carried from cycle to cycle.
///
/// After cycle t: x_prev = x^{t-1}, x = x^t, m = m^t. MVR (the STORM
/// baseline) instead keeps the last inner iterate before x in x_prev.
struct OptimizerState {
  Vector x_prev;
  Vector x;
  Vector y;
  Vector m;
  long t = 0;
  long k = 0;
  long calls_f = 0;
  long calls_h = 0;
  long calls_fmh = 0;
  long init_calls = 0;  // samples spent seeding m, kept out of the counters above
};

/// Inner iterates y_0 .. y_K of the most recent cycle (y_0 = snapshot).
struct CycleTrace {
  std::vector<Vector> iterates;
  // (calls_f, calls_h, calls_fmh) right after each inner step k = 1..K
  std::vector<std::array<long, 3>> counters;
};

}  // namespace auxopt::optimizers
