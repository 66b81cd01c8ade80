#pragma once

#include <cmath>
#include <algorithm>
#include <functional>
#include <limits>
#include <optional>
#include <utility>

#include "auxopt/core/random.hpp"
#include "auxopt/core/vector.hpp"

namespace auxopt::decentralized {

struct WeakConvexityReport {
  bool holds = true;
  std::optional<std::pair<Vector, Vector>> witness;
  double worst_gap = 0.0;  // max of g(mid) - (g(u) + g(v)) / 2 over the pairs
};

/// Samples point pairs and checks the midpoint inequality for
/// g(x) = f(x) + delta ||x||^2. Gaps within a relative 1e-12 of the values
/// count as round-off, not violations.
inline WeakConvexityReport check_weak_convexity(const std::function<double(const Vector&)>& f,
                                                std::size_t dim, double delta,
                                                std::size_t points, const RandomToken& token,
                                                double radius = 1.0) {
  auto g = [&](const Vector& x) { return f(x) + delta * x.squared_norm(); };
  WeakConvexityReport report;
  report.worst_gap = -std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < points; ++p) {
    NoiseStream stream(stream_fork(token, p));
    std::vector<double> u(dim), v(dim);
    for (auto& c : u) c = radius * stream.next_gaussian();
    for (auto& c : v) c = radius * stream.next_gaussian();
    Vector a(std::move(u)), b(std::move(v));
    const Vector mid = 0.5 * (a + b);
    const double ga = g(a), gb = g(b), gm = g(mid);
    const double gap = gm - 0.5 * (ga + gb);
    report.worst_gap = std::max(report.worst_gap, gap);
    const double slack = 1e-12 * (1.0 + std::abs(ga) + std::abs(gb) + std::abs(gm));
    if (gap > slack && report.holds) {
      report.holds = false;
      report.witness = std::make_pair(a, b);
    }
  }
  return report;
}

}  // namespace auxopt::decentralized
