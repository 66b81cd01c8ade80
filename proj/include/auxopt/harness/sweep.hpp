#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "auxopt/harness/config.hpp"
#include "auxopt/harness/csv.hpp"
#include "auxopt/harness/experiment.hpp"

namespace auxopt::harness {

struct SweepPoint {
  double value = 0.0;
  double final_G = 0.0;            // mean over repeats of G at the last cycle
  double final_grad_norm_sq = 0.0;
  double final_f_value = 0.0;
  long cycles_to_threshold = -1;   // on the repeat-mean curve; -1 if never reached
  long calls_f = 0;
  long calls_h = 0;
  long calls_fmh = 0;
  bool diverged = false;
};

inline constexpr const char* kSweepHeader =
    "value,final_G,final_grad_norm_sq,final_f_value,cycles_to_threshold,calls_f,calls_h,"
    "calls_fmh,diverged";

/// Returns `base` with the number at dotted `axis` replaced by `value`.
/// The axis must name an existing numeric field of the defaulted config.
inline json with_axis_value(const json& base, const std::string& axis, double value) {
  json out = base;
  json* node = &out;
  std::size_t start = 0;
  while (true) {
    const auto dot = axis.find('.', start);
    const std::string key = axis.substr(start, dot == std::string::npos ? dot : dot - start);
    if (key.empty() || !node->is_object() || !node->contains(key)) {
      throw ConfigError(axis, "sweep axis does not name a config field");
    }
    node = &(*node)[key];
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (!node->is_number()) throw ConfigError(axis, "sweep axis must be numeric");
  if (std::floor(value) == value && std::abs(value) < 9e15) {
    *node = static_cast<long long>(value);
  } else {
    *node = value;
  }
  return out;
}

inline std::string axis_dir_name(const std::string& axis, double value) {
  return axis + "=" + format_double(value);
}

/// Runs one experiment per value, each in its own subdirectory of `out_dir`,
/// and writes summary.csv there.
inline std::vector<SweepPoint> run_sweep(const ExperimentConfig& base, const std::string& axis,
                                         const std::vector<double>& values,
                                         const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const json base_json = to_json(base);
  std::vector<SweepPoint> points;
  for (double v : values) {
    // Paths in the defaulted JSON are already absolute or cwd-relative.
    const ExperimentConfig cfg = load_config(with_axis_value(base_json, axis, v), ".");
    const auto result = run_experiment(cfg, out_dir / axis_dir_name(axis, v));
    SweepPoint p;
    p.value = v;
    p.diverged = result.any_diverged();
    const double inv = 1.0 / static_cast<double>(result.runs.size());
    for (const auto& run : result.runs) {
      const auto& traj = run.trajectory;
      p.final_G += inv * (traj.cycles.empty() ? std::nan("") : traj.cycles.back().G);
    }
    if (!result.aggregate.empty()) {
      const auto& last = result.aggregate.back();
      p.final_grad_norm_sq = last.grad_norm_sq;
      p.final_f_value = last.f_value;
      p.calls_f = last.calls_f;
      p.calls_h = last.calls_h;
      p.calls_fmh = last.calls_fmh;
      for (const auto& row : result.aggregate) {
        const bool cycle_end = row.k == cfg.algorithm.K || (row.t == 0 && row.k == 0);
        if (cycle_end && row.grad_norm_sq < cfg.threshold) {
          p.cycles_to_threshold = row.t;
          break;
        }
      }
    }
    points.push_back(p);
  }
  std::ofstream summary(out_dir / "summary.csv");
  summary << kSweepHeader << '\n';
  for (const auto& p : points) {
    summary << format_double(p.value) << ',' << format_double(p.final_G) << ','
            << format_double(p.final_grad_norm_sq) << ',' << format_double(p.final_f_value)
            << ',' << p.cycles_to_threshold << ',' << p.calls_f << ',' << p.calls_h << ','
            << p.calls_fmh << ',' << (p.diverged ? 1 : 0) << '\n';
  }
  return points;
}

}  // namespace auxopt::harness
