#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "auxopt/core/random.hpp"
#include "auxopt/harness/config.hpp"
#include "auxopt/harness/csv.hpp"
#include "auxopt/harness/problem.hpp"
#include "auxopt/optimizers/run.hpp"

namespace auxopt::harness {

// Stream labels under each repeat's token.
inline constexpr std::uint64_t kProblemLabel = 1;
inline constexpr std::uint64_t kRunLabel = 2;
inline constexpr std::uint64_t kParamsLabel = 3;

inline RandomToken repeat_token(std::uint64_t seed, int repeat) {
  return stream_fork(root_token(seed), static_cast<std::uint64_t>(repeat));
}

struct RunOutcome {
  optimizers::Trajectory trajectory;
  bool diverged = false;
  std::string error;
};

struct ExperimentResult {
  std::vector<RunOutcome> runs;
  std::vector<optimizers::TrajectoryRow> aggregate;  // mean over repeats
  ResolvedParams params;
  bool any_diverged() const {
    return std::any_of(runs.begin(), runs.end(), [](const RunOutcome& r) { return r.diverged; });
  }
};

/// Row-wise mean over repeats, truncated to the shortest trajectory.
inline std::vector<optimizers::TrajectoryRow> aggregate_rows(const std::vector<RunOutcome>& runs) {
  std::vector<optimizers::TrajectoryRow> out;
  if (runs.empty()) return out;
  std::size_t n = runs.front().trajectory.rows.size();
  for (const auto& r : runs) n = std::min(n, r.trajectory.rows.size());
  const double inv = 1.0 / static_cast<double>(runs.size());
  for (std::size_t i = 0; i < n; ++i) {
    optimizers::TrajectoryRow row = runs.front().trajectory.rows[i];
    row.f_value = row.grad_norm_sq = row.E_t = row.Delta_t = 0.0;
    double calls[3] = {0.0, 0.0, 0.0};
    for (const auto& r : runs) {
      const auto& s = r.trajectory.rows[i];
      row.f_value += inv * s.f_value;
      row.grad_norm_sq += inv * s.grad_norm_sq;
      row.E_t += inv * s.E_t;
      row.Delta_t += inv * s.Delta_t;
      calls[0] += inv * static_cast<double>(s.calls_f);
      calls[1] += inv * static_cast<double>(s.calls_h);
      calls[2] += inv * static_cast<double>(s.calls_fmh);
    }
    row.calls_f = std::lround(calls[0]);
    row.calls_h = std::lround(calls[1]);
    row.calls_fmh = std::lround(calls[2]);
    out.push_back(row);
  }
  return out;
}

inline json run_metadata(const ExperimentConfig& cfg, const ResolvedParams& params, int repeat,
                         const RunOutcome& outcome) {
  json meta;
  meta["config"] = to_json(cfg);
  meta["repeat"] = repeat;
  const RandomToken tok = repeat_token(cfg.seed, repeat);
  meta["stream_id"] = tok.stream_id;
  meta["eta"] = params.eta;
  meta["a"] = params.a;
  if (params.beta) meta["beta"] = *params.beta;
  if (params.constants) {
    const auto& p = *params.constants;
    meta["constants"] = {{"L", p.L},         {"delta", p.delta},   {"sigma_f", p.sigma_f},
                         {"sigma_h", p.sigma_h}, {"sigma_fmh", p.sigma_fmh}, {"F0", p.F0},
                         {"K", p.K},         {"T", p.T}};
  }
  meta["diverged"] = outcome.diverged;
  if (outcome.diverged) meta["error"] = outcome.error;
  meta["rows"] = outcome.trajectory.rows.size();
  meta["init_calls"] = outcome.trajectory.final_state.init_calls;
  return meta;
}

/// Runs every repeat. With `out_dir` set, writes run_<r>.csv,
/// run_<r>.meta.json and aggregate.csv there. A divergent repeat keeps its
/// partial trajectory and is flagged rather than thrown.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg,
                                       const std::optional<std::filesystem::path>& out_dir) {
  ExperimentResult result;
  if (out_dir) std::filesystem::create_directories(*out_dir);
  for (int r = 0; r < cfg.repeats; ++r) {
    const RandomToken tok = repeat_token(cfg.seed, r);
    const BuiltProblem problem = build_problem(cfg, stream_fork(tok, kProblemLabel));
    // Theorem constants depend only on the problem, so repeat 0 fixes them.
    if (r == 0) result.params = resolve_params(cfg, problem, stream_fork(tok, kParamsLabel));
    optimizers::OptimizerConfig oc = cfg.algorithm;
    oc.eta = result.params.eta;
    oc.a = result.params.a;

    RunOutcome outcome;
    try {
      outcome.trajectory =
          optimizers::run(problem.oracle, problem.x0, oc, stream_fork(tok, kRunLabel),
                          cfg.diagnostics);
    } catch (const optimizers::DivergenceError& e) {
      outcome.trajectory = e.partial();
      outcome.diverged = true;
      outcome.error = e.what();
    }
    if (out_dir) {
      const std::string stem = "run_" + std::to_string(r);
      std::ofstream csv(*out_dir / (stem + ".csv"));
      write_trajectory_csv(csv, outcome.trajectory.rows);
      std::ofstream meta(*out_dir / (stem + ".meta.json"));
      meta << run_metadata(cfg, result.params, r, outcome).dump(2) << '\n';
    }
    result.runs.push_back(std::move(outcome));
  }
  result.aggregate = aggregate_rows(result.runs);
  if (out_dir) {
    std::ofstream agg(*out_dir / "aggregate.csv");
    write_trajectory_csv(agg, result.aggregate);
  }
  return result;
}

}  // namespace auxopt::harness
