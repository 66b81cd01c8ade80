#pragma once

#include <fstream>
#include <optional>
#include <string>

#include "auxopt/core/eigen_interop.hpp"
#include "auxopt/core/oracle.hpp"
#include "auxopt/harness/config.hpp"
#include "auxopt/problems/libsvm.hpp"
#include "auxopt/problems/logistic.hpp"
#include "auxopt/problems/quadratic.hpp"
#include "auxopt/problems/tasks.hpp"
#include "auxopt/problems/toy.hpp"
#include "auxopt/theory/estimators.hpp"
#include "auxopt/theory/params.hpp"

namespace auxopt::harness {

/// An instantiated problem ready to hand to the optimizers.
struct BuiltProblem {
  OraclePair oracle;
  Vector x0;
  double smoothness = 1.0;
  std::optional<double> delta;  // known in closed form for toy and quadratic
  double f_lower_bound = 0.0;   // every shipped objective is nonnegative
  std::optional<problems::LogisticTask> target;
  std::optional<problems::LogisticTask> test;
};

inline problems::LogisticTask load_libsvm_task(const std::string& path, double l2_reg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("problem.logistic.path", "cannot open " + path);
  problems::LibsvmData data;
  try {
    data = problems::parse_libsvm(in);
  } catch (const problems::LibsvmParseError& e) {
    throw ConfigError("problem.logistic.path", path + ": " + e.what());
  }
  problems::LogisticTask task;
  task.features = data.to_dense();
  task.labels = problems::map_binary_labels(data.labels);
  task.l2_reg = l2_reg;
  return task;
}

/// `token` seeds the data split and helper construction.
inline BuiltProblem build_problem(const ExperimentConfig& cfg, const RandomToken& token) {
  BuiltProblem out;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ToySpec>) {
          auto toy = problems::make_toy_pair(p.delta, p.zeta, cfg.noise);
          out.oracle = std::move(toy.oracle);
          out.smoothness = toy.smoothness;
          out.delta = toy.delta;
          out.x0 = Vector{1.0};
        } else if constexpr (std::is_same_v<P, QuadraticSpec>) {
          auto to_matrix = [](const std::vector<std::vector<double>>& rows, const char* field) {
            const auto n = static_cast<Eigen::Index>(rows.size());
            Matrix m(n, n);
            for (Eigen::Index i = 0; i < n; ++i) {
              if (static_cast<Eigen::Index>(rows[i].size()) != n) {
                throw ConfigError(field, "matrix must be square");
              }
              for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rows[i][j];
            }
            return m;
          };
          const Matrix A_f = to_matrix(p.A_f, "problem.quadratic_nd.A_f");
          const Matrix A_h = to_matrix(p.A_h, "problem.quadratic_nd.A_h");
          if (A_f.rows() == 0) throw ConfigError("problem.quadratic_nd.A_f", "empty matrix");
          if (A_h.rows() != A_f.rows()) {
            throw ConfigError("problem.quadratic_nd.A_h", "size differs from A_f");
          }
          if (p.b_h.size() != static_cast<std::size_t>(A_f.rows())) {
            throw ConfigError("problem.quadratic_nd.b_h", "size differs from A_f");
          }
          try {
            auto q = problems::make_quadratic_nd(A_f, A_h, Vector(p.b_h), cfg.noise);
            out.oracle = std::move(q.oracle);
            out.smoothness = q.smoothness;
            out.delta = q.delta;
          } catch (const std::invalid_argument& e) {
            throw ConfigError("problem.quadratic_nd", e.what());
          }
          out.x0 = Vector(static_cast<std::size_t>(A_f.rows()), 1.0);
        } else {
          const auto task = load_libsvm_task(p.path, p.l2_reg);
          problems::SemiSupervisedTasks tasks;
          try {
            tasks = problems::build_semisupervised(task, p.split, p.helper, token);
          } catch (const std::invalid_argument& e) {
            throw ConfigError("problem.logistic", e.what());
          }
          out.oracle = problems::make_logistic_oracle(tasks.target, tasks.helper, p.batch_size,
                                                      cfg.noise, p.helper_batch_size);
          out.smoothness = problems::logistic_smoothness(tasks.target);
          out.x0 = Vector(tasks.target.dim(), 0.0);
          out.target = std::move(tasks.target);
          out.test = std::move(tasks.test);
        }
      },
      cfg.problem);
  if (cfg.x0) {
    if (cfg.x0->size() != out.x0.size()) {
      throw ConfigError("x0", "expected " + std::to_string(out.x0.size()) + " coordinates");
    }
    out.x0 = Vector(*cfg.x0);
  }
  return out;
}

/// Hessian-similarity constant: closed form when known, estimated otherwise.
inline double problem_delta(const BuiltProblem& problem, const RandomToken& token) {
  if (problem.delta) return *problem.delta;
  const auto& o = problem.oracle;
  o.require_exact_f("problem_delta");
  o.require_exact_h("problem_delta");
  theory::DeltaEstimateOptions opt;
  opt.restarts = 2;
  opt.max_iterations = 100;
  opt.tolerance = 1e-6;
  opt.token = stream_fork(token, 1);
  const auto probes = theory::make_probe_points(o.dim, 5, 1.0, stream_fork(token, 0));
  return theory::estimate_delta(*o.exact_grad_f, *o.exact_grad_h, probes, opt);
}

/// Constants for the step-size rules. F0 uses f(x0) minus the known lower
/// bound on f, which overestimates f(x0) - f* and so keeps the step safe.
inline theory::TheoryParams theory_params(const ExperimentConfig& cfg,
                                          const BuiltProblem& problem,
                                          const RandomToken& token) {
  theory::TheoryParams p;
  p.L = problem.smoothness;
  p.delta = std::min(problem_delta(problem, token), 2.0 * p.L);
  p.sigma_f = cfg.noise.sigma_f;
  p.sigma_h = cfg.noise.sigma_h;
  p.sigma_fmh = cfg.noise.sigma_f_minus_h();
  if (!problem.oracle.value_f) throw ConfigError("params_mode", "objective value unavailable");
  p.F0 = std::max(0.0, (*problem.oracle.value_f)(problem.x0) - problem.f_lower_bound);
  p.E0 = 0.0;
  p.K = cfg.algorithm.K;
  p.T = cfg.algorithm.T;
  return p;
}

struct ResolvedParams {
  double eta = 0.0;
  double a = 0.0;
  std::optional<double> beta;
  std::optional<theory::TheoryParams> constants;
};

/// Step size and momentum to use: the config's own in manual mode, the
/// theorem prescription otherwise.
inline ResolvedParams resolve_params(const ExperimentConfig& cfg, const BuiltProblem& problem,
                                     const RandomToken& token) {
  ResolvedParams r{cfg.algorithm.eta, cfg.algorithm.a, std::nullopt, std::nullopt};
  if (cfg.params_mode == ParamsMode::manual) return r;
  const auto p = theory_params(cfg, problem, token);
  r.constants = p;
  if (cfg.algorithm.algorithm == optimizers::Algorithm::AuxMOM) {
    const auto q = theory::auxmom_params(p);
    r.eta = q.eta;
    r.a = q.a;
    r.beta = q.beta;
  } else {
    const auto q = theory::auxmvr_params(p);
    r.eta = q.eta;
    r.a = q.a;
  }
  if (!(r.eta > 0.0) || !std::isfinite(r.eta)) {
    throw ConfigError("params_mode", "prescribed step size is not positive (is x0 optimal?)");
  }
  r.a = std::min(r.a, 1.0);
  return r;
}

}  // namespace auxopt::harness
