#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "auxopt/auxopt.hpp"

namespace {

namespace fs = std::filesystem;
using auxopt::harness::ConfigError;
using auxopt::harness::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

ExperimentConfig load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  fs::path base = fs::path(path).parent_path();
  if (base.empty()) base = ".";
  ExperimentConfig cfg = auxopt::harness::load_config(buf.str(), base);
  if (const char* env = std::getenv("AUXOPT_SEED")) {
    const std::string s(env);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), seed);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      throw ConfigError("AUXOPT_SEED", "expected a nonnegative integer, got '" + s + "'");
    }
    cfg.seed = seed;
  }
  return cfg;
}

std::vector<double> parse_values(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
      throw ConfigError("--values", "not a number: '" + item + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw ConfigError("--values", "no values given");
  return out;
}

int cmd_run(const std::string& config, const std::string& out) {
  const auto cfg = load(config);
  const fs::path dir = out.empty() ? fs::path(cfg.output_path) : fs::path(out);
  const auto result = auxopt::harness::run_experiment(cfg, dir);
  std::cout << "eta " << auxopt::harness::format_double(result.params.eta) << "  a "
            << auxopt::harness::format_double(result.params.a) << '\n';
  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    const auto& run = result.runs[r];
    std::cout << "repeat " << r << ": ";
    if (run.diverged) {
      std::cout << "diverged (" << run.error << ")\n";
    } else {
      std::cout << "f " << auxopt::harness::format_double(run.trajectory.final_f_value())
                << "  |grad f|^2 "
                << auxopt::harness::format_double(run.trajectory.final_grad_norm_sq()) << '\n';
    }
  }
  std::cout << "wrote " << dir.string() << '\n';
  return result.any_diverged() ? kExitDiverged : kExitOk;
}

int cmd_sweep(const std::string& config, const std::string& axis, const std::string& values,
              const std::string& out) {
  const auto cfg = load(config);
  const auto vals = parse_values(values);
  const fs::path dir = out.empty() ? fs::path(cfg.output_path) : fs::path(out);
  const auto points = auxopt::harness::run_sweep(cfg, axis, vals, dir);
  bool diverged = false;
  std::cout << auxopt::harness::kSweepHeader << '\n';
  for (const auto& p : points) {
    diverged = diverged || p.diverged;
    std::cout << auxopt::harness::format_double(p.value) << ','
              << auxopt::harness::format_double(p.final_G) << ','
              << auxopt::harness::format_double(p.final_grad_norm_sq) << ','
              << auxopt::harness::format_double(p.final_f_value) << ','
              << p.cycles_to_threshold << ',' << p.calls_f << ',' << p.calls_h << ','
              << p.calls_fmh << ',' << (p.diverged ? 1 : 0) << '\n';
  }
  return diverged ? kExitDiverged : kExitOk;
}

int cmd_check(const std::string& config, const auxopt::harness::CheckOptions& opt) {
  const auto cfg = load(config);
  const auto report = auxopt::harness::check_problem(cfg, opt);
  using auxopt::harness::format_double;
  std::cout << "L " << format_double(report.smoothness) << '\n';
  std::cout << "delta_hat " << format_double(report.delta_hat) << '\n';
  if (report.delta_exact) std::cout << "delta_exact " << format_double(*report.delta_exact) << '\n';
  std::cout << "bias_m " << format_double(report.bias.m) << '\n';
  std::cout << "bias_zeta_sq " << format_double(report.bias.zeta_sq) << '\n';
  std::cout << "weakly_convex " << (report.weak_convexity.holds ? "yes" : "no")
            << " (worst midpoint gap " << format_double(report.weak_convexity.worst_gap) << ")\n";
  return kExitOk;
}

int cmd_params(const std::string& config) {
  auto cfg = load(config);
  const auto tok = auxopt::harness::repeat_token(cfg.seed, 0);
  const auto problem =
      auxopt::harness::build_problem(cfg, auxopt::stream_fork(tok, auxopt::harness::kProblemLabel));
  const auto params = auxopt::harness::resolve_params(
      cfg, problem, auxopt::stream_fork(tok, auxopt::harness::kParamsLabel));
  auxopt::harness::json j;
  j["eta"] = params.eta;
  j["a"] = params.a;
  if (params.beta) j["beta"] = *params.beta;
  if (params.constants) {
    j["L"] = params.constants->L;
    j["delta"] = params.constants->delta;
    j["F0"] = params.constants->F0;
  }
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auxiliary-function stochastic optimization experiments"};
  app.require_subcommand(1);

  std::string config, out, axis, values;
  auxopt::harness::CheckOptions check_opt;

  auto* run = app.add_subcommand("run", "Run an experiment described by a JSON config");
  run->add_option("--config", config, "Experiment config")->required();
  run->add_option("--out", out, "Output directory (overrides output_path)");

  auto* sweep = app.add_subcommand("sweep", "Run one experiment per value of a config field");
  sweep->add_option("--config", config, "Base experiment config")->required();
  sweep->add_option("--axis", axis, "Dotted config field, e.g. algorithm.K")->required();
  sweep->add_option("--values", values, "Comma-separated values")->required();
  sweep->add_option("--out", out, "Output directory (overrides output_path)");

  auto* check = app.add_subcommand("check", "Estimate similarity and bias constants");
  check->add_option("--config", config, "Experiment config")->required();
  check->add_option("--probes", check_opt.probes, "Probe points");
  check->add_option("--restarts", check_opt.restarts, "Power-iteration restarts per probe");
  check->add_option("--max-iterations", check_opt.max_iterations, "Power-iteration cap");
  check->add_option("--radius", check_opt.radius, "Probe radius");

  auto* params = app.add_subcommand("params", "Print the resolved step size and momentum");
  params->add_option("--config", config, "Experiment config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(config, out);
    if (sweep->parsed()) return cmd_sweep(config, axis, values, out);
    if (check->parsed()) return cmd_check(config, check_opt);
    if (params->parsed()) return cmd_params(config);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
