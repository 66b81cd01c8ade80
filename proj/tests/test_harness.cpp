#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "auxopt/harness/check.hpp"
#include "auxopt/harness/config.hpp"
#include "auxopt/harness/csv.hpp"
#include "auxopt/harness/experiment.hpp"
#include "auxopt/harness/sweep.hpp"
#include "auxopt/theory/params.hpp"
#include "support/semisupervised.hpp"
#include "support/synthetic.hpp"

using namespace auxopt;
using namespace auxopt::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("auxopt_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

json toy_json(const std::string& alg = "AuxMOM") {
  return json::parse(R"({
    "problem": {"toy": {"delta": 1, "zeta": 10}},
    "algorithm": {"name": ")" + alg + R"(", "eta": 0.05, "a": 0.1, "K": 10, "T": 100},
    "seed": 7
  })");
}

std::string field_of(const json& j, const fs::path& base = ".") {
  try {
    load_config(j, base);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(Config, MinimalToyConfig) {
  const auto cfg = load_config(toy_json());
  const auto& toy = std::get<ToySpec>(cfg.problem);
  EXPECT_EQ(toy.delta, 1.0);
  EXPECT_EQ(toy.zeta, 10.0);
  EXPECT_EQ(cfg.algorithm.algorithm, optimizers::Algorithm::AuxMOM);
  EXPECT_EQ(cfg.algorithm.K, 10);
  EXPECT_EQ(cfg.algorithm.T, 100);
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.repeats, 1);
  EXPECT_EQ(cfg.params_mode, ParamsMode::manual);
  EXPECT_EQ(cfg.algorithm.m0_mode, optimizers::MomentumInit::single_sample);
}

TEST(Config, ErrorsNameTheField) {
  json j = toy_json();
  j["algorithm"]["K"] = 0;
  EXPECT_EQ(field_of(j), "algorithm.K");
  j = toy_json();
  j["algorithm"]["a"] = 1.5;
  EXPECT_EQ(field_of(j), "algorithm.a");
  j = toy_json();
  j["algorithm"]["speed"] = 1;
  EXPECT_EQ(field_of(j), "algorithm.speed");
  j = toy_json();
  j["extra"] = true;
  EXPECT_EQ(field_of(j), "extra");
  j = toy_json();
  j["algorithm"]["name"] = "Adam";
  EXPECT_EQ(field_of(j), "algorithm.name");
  j = toy_json();
  j["algorithm"]["T"] = 2.5;
  EXPECT_EQ(field_of(j), "algorithm.T");
  j = toy_json();
  j["noise"] = {{"rho", 2.0}};
  EXPECT_EQ(field_of(j), "noise.rho");
  j = toy_json();
  j.erase("problem");
  EXPECT_EQ(field_of(j), "problem");
  j = toy_json();
  j["problem"]["quadratic_nd"] = json::object();
  EXPECT_EQ(field_of(j), "problem");
  j = toy_json();
  j["schema_version"] = 2;
  EXPECT_EQ(field_of(j), "schema_version");
  j = toy_json("GD");
  j["params_mode"] = "theorem";
  EXPECT_EQ(field_of(j), "params_mode");
  EXPECT_THROW(load_config(std::string("{not json")), ConfigError);
}

TEST(Config, MissingDatasetIsAnError) {
  json j = toy_json();
  j["problem"] = {{"logistic", {{"path", "no/such/file.libsvm"}}}};
  EXPECT_EQ(field_of(j), "problem.logistic.path");
}

TEST(Config, DefaultedJsonRoundTrips) {
  json j = toy_json();
  j["noise"] = {{"sigma_f", 0.5}, {"sigma_h", 0.25}, {"rho", 0.1}};
  j["x0"] = {2.0};
  const auto a = load_config(j);
  const auto b = load_config(to_json(a));
  EXPECT_EQ(to_json(a), to_json(b));
  EXPECT_EQ(to_json(b)["algorithm"]["m0_mode"], "single_sample");
}

TEST(Config, TheoremModeRecordsPrescribedStep) {
  json j = toy_json();
  j["params_mode"] = "theorem";
  j["algorithm"].erase("eta");
  j["noise"] = {{"sigma_f", 1.0}, {"sigma_h", 1.0}, {"rho", 0.0}};
  const auto cfg = load_config(j);
  const fs::path dir = scratch("theorem");
  const auto result = run_experiment(cfg, dir);
  theory::TheoryParams p;
  p.L = 2.0;  // toy pair with delta = 1
  p.delta = 1.0;
  p.sigma_f = 1.0;
  p.sigma_h = 1.0;
  p.sigma_fmh = std::sqrt(2.0);
  p.F0 = 0.5;  // f(1) with f* = 0
  p.K = 10;
  p.T = 100;
  const auto want = theory::auxmom_params(p);
  EXPECT_DOUBLE_EQ(result.params.eta, want.eta);
  EXPECT_DOUBLE_EQ(result.params.a, want.a);
  const json meta = json::parse(slurp(dir / "run_0.meta.json"));
  EXPECT_DOUBLE_EQ(meta["eta"].get<double>(), want.eta);
  EXPECT_DOUBLE_EQ(meta["a"].get<double>(), want.a);
  EXPECT_DOUBLE_EQ(meta["beta"].get<double>(), want.beta);
}

TEST(Experiment, RerunIsByteIdentical) {
  json j = toy_json();
  j["repeats"] = 2;
  j["noise"] = {{"sigma_f", 1.0}, {"sigma_h", 1.0}, {"rho", 0.5}};
  const auto cfg = load_config(j);
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  run_experiment(cfg, a);
  run_experiment(cfg, b);
  for (const char* name : {"run_0.csv", "run_1.csv", "aggregate.csv", "run_0.meta.json"}) {
    EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
  }
  EXPECT_NE(slurp(a / "run_0.csv"), slurp(a / "run_1.csv"));
}

TEST(Experiment, CsvRoundTripIsExact) {
  json j = toy_json();
  j["noise"] = {{"sigma_f", 1.0}, {"sigma_h", 1.0}, {"rho", 0.5}};
  const auto cfg = load_config(j);
  const auto result = run_experiment(cfg, std::nullopt);
  std::stringstream ss;
  write_trajectory_csv(ss, result.runs[0].trajectory.rows);
  const auto rows = read_trajectory_csv(ss);
  const auto& orig = result.runs[0].trajectory.rows;
  ASSERT_EQ(rows.size(), orig.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i].t, orig[i].t);
    EXPECT_EQ(rows[i].k, orig[i].k);
    EXPECT_EQ(rows[i].f_value, orig[i].f_value);
    EXPECT_EQ(rows[i].grad_norm_sq, orig[i].grad_norm_sq);
    EXPECT_EQ(rows[i].E_t, orig[i].E_t);
    EXPECT_EQ(rows[i].Delta_t, orig[i].Delta_t);
    EXPECT_EQ(rows[i].calls_h, orig[i].calls_h);
    EXPECT_EQ(rows[i].calls_fmh, orig[i].calls_fmh);
  }
  std::stringstream bad("t,k\n");
  EXPECT_THROW(read_trajectory_csv(bad), CsvError);
}

TEST(Experiment, NanColumnsRoundTrip) {
  std::vector<optimizers::TrajectoryRow> rows(1);
  rows[0].E_t = std::nan("");
  std::stringstream ss;
  write_trajectory_csv(ss, rows);
  const auto back = read_trajectory_csv(ss);
  EXPECT_TRUE(std::isnan(back[0].E_t));
}

TEST(Experiment, AggregateIsRepeatMean) {
  json j = toy_json();
  j["repeats"] = 3;
  j["noise"] = {{"sigma_f", 2.0}, {"sigma_h", 1.0}, {"rho", 0.0}};
  const fs::path dir = scratch("aggregate");
  run_experiment(load_config(j), dir);
  std::vector<std::vector<optimizers::TrajectoryRow>> runs;
  for (int r = 0; r < 3; ++r) {
    std::ifstream in(dir / ("run_" + std::to_string(r) + ".csv"));
    runs.push_back(read_trajectory_csv(in));
  }
  std::ifstream in(dir / "aggregate.csv");
  const auto agg = read_trajectory_csv(in);
  ASSERT_EQ(agg.size(), runs[0].size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    double f = 0, g = 0, e = 0, d = 0;
    for (const auto& r : runs) {
      f += r[i].f_value / 3;
      g += r[i].grad_norm_sq / 3;
      e += r[i].E_t / 3;
      d += r[i].Delta_t / 3;
    }
    EXPECT_NEAR(agg[i].f_value, f, 1e-12 * (1 + std::abs(f)));
    EXPECT_NEAR(agg[i].grad_norm_sq, g, 1e-12 * (1 + std::abs(g)));
    EXPECT_NEAR(agg[i].E_t, e, 1e-12 * (1 + std::abs(e)));
    EXPECT_NEAR(agg[i].Delta_t, d, 1e-12 * (1 + std::abs(d)));
  }
}

TEST(Experiment, DivergencePersistsPartialRun) {
  json j = toy_json("GD");
  j["algorithm"]["eta"] = 3.0;
  const fs::path dir = scratch("diverge");
  const auto result = run_experiment(load_config(j), dir);
  ASSERT_TRUE(result.any_diverged());
  std::ifstream in(dir / "run_0.csv");
  const auto rows = read_trajectory_csv(in);
  EXPECT_GT(rows.size(), 1u);
  EXPECT_LT(rows.size(), 1001u);
  const json meta = json::parse(slurp(dir / "run_0.meta.json"));
  EXPECT_TRUE(meta["diverged"].get<bool>());
}

TEST(Experiment, BiasSweepAuxMomVersusNaive) {
  double naive_at[2] = {0, 0};
  for (double zeta : {0.1, 1.0, 10.0, 100.0}) {
    json j = toy_json();
    j["problem"]["toy"]["zeta"] = zeta;
    j["algorithm"] = {{"name", "AuxMOM"}, {"eta", 0.1}, {"a", 1.0}, {"K", 10}, {"T", 200}};
    const auto mom = run_experiment(load_config(j), std::nullopt);
    EXPECT_LT(mom.runs[0].trajectory.final_grad_norm_sq(), 1e-6) << "zeta=" << zeta;
    j["algorithm"]["name"] = "Naive";
    const auto naive = run_experiment(load_config(j), std::nullopt);
    if (zeta == 1.0) naive_at[0] = naive.runs[0].trajectory.final_grad_norm_sq();
    if (zeta == 10.0) naive_at[1] = naive.runs[0].trajectory.final_grad_norm_sq();
  }
  const double ratio = naive_at[1] / naive_at[0];
  EXPECT_GE(ratio, 80.0);
  EXPECT_LE(ratio, 120.0);
}

TEST(Sweep, InnerStepsNeverSlowDown) {
  json j = toy_json();
  j["problem"]["toy"] = {{"delta", 0.1}, {"zeta", 1.0}};
  j["algorithm"] = {{"name", "AuxMOM"}, {"eta", 0.5 / 1.1}, {"a", 1.0}, {"K", 1}, {"T", 200}};
  const fs::path dir = scratch("sweep_k");
  const auto points = run_sweep(load_config(j), "algorithm.K", {1, 2, 5, 10}, dir);
  ASSERT_EQ(points.size(), 4u);
  for (std::size_t i = 0; i < points.size(); ++i) {
    ASSERT_GT(points[i].cycles_to_threshold, 0);
    if (i > 0) {
      EXPECT_LE(points[i].cycles_to_threshold, points[i - 1].cycles_to_threshold);
    }
    EXPECT_EQ(points[i].calls_fmh, 200);
  }
  EXPECT_TRUE(fs::exists(dir / "summary.csv"));
  EXPECT_TRUE(fs::exists(dir / "algorithm.K=5" / "run_0.csv"));
  std::ifstream in(dir / "summary.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, kSweepHeader);
}

TEST(Sweep, NaiveFloorGrowsWithBias) {
  json j = toy_json("Naive");
  j["algorithm"]["eta"] = 0.1;
  j["algorithm"]["T"] = 200;
  const auto points =
      run_sweep(load_config(j), "problem.toy.zeta", {0.5, 1, 2, 4}, scratch("sweep_zeta"));
  for (std::size_t i = 1; i < points.size(); ++i) {
    EXPECT_GT(points[i].final_grad_norm_sq, points[i - 1].final_grad_norm_sq);
  }
}

TEST(Sweep, LargerDissimilarityIsSlower) {
  long previous = 0;
  for (double delta : {0.1, 1.0, 10.0}) {
    json j = toy_json();
    j["problem"]["toy"] = {{"delta", delta}, {"zeta", 1.0}};
    j["algorithm"] = {{"name", "AuxMOM"}, {"eta", 0.5 / (1 + delta)}, {"a", 1.0}, {"K", 10}, {"T", 400}};
    const auto r = run_experiment(load_config(j), std::nullopt);
    const long needed = r.runs[0].trajectory.cycles_to_threshold(1e-6);
    ASSERT_GT(needed, 0);
    EXPECT_GT(needed, previous) << "delta=" << delta;
    previous = needed;
  }
}

TEST(Sweep, RejectsUnknownAxis) {
  const auto cfg = load_config(toy_json());
  EXPECT_THROW(run_sweep(cfg, "algorithm.speed", {1}, scratch("bad_axis")), ConfigError);
  EXPECT_THROW(run_sweep(cfg, "algorithm.name", {1}, scratch("bad_axis")), ConfigError);
  EXPECT_THROW(run_sweep(cfg, "", {1}, scratch("bad_axis")), ConfigError);
  // Values are re-validated.
  EXPECT_THROW(run_sweep(cfg, "algorithm.K", {0}, scratch("bad_axis")), ConfigError);
}

TEST(Check, ToyReport) {
  json j = toy_json();
  j["problem"]["toy"] = {{"delta", 0.3}, {"zeta", 2.0}};
  const auto report = check_problem(load_config(j));
  EXPECT_NEAR(report.delta_hat, 0.3, 1e-4);
  ASSERT_TRUE(report.delta_exact.has_value());
  EXPECT_EQ(*report.delta_exact, 0.3);
  EXPECT_TRUE(report.weak_convexity.holds);
}

TEST(Logistic, SyntheticSemiSupervisedRun) {
  const fs::path dir = scratch("logistic");
  {
    std::ofstream out(dir / "data.libsvm");
    out << synthetic::categorical_libsvm(450, 6, 3, 0.05, 1);
  }
  const json j = json::parse(R"({
    "problem": {"logistic": {"path": "data.libsvm", "batch_size": 8}},
    "algorithm": {"name": "AuxMOM", "eta": 0.5, "a": 0.2, "K": 5, "T": 30},
    "seed": 3
  })");
  const auto cfg = load_config(j, dir);
  EXPECT_EQ(std::get<LogisticSpec>(cfg.problem).path, (dir / "data.libsvm").string());
  const auto a = run_experiment(cfg, dir / "out_a");
  const auto b = run_experiment(cfg, dir / "out_b");
  EXPECT_EQ(slurp(dir / "out_a" / "run_0.csv"), slurp(dir / "out_b" / "run_0.csv"));
  const auto& rows = a.runs[0].trajectory.rows;
  EXPECT_LT(rows.back().f_value, rows.front().f_value);
  EXPECT_NEAR(rows.front().f_value, std::log(2.0), 1e-12);
}

TEST(Logistic, RandomLabelHelperBeatsSgdmAtEqualBudget) {
  // Same pipeline as the dataset acceptance check, on a synthetic categorical task.
  const fs::path dir = scratch("semisup");
  std::ofstream(dir / "data.libsvm") << synthetic::categorical_libsvm(3000, 10, 4, 0.05, 9);
  support::SemiSupervisedSetup setup;
  setup.path = (dir / "data.libsvm").string();
  const auto out = support::compare_semisupervised(setup);
  EXPECT_EQ(out.f_budget_auxmom, out.f_budget_sgdm);
  EXPECT_GE(out.wins(), 4);
  std::cout << "AuxMOM eta/a " << out.auxmom.first << "/" << out.auxmom.second << ", SGDm "
            << out.sgdm.first << "/" << out.sgdm.second << "\n";
  for (std::size_t i = 0; i < out.loss_auxmom.size(); ++i) {
    std::cout << "seed " << setup.seeds[i] << ": AuxMOM " << out.loss_auxmom[i] << " SGDm "
              << out.loss_sgdm[i] << "\n";
  }
}

namespace {

int cli(const std::string& args) {
  const char* exe = std::getenv("AUXOPT_CLI");
  if (exe == nullptr) return -1;
  const int status = std::system((std::string(exe) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST(Cli, ExitCodes) {
  if (std::getenv("AUXOPT_CLI") == nullptr) GTEST_SKIP() << "AUXOPT_CLI not set";
  const fs::path dir = scratch("cli");
  auto write = [&](const std::string& name, const json& j) {
    std::ofstream(dir / name) << j.dump(2);
    return (dir / name).string();
  };
  const std::string ok = write("ok.json", toy_json());
  json bad = toy_json();
  bad["algorithm"]["K"] = 0;
  const std::string bad_cfg = write("bad.json", bad);
  json div = toy_json("GD");
  div["algorithm"]["eta"] = 3.0;
  const std::string div_cfg = write("div.json", div);
  json theorem = toy_json();
  theorem["params_mode"] = "theorem";

  EXPECT_EQ(cli("run --config " + ok + " --out " + (dir / "a").string()), 0);
  EXPECT_EQ(cli("run --config " + bad_cfg + " --out " + (dir / "b").string()), 2);
  EXPECT_EQ(cli("run --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(cli("run --config " + div_cfg + " --out " + (dir / "c").string()), 3);
  EXPECT_EQ(cli("run"), 2);
  EXPECT_EQ(cli("params --config " + write("theorem.json", theorem)), 0);
  EXPECT_EQ(cli("check --config " + ok + " --probes 3 --restarts 1"), 0);
  EXPECT_EQ(cli("sweep --config " + ok + " --axis algorithm.K --values 1,2 --out " +
                (dir / "s").string()),
            0);
  EXPECT_EQ(cli("sweep --config " + ok + " --axis nope --values 1 --out " + (dir / "s2").string()), 2);
  EXPECT_EQ(cli("sweep --config " + ok + " --axis algorithm.K --values 1,x --out " +
                (dir / "s3").string()),
            2);
  EXPECT_TRUE(fs::exists(dir / "s" / "summary.csv"));
}

TEST(Cli, SeedOverrideFromEnvironment) {
  const char* exe = std::getenv("AUXOPT_CLI");
  if (exe == nullptr) GTEST_SKIP() << "AUXOPT_CLI not set";
  const fs::path dir = scratch("cli_seed");
  json j = toy_json();  // seed 7
  j["noise"] = {{"sigma_f", 1.0}, {"sigma_h", 1.0}, {"rho", 0.0}};
  std::ofstream(dir / "c.json") << j.dump();
  const std::string cfg = (dir / "c.json").string();
  auto run_with = [&](const std::string& env, const std::string& out) {
    const std::string cmd = env + " " + exe + " run --config " + cfg + " --out " +
                            (dir / out).string() + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  };
  ASSERT_EQ(run_with("", "plain"), 0);
  ASSERT_EQ(run_with("AUXOPT_SEED=7", "env7"), 0);
  ASSERT_EQ(run_with("AUXOPT_SEED=8", "env8"), 0);
  EXPECT_EQ(slurp(dir / "plain" / "run_0.csv"), slurp(dir / "env7" / "run_0.csv"));
  EXPECT_NE(slurp(dir / "plain" / "run_0.csv"), slurp(dir / "env8" / "run_0.csv"));
  EXPECT_EQ(run_with("AUXOPT_SEED=abc", "envbad"), 2);
}
