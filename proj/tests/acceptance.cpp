// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
//
// Usage: acceptance [path/to/auxopt]
// The CLI path may also come from AUXOPT_CLI. The mushrooms file is looked up
// at AUXOPT_MUSHROOMS, then at data/mushrooms under the source tree.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "auxopt/auxopt.hpp"
#include "support/components.hpp"
#include "support/reference.hpp"
#include "support/semisupervised.hpp"
#include "support/synthetic.hpp"

using namespace auxopt;
using namespace auxopt::optimizers;
namespace fs = std::filesystem;

namespace {

// Tolerances and budgets, pinned.
constexpr double kFloorMin = 0.1;
constexpr double kFloorTol = 1e-8;
constexpr double kBiasFreeMax = 1e-8;
constexpr double kToyRuntime = 1.0;  // seconds
constexpr double kEquivTol = 1e-12;
constexpr double kSvrgTol = 1e-10;
constexpr double kContractionTol = 1e-10;
constexpr double kContractionFloor = 1e-3;  // below this the zeta terms cancel only to round-off
constexpr double kKThreshold = 1e-6;
constexpr double kVarianceTarget = 0.2;
constexpr double kVarianceRelTol = 0.05;
constexpr int kVarianceSamples = 1000000;
constexpr double kDeltaRelTol = 1e-4;
constexpr double kLogisticDeltaMax = 1e-6;
constexpr std::size_t kMushroomsRows = 8124;
constexpr std::size_t kMushroomsFeatures = 112;
constexpr double kGoldenTol = 1e-12;
constexpr int kSemiSupervisedWins = 4;
constexpr double kSemiSupervisedRuntime = 60.0;

constexpr double kMomBeta = 0.100902777777777777777777777778;
constexpr double kMomEta = 0.00262341618066702240576167588118;
constexpr double kMomA = 0.0944429825040128066074203317225;
constexpr double kMvrEta = 0.00378566790173362428935669115902;
constexpr double kMvrA = 0.0165669613703219984659680950737;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

OptimizerConfig make_cfg(Algorithm alg, double eta, double a, int K, int T,
                         MomentumInit m0 = MomentumInit::single_sample) {
  OptimizerConfig c;
  c.algorithm = alg;
  c.eta = eta;
  c.a = a;
  c.K = K;
  c.T = T;
  c.m0_mode = m0;
  return c;
}

std::vector<Vector> iterates(const OraclePair& o, const Vector& x0, const OptimizerConfig& cfg) {
  const RandomToken tok = root_token(1);
  OptimizerState s = initial_state(o, x0, cfg, stream_fork(tok, 0));
  std::vector<Vector> out{x0};
  CycleTrace trace;
  for (int t = 1; t <= cfg.T; ++t) {
    s = cycle(std::move(s), o, cfg, stream_fork(tok, static_cast<std::uint64_t>(t)), &trace);
    out.insert(out.end(), trace.iterates.begin() + 1, trace.iterates.end());
  }
  return out;
}

reference::Grad as_ref(const OraclePair::ExactGrad& g) {
  return [g](const reference::Vec& x) { return g(Vector(x)).std_vector(); };
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string mushrooms_path() {
  if (const char* env = std::getenv("AUXOPT_MUSHROOMS")) return env;
  return (fs::path(AUXOPT_SOURCE_DIR) / "data" / "mushrooms").string();
}

Verdict naive_floor() {
  const auto start = std::chrono::steady_clock::now();
  const auto p = problems::make_toy_pair(0.0, 1.0, NoiseSpec{});
  const auto traj =
      run(p.oracle, Vector{1.0}, make_cfg(Algorithm::Naive, 0.5, 1.0, 10, 200), root_token(1));
  const double secs = seconds_since(start);
  const double g2 = traj.final_grad_norm_sq();
  const double xs = reference::naive_fixed_point(0.0, 1.0, 0.5, 10);
  const double err = std::abs(g2 - xs * xs);
  return {g2 >= kFloorMin && err < kFloorTol && secs < kToyRuntime,
          fmt("final |grad f|^2 = %.12f, closed form %.12f, |diff| = %.2e, %.3f s", g2, xs * xs,
              err, secs)};
}

Verdict auxmom_bias_free() {
  const auto start = std::chrono::steady_clock::now();
  const double delta = 1.0;
  const int K = 10;
  const double eta = std::min(0.5, 1.0 / (delta * K));
  double worst = 0.0;
  for (double zeta : {0.1, 1.0, 10.0, 100.0}) {
    const auto p = problems::make_toy_pair(delta, zeta, NoiseSpec{});
    const auto traj =
        run(p.oracle, Vector{1.0}, make_cfg(Algorithm::AuxMOM, eta, 1.0, K, 200), root_token(1));
    worst = std::max(worst, traj.final_grad_norm_sq());
  }
  const double secs = seconds_since(start);
  return {worst < kBiasFreeMax && secs < kToyRuntime,
          fmt("worst final |grad f|^2 over zeta = %.3e, %.3f s", worst, secs)};
}

Verdict equivalences() {
  Matrix Af(3, 3), Ah(3, 3);
  Af << 2.0, 0.4, 0.0, 0.4, 1.0, -0.2, 0.0, -0.2, 0.6;
  Ah << 1.5, 0.0, 0.1, 0.0, 1.2, 0.0, 0.1, 0.0, 0.9;
  const auto q = problems::make_quadratic_nd(Af, Ah, Vector{1.0, -2.0, 0.5}, NoiseSpec{});
  const Vector x0{1.0, 1.0, -1.0};

  // (a) unit momentum against iterated local steps
  const auto ref = reference::iterate_local_steps(as_ref(*q.oracle.exact_grad_f),
                                                  as_ref(*q.oracle.exact_grad_h),
                                                  x0.std_vector(), 0.1, 4, 25);
  double err_a = 0.0;
  for (Algorithm alg : {Algorithm::AuxMOM, Algorithm::AuxMVR, Algorithm::AuxMOM_V0}) {
    const auto its = iterates(q.oracle, x0, make_cfg(alg, 0.1, 1.0, 4, 25));
    if (its.size() != ref.size()) return {false, "(a) iterate count mismatch"};
    for (std::size_t i = 0; i < ref.size(); ++i) {
      for (std::size_t j = 0; j < 3; ++j) err_a = std::max(err_a, std::abs(its[i][j] - ref[i][j]));
    }
  }

  // (b) h = f, m^0 = 0: gradient descent on f, coded directly on A_f
  const auto same = problems::make_quadratic_nd(Af, Af, Vector::zeros(3), NoiseSpec{});
  const auto its = iterates(same.oracle, x0,
                            make_cfg(Algorithm::AuxMOM, 0.2, 0.3, 5, 20, MomentumInit::zero));
  Eigen::Vector3d x(1.0, 1.0, -1.0);
  double err_b = 0.0;
  for (std::size_t i = 0; i < its.size(); ++i) {
    for (int j = 0; j < 3; ++j) err_b = std::max(err_b, std::abs(its[i][static_cast<std::size_t>(j)] - x(j)));
    x -= 0.2 * (Af * x);
  }

  // (c) decentralized AuxMOM over components is SVRG
  const auto comps = support::random_components(10, 4, 3);
  const auto set = support::component_helpers(comps, 1);
  const auto cfg = make_cfg(Algorithm::AuxMOM, 0.1, 1.0, 5, 100);
  const Vector y0{1.0, -1.0, 0.5, 2.0};
  const RandomToken tok = root_token(17);
  const auto xs = decentralized::run_decentralized(set, y0, cfg, tok, decentralized::Variant::AuxMOM);
  std::vector<std::size_t> index;
  for (long t = 1; t <= cfg.T; ++t) {
    index.push_back(
        decentralized::sample_helpers(stream_fork(tok, static_cast<std::uint64_t>(t)), 10, 1)[0]);
  }
  const auto svrg = reference::svrg(comps, y0.std_vector(), cfg.eta, cfg.K, index);
  if (xs.size() != svrg.size()) return {false, "(c) cycle count mismatch"};
  double err_c = 0.0;
  for (std::size_t t = 0; t < svrg.size(); ++t) {
    for (std::size_t j = 0; j < 4; ++j) err_c = std::max(err_c, std::abs(xs[t][j] - svrg[t][j]));
  }
  return {err_a < kEquivTol && err_b < kEquivTol && err_c < kSvrgTol,
          fmt("(a) %.2e (b) %.2e (c) %.2e", err_a, err_b, err_c)};
}

Verdict contraction() {
  double worst = 0.0;
  int ratios = 0;
  for (double delta : {0.0, 0.5, 2.0}) {
    for (int K : {1, 3, 8}) {
      const double eta = 0.4 / (1.0 + delta);
      const auto p = problems::make_toy_pair(delta, 2.0, NoiseSpec{});
      const auto its =
          iterates(p.oracle, Vector{1.0}, make_cfg(Algorithm::AuxMOM, eta, 1.0, K, 6));
      const double rho = reference::auxmom_contraction(delta, eta, K);
      for (std::size_t t = 0; t < 6; ++t) {
        const double x = its[t * static_cast<std::size_t>(K)][0];
        if (std::abs(x) < kContractionFloor) break;
        worst = std::max(worst, std::abs(its[(t + 1) * static_cast<std::size_t>(K)][0] / x - rho));
        ++ratios;
      }
    }
  }
  return {worst < kContractionTol && ratios >= 9,
          fmt("max |ratio - rho| = %.2e over %d cycle ratios", worst, ratios)};
}

Verdict k_benefit() {
  const double delta = 0.1;
  const auto p = problems::make_toy_pair(delta, 1.0, NoiseSpec{});
  std::vector<long> needed;
  std::string detail = "cycles to 1e-6 for K=1,2,5,10:";
  for (int K : {1, 2, 5, 10}) {
    const auto traj = run(p.oracle, Vector{1.0},
                          make_cfg(Algorithm::AuxMOM, 0.5 / (1.0 + delta), 1.0, K, 500),
                          root_token(1));
    needed.push_back(traj.cycles_to_threshold(kKThreshold));
    detail += " " + std::to_string(needed.back());
  }
  bool ok = needed.front() > 0;
  for (std::size_t i = 1; i < needed.size(); ++i) ok = ok && needed[i] > 0 && needed[i] <= needed[i - 1];
  return {ok, detail};
}

Verdict noise_variance() {
  const auto p = problems::make_toy_pair(0.5, 1.0, NoiseSpec{1.0, 1.0, 0.9});
  const Vector x{0.7};
  const double mean = ((*p.oracle.exact_grad_f)(x) - (*p.oracle.exact_grad_h)(x))[0];
  double sum = 0.0, sq = 0.0;
  const RandomToken tok = root_token(2024);
  for (int i = 0; i < kVarianceSamples; ++i) {
    const double d = p.oracle.grad_f_minus_h(x, stream_fork(tok, static_cast<std::uint64_t>(i)))[0] - mean;
    sum += d;
    sq += d * d;
  }
  const double n = kVarianceSamples;
  const double var = sq / n - (sum / n) * (sum / n);
  const double rel = std::abs(var / kVarianceTarget - 1.0);
  return {rel < kVarianceRelTol, fmt("variance %.5f (target 0.2, rel err %.3f)", var, rel)};
}

Verdict delta_estimator() {
  NoiseStream s(root_token(77));
  double worst = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const Eigen::Index n = 2 + static_cast<Eigen::Index>(s.next_below(5));
    Matrix B(n, n), C(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) {
        B(r, c) = s.next_gaussian();
        C(r, c) = s.next_gaussian();
      }
    }
    const Matrix Af = B * B.transpose();
    const Matrix Ah = C * C.transpose();
    const auto q = problems::make_quadratic_nd(Af, Ah, Vector::zeros(static_cast<std::size_t>(n)),
                                               NoiseSpec{});
    theory::DeltaEstimateOptions opt;
    opt.token = stream_fork(root_token(78), static_cast<std::uint64_t>(inst));
    const auto probes = theory::make_probe_points(
        static_cast<std::size_t>(n), 20, 1.0, stream_fork(root_token(79), static_cast<std::uint64_t>(inst)));
    const double d =
        theory::estimate_delta(*q.oracle.exact_grad_f, *q.oracle.exact_grad_h, probes, opt);
    worst = std::max(worst, std::abs(d / spectral_norm(Af - Ah) - 1.0));
  }

  const auto data = problems::parse_libsvm(synthetic::categorical_libsvm(600, 8, 4, 0.05, 3));
  problems::LogisticTask task;
  task.features = data.to_dense();
  task.labels = problems::map_binary_labels(data.labels);
  problems::LogisticTask relabeled = task;
  NoiseStream r(root_token(5));
  for (double& y : relabeled.labels) y = r.next_sign();
  const auto o = problems::make_logistic_oracle(task, relabeled, 0, NoiseSpec{});
  const auto probes = theory::make_probe_points(task.dim(), 20, 1.0, root_token(2));
  const double logistic = theory::estimate_delta(*o.exact_grad_f, *o.exact_grad_h, probes);
  return {worst < kDeltaRelTol && logistic < kLogisticDeltaMax,
          fmt("quadratics max rel err %.2e; logistic random-label %.2e", worst, logistic)};
}

Verdict parser() {
  const std::pair<const char*, std::size_t> malformed[] = {
      {"1 1:1\n1 3:1 2:1\n", 2},  // descending indices
      {"1 1:1\nx 1:1\n", 2},      // bad label
      {"1 1:1\n\n1 a:1\n", 3},    // bad index
      {"1 0:1\n", 1},             // zero index
      {"1 2:1 2:1\n", 1},         // repeated index
      {"1 4\n", 1},               // no colon
      {"1 4:\n", 1},              // no value
      {"1 4:nan\n", 1},           // non-finite value
      {"1 1:1\n1 1:1e999\n", 2},  // overflow
      {"1 1:1 3:zz\n", 1},        // bad value
  };
  int located = 0;
  for (const auto& [text, line] : malformed) {
    try {
      problems::parse_libsvm(text);
    } catch (const problems::LibsvmParseError& e) {
      const bool names_line =
          std::string(e.what()).find("line " + std::to_string(line)) != std::string::npos;
      located += e.line() == line && names_line;
    }
  }
  const std::string malformed_note = fmt("malformed corpus %d/10 line-numbered", located);

  const std::string path = mushrooms_path();
  std::ifstream in(path);
  if (!in) return {false, "dataset not found at " + path + "; " + malformed_note};
  const auto data = problems::parse_libsvm(in);
  const bool shape = data.num_rows() == kMushroomsRows && data.num_features == kMushroomsFeatures;
  return {shape && located == 10, fmt("mushrooms %zu x %zu; ", data.num_rows(), data.num_features) +
                                      malformed_note};
}

Verdict theorem_params() {
  theory::TheoryParams p;
  p.L = 1.0;
  p.delta = 0.1;
  p.K = 10;
  p.T = 100;
  p.sigma_f = p.sigma_h = p.sigma_fmh = 1.0;
  p.F0 = 1.0;
  const auto mom = theory::auxmom_params(p);
  const auto mvr = theory::auxmvr_params(p);
  const double golden = std::max({std::abs(mom.beta - kMomBeta), std::abs(mom.eta - kMomEta),
                                  std::abs(mom.a - kMomA), std::abs(mvr.eta - kMvrEta),
                                  std::abs(mvr.a - kMvrA)});

  // eta is nonincreasing in delta, K and T; a stays in [1/T, 1].
  const double deltas[] = {0.01, 0.1, 1.0};
  const int Ks[] = {1, 5, 20};
  const int Ts[] = {10, 100, 1000};
  int violations = 0;
  for (const auto& constants :
       {theory::TheoremConstants::headline(), theory::TheoremConstants::proof_variant()}) {
    for (bool mvr_rule : {false, true}) {
      auto eta_at = [&](int i, int j, int k) {
        theory::TheoryParams q = p;
        q.delta = deltas[i];
        q.K = Ks[j];
        q.T = Ts[k];
        q.sigma_fmh = 0.7;
        double eta = 0.0, a = 0.0;
        if (mvr_rule) {
          const auto r = theory::auxmvr_params(q, constants);
          eta = r.eta;
          a = r.a;
        } else {
          const auto r = theory::auxmom_params(q, constants);
          eta = r.eta;
          a = r.a;
        }
        violations += !(a >= 1.0 / q.T && a <= 1.0 && eta <= 1.0 / q.L);
        return eta;
      };
      for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
          for (int k = 0; k < 3; ++k) {
            const double e = eta_at(i, j, k);
            if (i + 1 < 3) violations += eta_at(i + 1, j, k) > e;
            if (j + 1 < 3) violations += eta_at(i, j + 1, k) > e;
            if (k + 1 < 3) violations += eta_at(i, j, k + 1) > e;
          }
        }
      }
    }
  }
  return {golden < kGoldenTol && violations == 0,
          fmt("max golden error %.2e; %d grid violations", golden, violations)};
}

Verdict semisupervised() {
  const std::string path = mushrooms_path();
  if (!fs::exists(path)) return {false, "dataset not found at " + path};
  const auto start = std::chrono::steady_clock::now();
  support::SemiSupervisedSetup setup;
  setup.path = path;
  const auto out = support::compare_semisupervised(setup);
  const double secs = seconds_since(start);
  std::string losses;
  for (std::size_t i = 0; i < out.loss_auxmom.size(); ++i) {
    losses += fmt(" %.5f/%.5f", out.loss_auxmom[i], out.loss_sgdm[i]);
  }
  return {out.wins() >= kSemiSupervisedWins && out.f_budget_auxmom == out.f_budget_sgdm &&
              secs < kSemiSupervisedRuntime,
          fmt("AuxMOM wins %d/5 at %ld f-gradients, %.1f s; AuxMOM/SGDm:", out.wins(),
              out.f_budget_auxmom, secs) +
              losses};
}

Verdict determinism(const std::string& cli) {
  if (cli.empty()) return {false, "CLI path not given (argument or AUXOPT_CLI)"};
  const fs::path dir = fs::temp_directory_path() / "auxopt_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::ofstream(dir / "config.json") << R"({
  "problem": {"toy": {"delta": 1, "zeta": 10}},
  "algorithm": {"name": "AuxMVR", "eta": 0.05, "a": 0.2, "K": 10, "T": 200},
  "noise": {"sigma_f": 1, "sigma_h": 1, "rho": 0.5},
  "repeats": 3,
  "seed": 11
})";
  for (const char* out : {"a", "b"}) {
    const std::string cmd = "\"" + cli + "\" run --config \"" + (dir / "config.json").string() +
                            "\" --out \"" + (dir / out).string() + "\" >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) return {false, std::string("run failed: ") + cmd};
  }
  int compared = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    if (entry.path().extension() != ".csv") continue;
    const fs::path other = dir / "b" / entry.path().filename();
    if (slurp(entry.path()) != slurp(other)) {
      return {false, entry.path().filename().string() + " differs"};
    }
    ++compared;
  }
  return {compared == 4, fmt("%d CSV files byte-identical", compared)};
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = argc > 1 ? argv[1] : "";
  if (cli.empty()) {
    if (const char* env = std::getenv("AUXOPT_CLI")) cli = env;
  }
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
      {"naive bias floor", naive_floor},
      {"AuxMOM bias correction", auxmom_bias_free},
      {"equivalence oracles", equivalences},
      {"toy contraction factor", contraction},
      {"larger K never slower", k_benefit},
      {"correlated-noise variance", noise_variance},
      {"delta estimator", delta_estimator},
      {"LIBSVM parser", parser},
      {"theorem parameter formulas", theorem_params},
      {"semi-supervised logistic", semisupervised},
      {"CLI determinism", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += !v.pass;
    std::printf("%s %2zu %s: %s\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures,
              criteria.size());
  return failures == 0 ? 0 : 1;
}
