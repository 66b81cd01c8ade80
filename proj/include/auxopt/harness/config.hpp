#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "auxopt/core/oracle.hpp"
#include "auxopt/optimizers/config.hpp"
#include "auxopt/problems/tasks.hpp"

namespace auxopt::harness {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Invalid experiment configuration; `field()` is the dotted path at fault.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

struct ToySpec {
  double delta = 0.0;
  double zeta = 0.0;
};

struct QuadraticSpec {
  std::vector<std::vector<double>> A_f;
  std::vector<std::vector<double>> A_h;
  std::vector<double> b_h;
};

struct LogisticSpec {
  std::string path;  // resolved against the config file's directory
  problems::SplitFractions split;
  problems::HelperBuild helper;
  std::size_t batch_size = 0;  // 0 = full gradients
  std::size_t helper_batch_size = 0;
  double l2_reg = 0.0;
};

using ProblemSpec = std::variant<ToySpec, QuadraticSpec, LogisticSpec>;

enum class ParamsMode { manual, theorem };

struct ExperimentConfig {
  ProblemSpec problem;
  optimizers::OptimizerConfig algorithm;
  NoiseSpec noise;
  std::uint64_t seed = 0;
  ParamsMode params_mode = ParamsMode::manual;
  int repeats = 1;
  std::string output_path = "out";
  std::optional<std::vector<double>> x0;
  bool diagnostics = true;
  double threshold = 1e-6;  // for cycles-to-threshold in sweep summaries
};

namespace detail {

/// Walks one JSON object, remembering which keys were read so leftovers can be
/// reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(display(), "expected an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  std::optional<double> number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if (!v.is_number()) throw ConfigError(child(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(child(key), "must be finite");
    return d;
  }

  std::optional<long long> integer(const std::string& key) {
    auto d = number(key);
    if (!d) return std::nullopt;
    if (std::floor(*d) != *d) throw ConfigError(child(key), "expected an integer");
    return static_cast<long long>(*d);
  }

  std::optional<std::string> string(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if (!v.is_string()) throw ConfigError(child(key), "expected a string");
    return v.get<std::string>();
  }

  std::optional<bool> boolean(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if (!v.is_boolean()) throw ConfigError(child(key), "expected true or false");
    return v.get<bool>();
  }

  std::optional<std::vector<double>> numbers(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected a number");
      }
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  std::optional<std::vector<std::vector<double>>> matrix(const std::string& key) {
    if (!has(key)) return std::nullopt;
    const json& v = raw(key);
    if (!v.is_array()) throw ConfigError(child(key), "expected an array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t r = 0; r < v.size(); ++r) {
      const std::string row_path = child(key) + "[" + std::to_string(r) + "]";
      if (!v[r].is_array()) throw ConfigError(row_path, "expected an array of numbers");
      std::vector<double> row;
      for (const auto& c : v[r]) {
        if (!c.is_number()) throw ConfigError(row_path, "expected numbers");
        row.push_back(c.get<double>());
      }
      out.push_back(std::move(row));
    }
    return out;
  }

  void finish() const {
    for (const auto& [key, _] : j_.items()) {
      if (!seen_.count(key)) throw ConfigError(child(key), "unknown key");
    }
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <class T>
T require(std::optional<T> v, const std::string& field) {
  if (!v) throw ConfigError(field, "required field is missing");
  return *v;
}

inline ProblemSpec read_problem(const json& j, const std::filesystem::path& base_dir) {
  ObjectReader r(j, "problem");
  const int kinds = int(r.has("toy")) + int(r.has("quadratic_nd")) + int(r.has("logistic"));
  if (kinds != 1) {
    throw ConfigError("problem", "expected exactly one of toy, quadratic_nd, logistic");
  }
  ProblemSpec spec;
  if (r.has("toy")) {
    ObjectReader t(r.raw("toy"), "problem.toy");
    ToySpec toy;
    toy.delta = t.number("delta").value_or(0.0);
    toy.zeta = t.number("zeta").value_or(0.0);
    if (toy.delta < 0.0) throw ConfigError("problem.toy.delta", "must be >= 0");
    t.finish();
    spec = toy;
  } else if (r.has("quadratic_nd")) {
    ObjectReader q(r.raw("quadratic_nd"), "problem.quadratic_nd");
    QuadraticSpec quad;
    quad.A_f = require(q.matrix("A_f"), "problem.quadratic_nd.A_f");
    quad.A_h = require(q.matrix("A_h"), "problem.quadratic_nd.A_h");
    quad.b_h = q.numbers("b_h").value_or(std::vector<double>(quad.A_f.size(), 0.0));
    q.finish();
    spec = quad;
  } else {
    ObjectReader l(r.raw("logistic"), "problem.logistic");
    LogisticSpec log;
    const std::string path = require(l.string("path"), "problem.logistic.path");
    std::filesystem::path p(path);
    if (p.is_relative()) p = base_dir / p;
    if (!std::filesystem::exists(p)) {
      throw ConfigError("problem.logistic.path", "file not found: " + p.string());
    }
    log.path = p.string();
    if (auto split = l.numbers("split")) {
      if (split->size() != 3) {
        throw ConfigError("problem.logistic.split", "expected [train, test, unlabeled]");
      }
      log.split = {(*split)[0], (*split)[1], (*split)[2]};
      if (!(log.split.train > 0 && log.split.test > 0 && log.split.unlabeled > 0) ||
          std::abs(log.split.train + log.split.test + log.split.unlabeled - 1.0) > 1e-9) {
        throw ConfigError("problem.logistic.split", "fractions must be positive and sum to 1");
      }
    }
    if (l.has("helper")) {
      ObjectReader h(l.raw("helper"), "problem.logistic.helper");
      const std::string kind = h.string("kind").value_or("random_labels");
      if (kind == "random_labels") {
        log.helper.kind = problems::HelperKind::random_labels;
      } else if (kind == "coreset") {
        log.helper.kind = problems::HelperKind::coreset;
      } else if (kind == "subset_batch") {
        log.helper.kind = problems::HelperKind::subset_batch;
      } else {
        throw ConfigError("problem.logistic.helper.kind", "unknown helper kind '" + kind + "'");
      }
      log.helper.fraction = h.number("fraction").value_or(0.2);
      if (!(log.helper.fraction > 0.0 && log.helper.fraction <= 1.0)) {
        throw ConfigError("problem.logistic.helper.fraction", "must lie in (0, 1]");
      }
      if (auto idx = h.numbers("indices")) {
        for (double v : *idx) {
          if (v < 0 || std::floor(v) != v) {
            throw ConfigError("problem.logistic.helper.indices", "expected row indices");
          }
          log.helper.indices.push_back(static_cast<std::size_t>(v));
        }
      }
      if (log.helper.kind == problems::HelperKind::subset_batch && log.helper.indices.empty()) {
        throw ConfigError("problem.logistic.helper.indices", "subset_batch needs indices");
      }
      h.finish();
    }
    const auto batch = l.integer("batch_size").value_or(0);
    if (batch < 0) throw ConfigError("problem.logistic.batch_size", "must be >= 0");
    log.batch_size = static_cast<std::size_t>(batch);
    const auto helper_batch = l.integer("helper_batch_size").value_or(batch);
    if (helper_batch < 0) throw ConfigError("problem.logistic.helper_batch_size", "must be >= 0");
    log.helper_batch_size = static_cast<std::size_t>(helper_batch);
    log.l2_reg = l.number("l2_reg").value_or(0.0);
    if (log.l2_reg < 0.0) throw ConfigError("problem.logistic.l2_reg", "must be >= 0");
    l.finish();
    spec = log;
  }
  r.finish();
  return spec;
}

inline optimizers::OptimizerConfig read_algorithm(const json& j, ParamsMode mode) {
  ObjectReader r(j, "algorithm");
  optimizers::OptimizerConfig cfg;
  const std::string name = require(r.string("name"), "algorithm.name");
  if (!optimizers::parse_algorithm(name, cfg.algorithm)) {
    throw ConfigError("algorithm.name", "unknown algorithm '" + name + "'");
  }
  const auto eta = r.number("eta");
  if (!eta && mode == ParamsMode::manual) {
    throw ConfigError("algorithm.eta", "required in manual params mode");
  }
  cfg.eta = eta.value_or(1.0);
  if (!(cfg.eta > 0.0)) throw ConfigError("algorithm.eta", "must be > 0");
  cfg.a = r.number("a").value_or(0.1);
  if (!(cfg.a > 0.0 && cfg.a <= 1.0)) throw ConfigError("algorithm.a", "must lie in (0, 1]");
  const auto K = r.integer("K").value_or(1);
  if (K < 1) throw ConfigError("algorithm.K", "must be >= 1");
  const auto T = require(r.integer("T"), "algorithm.T");
  if (T < 1) throw ConfigError("algorithm.T", "must be >= 1");
  cfg.K = static_cast<int>(K);
  cfg.T = static_cast<int>(T);
  if (auto m0 = r.string("m0_mode")) {
    if (!optimizers::parse_momentum_init(*m0, cfg.m0_mode)) {
      throw ConfigError("algorithm.m0_mode", "expected zero, single_sample or big_batch");
    }
  }
  cfg.split_fraction = r.number("split_fraction").value_or(0.5);
  if (!(cfg.split_fraction >= 0.0 && cfg.split_fraction <= 1.0)) {
    throw ConfigError("algorithm.split_fraction", "must lie in [0, 1]");
  }
  r.finish();
  return cfg;
}

}  // namespace detail

/// Validates `j` against the experiment schema and applies defaults.
/// Relative dataset paths resolve against `base_dir`.
inline ExperimentConfig load_config(const json& j, const std::filesystem::path& base_dir = ".") {
  detail::ObjectReader r(j, "");
  ExperimentConfig cfg;
  if (auto v = r.integer("schema_version"); v && *v != kSchemaVersion) {
    throw ConfigError("schema_version", "unsupported version " + std::to_string(*v));
  }
  if (auto mode = r.string("params_mode")) {
    if (*mode == "manual") {
      cfg.params_mode = ParamsMode::manual;
    } else if (*mode == "theorem") {
      cfg.params_mode = ParamsMode::theorem;
    } else {
      throw ConfigError("params_mode", "expected manual or theorem");
    }
  }
  if (!r.has("problem")) throw ConfigError("problem", "required field is missing");
  cfg.problem = detail::read_problem(r.raw("problem"), base_dir);
  if (!r.has("algorithm")) throw ConfigError("algorithm", "required field is missing");
  cfg.algorithm = detail::read_algorithm(r.raw("algorithm"), cfg.params_mode);

  if (r.has("noise")) {
    detail::ObjectReader n(r.raw("noise"), "noise");
    cfg.noise.sigma_f = n.number("sigma_f").value_or(0.0);
    cfg.noise.sigma_h = n.number("sigma_h").value_or(0.0);
    cfg.noise.rho = n.number("rho").value_or(0.0);
    n.finish();
    if (cfg.noise.sigma_f < 0.0) throw ConfigError("noise.sigma_f", "must be >= 0");
    if (cfg.noise.sigma_h < 0.0) throw ConfigError("noise.sigma_h", "must be >= 0");
    if (std::abs(cfg.noise.rho) > 1.0) throw ConfigError("noise.rho", "must lie in [-1, 1]");
  }
  const auto seed = r.integer("seed").value_or(0);
  if (seed < 0) throw ConfigError("seed", "must be >= 0");
  cfg.seed = static_cast<std::uint64_t>(seed);
  const auto repeats = r.integer("repeats").value_or(1);
  if (repeats < 1) throw ConfigError("repeats", "must be >= 1");
  cfg.repeats = static_cast<int>(repeats);
  cfg.output_path = r.string("output_path").value_or("out");
  cfg.x0 = r.numbers("x0");
  cfg.diagnostics = r.boolean("diagnostics").value_or(true);
  cfg.threshold = r.number("threshold").value_or(1e-6);
  if (!(cfg.threshold > 0.0)) throw ConfigError("threshold", "must be > 0");
  r.finish();

  if (cfg.params_mode == ParamsMode::theorem &&
      cfg.algorithm.algorithm != optimizers::Algorithm::AuxMOM &&
      cfg.algorithm.algorithm != optimizers::Algorithm::AuxMVR) {
    throw ConfigError("params_mode", "theorem mode needs algorithm AuxMOM or AuxMVR");
  }
  return cfg;
}

inline ExperimentConfig load_config(const std::string& text,
                                    const std::filesystem::path& base_dir = ".") {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }
  return load_config(j, base_dir);
}

/// Fully defaulted JSON form of a config; load_config(to_json(c)) == c.
inline json to_json(const ExperimentConfig& cfg) {
  json j;
  j["schema_version"] = kSchemaVersion;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, ToySpec>) {
          j["problem"]["toy"] = {{"delta", p.delta}, {"zeta", p.zeta}};
        } else if constexpr (std::is_same_v<P, QuadraticSpec>) {
          j["problem"]["quadratic_nd"] = {{"A_f", p.A_f}, {"A_h", p.A_h}, {"b_h", p.b_h}};
        } else {
          json helper;
          switch (p.helper.kind) {
            case problems::HelperKind::random_labels: helper["kind"] = "random_labels"; break;
            case problems::HelperKind::coreset: helper["kind"] = "coreset"; break;
            case problems::HelperKind::subset_batch: helper["kind"] = "subset_batch"; break;
          }
          helper["fraction"] = p.helper.fraction;
          if (!p.helper.indices.empty()) helper["indices"] = p.helper.indices;
          j["problem"]["logistic"] = {
              {"path", p.path},
              {"split", {p.split.train, p.split.test, p.split.unlabeled}},
              {"helper", helper},
              {"batch_size", p.batch_size},
              {"helper_batch_size", p.helper_batch_size},
              {"l2_reg", p.l2_reg}};
        }
      },
      cfg.problem);
  const auto& a = cfg.algorithm;
  j["algorithm"] = {{"name", std::string(optimizers::to_string(a.algorithm))},
                    {"eta", a.eta},
                    {"a", a.a},
                    {"K", a.K},
                    {"T", a.T},
                    {"m0_mode", std::string(optimizers::to_string(a.m0_mode))},
                    {"split_fraction", a.split_fraction}};
  j["noise"] = {{"sigma_f", cfg.noise.sigma_f},
                {"sigma_h", cfg.noise.sigma_h},
                {"rho", cfg.noise.rho}};
  j["seed"] = cfg.seed;
  j["params_mode"] = cfg.params_mode == ParamsMode::manual ? "manual" : "theorem";
  j["repeats"] = cfg.repeats;
  j["output_path"] = cfg.output_path;
  if (cfg.x0) j["x0"] = *cfg.x0;
  j["diagnostics"] = cfg.diagnostics;
  j["threshold"] = cfg.threshold;
  return j;
}

}  // namespace auxopt::harness
