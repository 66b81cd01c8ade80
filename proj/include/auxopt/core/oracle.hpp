#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "auxopt/core/random.hpp"
#include "auxopt/core/vector.hpp"

namespace auxopt {

/// Variances of the additive gradient noise and the correlation of the
/// f-noise and h-noise drawn under one shared token.
struct NoiseSpec {
  double sigma_f = 0.0;
  double sigma_h = 0.0;
  double rho = 0.0;

  void validate() const {
    if (!(sigma_f >= 0.0) || !(sigma_h >= 0.0) || !std::isfinite(sigma_f) ||
        !std::isfinite(sigma_h)) {
      throw std::invalid_argument("NoiseSpec: sigmas must be finite and >= 0");
    }
    if (!(std::abs(rho) <= 1.0)) {
      throw std::invalid_argument("NoiseSpec: rho must lie in [-1, 1]");
    }
  }

  /// Variance of the difference estimator g_f - g_h under a shared token.
  double sigma_f_minus_h_sq() const {
    const double v =
        sigma_f * sigma_f + sigma_h * sigma_h - 2.0 * rho * sigma_f * sigma_h;
    return v < 0.0 ? 0.0 : v;
  }

  double sigma_f_minus_h() const { return std::sqrt(sigma_f_minus_h_sq()); }

  bool deterministic() const { return sigma_f == 0.0 && sigma_h == 0.0; }
};

struct NoisePair {
  Vector noise_f;
  Vector noise_h;
};

/// Correlated Gaussian noise for one token.
///
/// Each coordinate of noise_f has variance sigma_f^2/dim (so E||noise_f||^2 =
/// sigma_f^2), likewise for noise_h, with per-coordinate correlation rho.
inline NoisePair draw_gaussian_noise(const NoiseSpec& spec,
                                     const RandomToken& token,
                                     std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("draw_gaussian_noise: dim must be >= 1");
  spec.validate();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  const double sf = spec.sigma_f * scale;
  const double sh = spec.sigma_h * scale;
  const double orth = std::sqrt(std::max(0.0, 1.0 - spec.rho * spec.rho));
  std::vector<double> nf(dim);
  std::vector<double> nh(dim);
  NoiseStream stream(token);
  for (std::size_t i = 0; i < dim; ++i) {
    const double z1 = stream.next_gaussian();
    const double z2 = stream.next_gaussian();
    nf[i] = sf * z1;
    nh[i] = sh * (spec.rho * z1 + orth * z2);
  }
  return {Vector(std::move(nf)), Vector(std::move(nh))};
}

/// Thrown when an operation needs exact gradients the oracle lacks.
class MissingExactGradient : public std::logic_error {
 public:
  explicit MissingExactGradient(const std::string& what)
      : std::logic_error(what + ": oracle has no exact gradients") {}
};

/// Stochastic first-order access to a target f and its helper h.
///
/// Passing the same RandomToken to grad_f and grad_h yields noise correlated
/// as described by `noise`; grad_f_minus_h(x, t) equals
/// grad_f(x, t) - grad_h(x, t) in distribution.
struct OraclePair {
  using StochasticGrad = std::function<Vector(const Vector&, const RandomToken&)>;
  using ExactGrad = std::function<Vector(const Vector&)>;
  using Value = std::function<double(const Vector&)>;

  std::size_t dim = 0;
  StochasticGrad grad_f;
  StochasticGrad grad_h;
  StochasticGrad grad_f_minus_h;
  std::optional<ExactGrad> exact_grad_f;
  std::optional<ExactGrad> exact_grad_h;
  std::optional<Value> value_f;
  std::optional<Value> value_h;
  NoiseSpec noise;

  bool has_exact() const { return exact_grad_f && exact_grad_h; }

  const ExactGrad& require_exact_f(const char* who) const {
    if (!exact_grad_f) throw MissingExactGradient(who);
    return *exact_grad_f;
  }
  const ExactGrad& require_exact_h(const char* who) const {
    if (!exact_grad_h) throw MissingExactGradient(who);
    return *exact_grad_h;
  }
};

/// Oracle whose stochastic gradients are exact gradients plus correlated
/// Gaussian noise drawn from the token.
inline OraclePair make_additive_noise_oracle(std::size_t dim,
                                             OraclePair::ExactGrad grad_f,
                                             OraclePair::ExactGrad grad_h,
                                             std::optional<OraclePair::Value> value_f,
                                             std::optional<OraclePair::Value> value_h,
                                             NoiseSpec noise) {
  noise.validate();
  OraclePair pair;
  pair.dim = dim;
  pair.noise = noise;
  pair.exact_grad_f = grad_f;
  pair.exact_grad_h = grad_h;
  pair.value_f = std::move(value_f);
  pair.value_h = std::move(value_h);

  const bool quiet = noise.deterministic();
  pair.grad_f = [grad_f, noise, dim, quiet](const Vector& x, const RandomToken& t) {
    Vector g = grad_f(x);
    if (!quiet) g += draw_gaussian_noise(noise, t, dim).noise_f;
    return g;
  };
  pair.grad_h = [grad_h, noise, dim, quiet](const Vector& x, const RandomToken& t) {
    Vector g = grad_h(x);
    if (!quiet) g += draw_gaussian_noise(noise, t, dim).noise_h;
    return g;
  };
  pair.grad_f_minus_h = [grad_f, grad_h, noise, dim, quiet](const Vector& x,
                                                            const RandomToken& t) {
    Vector g = grad_f(x) - grad_h(x);
    if (!quiet) {
      auto n = draw_gaussian_noise(noise, t, dim);
      g += n.noise_f - n.noise_h;
    }
    return g;
  };
  return pair;
}

}  // namespace auxopt
