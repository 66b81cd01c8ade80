#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace auxopt::theory {

/// Problem constants the step-size formulas depend on.
struct TheoryParams {
  double L = 1.0;          // smoothness of f
  double delta = 0.0;      // Hessian similarity
  double sigma_f = 0.0;
  double sigma_h = 0.0;
  double sigma_fmh = 0.0;  // noise of the g_{f-h} estimator
  double F0 = 1.0;         // f(x^0) - f*
  double E0 = 0.0;         // ||m^0 - (grad f - grad h)(x^0)||^2
  int K = 1;
  int T = 1;

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("TheoryParams: L must be > 0");
    if (K < 1) throw std::invalid_argument("TheoryParams: K must be >= 1");
    if (T < 1) throw std::invalid_argument("TheoryParams: T must be >= 1");
    if (!(delta >= 0.0)) throw std::invalid_argument("TheoryParams: delta must be >= 0");
    if (delta > 2.0 * L * (1.0 + 1e-12)) {
      throw std::invalid_argument("TheoryParams: delta must not exceed 2L");
    }
    if (!(sigma_f >= 0.0 && sigma_h >= 0.0 && sigma_fmh >= 0.0)) {
      throw std::invalid_argument("TheoryParams: sigmas must be >= 0");
    }
    if (!(F0 >= 0.0) || !(E0 >= 0.0)) {
      throw std::invalid_argument("TheoryParams: F0 and E0 must be >= 0");
    }
  }
};

/// Numeric constants of the step-size and momentum rules.
///
/// headline() holds the constants of the stated rates and is the default.
/// proof_variant() carries the sharper form used inside the AuxMOM proof
/// (144 delta K, 128 under a root linear in K, F0 replaced by F0 + E0 / (8 delta))
/// and 1152 for the AuxMVR momentum rule.
struct TheoremConstants {
  double mom_similarity = 192.0;  // eta <= 1 / (c delta K)
  double mom_root = 144.0;        // eta <= sqrt(F / (c L beta K^p T sigma_f^2))
  int mom_root_k_power = 2;
  double mom_momentum = 36.0;     // a = max(1/T, c delta K eta)
  bool mom_use_tilde_f = false;
  double mvr_similarity = 192.0;
  double mvr_cube = 18432.0;
  double mvr_smooth = 8.0;        // sqrt(F0 / (K T (L/2 + c delta K)))
  double mvr_momentum = 1156.0;   // a = max(1/T, c delta^2 K^2 eta^2)

  static TheoremConstants headline() { return {}; }

  static TheoremConstants proof_variant() {
    TheoremConstants c;
    c.mom_similarity = 144.0;
    c.mom_root = 128.0;
    c.mom_root_k_power = 1;
    c.mom_use_tilde_f = true;
    c.mvr_momentum = 1152.0;
    return c;
  }
};

struct AuxMomParams {
  double eta = 0.0;
  double a = 0.0;
  double beta = 0.0;
};

struct AuxMvrParams {
  double eta = 0.0;
  double a = 0.0;
};

namespace detail {
inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// 1/x with 1/0 read as +inf, so the branch drops out of a min.
inline double inverse_or_inf(double x) { return x > 0.0 ? 1.0 / x : kInf; }
}  // namespace detail

/// Step size and momentum parameter prescribed for AuxMOM.
///
/// A term with a zero denominator (delta = 0 or sigma_f = 0) is +inf inside
/// the min and 0 inside the max and inside beta.
inline AuxMomParams auxmom_params(const TheoryParams& p,
                                  const TheoremConstants& c = TheoremConstants::headline()) {
  p.validate();
  const double K = p.K;
  const double T = p.T;
  const double sf2 = p.sigma_f * p.sigma_f;
  const double sh2 = p.sigma_h * p.sigma_h;
  const double sfmh2 = p.sigma_fmh * p.sigma_fmh;

  // beta * sigma_f^2 stays finite when sigma_f = 0.
  const double beta_sf2 =
      (p.delta / p.L) * (sfmh2 + sh2 / (18.0 * K)) + sh2 / (288.0 * K);
  AuxMomParams out;
  out.beta = sf2 > 0.0 ? beta_sf2 / sf2 : 0.0;

  double F = p.F0;
  if (c.mom_use_tilde_f && p.delta > 0.0) F += p.E0 / (8.0 * p.delta);

  const double k_power = c.mom_root_k_power == 2 ? K * K : K;
  const double root_den = c.mom_root * p.L * k_power * T * beta_sf2;
  const double root_branch = root_den > 0.0 ? std::sqrt(F / root_den) : detail::kInf;

  out.eta = std::min({1.0 / p.L, detail::inverse_or_inf(c.mom_similarity * p.delta * K),
                      root_branch});
  out.a = std::max(1.0 / T, c.mom_momentum * p.delta * K * out.eta);
  return out;
}

/// Step size and momentum parameter prescribed for AuxMVR.
inline AuxMvrParams auxmvr_params(const TheoryParams& p,
                                  const TheoremConstants& c = TheoremConstants::headline()) {
  p.validate();
  const double K = p.K;
  const double T = p.T;
  const double sfmh2 = p.sigma_fmh * p.sigma_fmh;

  const double cube_den = c.mvr_cube * p.delta * p.delta * T * sfmh2;
  const double cube_branch =
      cube_den > 0.0 ? std::cbrt(p.F0 / cube_den) / K : detail::kInf;
  const double smooth_branch =
      std::sqrt(p.F0 / (K * T * (p.L / 2.0 + c.mvr_smooth * p.delta * K)));

  AuxMvrParams out;
  out.eta = std::min({1.0 / p.L, detail::inverse_or_inf(c.mvr_similarity * p.delta * K),
                      cube_branch, smooth_branch});
  out.a = std::max(1.0 / T, c.mvr_momentum * p.delta * p.delta * K * K * out.eta * out.eta);
  return out;
}

}  // namespace auxopt::theory
