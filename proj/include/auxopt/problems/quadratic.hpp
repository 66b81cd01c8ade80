#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "auxopt/core/eigen_interop.hpp"
#include "auxopt/core/oracle.hpp"

namespace auxopt::problems {

/// f(x) = x'A_f x / 2 and h(x) = x'A_h x / 2 - b_h'x with analytic L and delta.
struct QuadraticProblem {
  Matrix A_f;
  Matrix A_h;
  Vector b_h;
  double smoothness = 0.0;  // ||A_f||_2
  double delta = 0.0;       // ||A_f - A_h||_2
  OraclePair oracle;
};

namespace detail {

inline void require_symmetric_psd(const Matrix& m, const char* name) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument(std::string(name) + " must be square and non-empty");
  }
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -1e-10 * scale) {
    throw std::invalid_argument(std::string(name) + " must be positive semidefinite");
  }
}

}  // namespace detail

inline QuadraticProblem make_quadratic_nd(const Matrix& A_f, const Matrix& A_h,
                                          const Vector& b_h, const NoiseSpec& noise) {
  detail::require_symmetric_psd(A_f, "A_f");
  detail::require_symmetric_psd(A_h, "A_h");
  if (A_f.rows() != A_h.rows() ||
      static_cast<std::size_t>(A_f.rows()) != b_h.size()) {
    throw std::invalid_argument("make_quadratic_nd: dimensions of A_f, A_h, b_h disagree");
  }

  QuadraticProblem p;
  p.A_f = A_f;
  p.A_h = A_h;
  p.b_h = b_h;
  const Matrix diff = A_f - A_h;
  Eigen::SelfAdjointEigenSolver<Matrix> ef(A_f, Eigen::EigenvaluesOnly);
  Eigen::SelfAdjointEigenSolver<Matrix> ed(diff, Eigen::EigenvaluesOnly);
  p.smoothness = ef.eigenvalues().cwiseAbs().maxCoeff();
  p.delta = ed.eigenvalues().cwiseAbs().maxCoeff();

  auto grad_f = [A_f](const Vector& x) {
    return from_eigen(A_f * as_eigen(x));
  };
  auto grad_h = [A_h, b_h](const Vector& x) {
    return from_eigen(A_h * as_eigen(x) - as_eigen(b_h));
  };
  auto value_f = [A_f](const Vector& x) {
    const auto v = as_eigen(x);
    return 0.5 * v.dot(A_f * v);
  };
  auto value_h = [A_h, b_h](const Vector& x) {
    const auto v = as_eigen(x);
    return 0.5 * v.dot(A_h * v) - as_eigen(b_h).dot(v);
  };
  p.oracle = make_additive_noise_oracle(b_h.size(), grad_f, grad_h, value_f,
                                        value_h, noise);
  return p;
}

}  // namespace auxopt::problems
