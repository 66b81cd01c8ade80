#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "auxopt/core/eigen_interop.hpp"
#include "auxopt/core/oracle.hpp"

namespace auxopt::problems {

/// Binary logistic regression loss
///
///   loss(x) = sum_i w_i log(1 + exp(-y_i a_i'x)) + (l2_reg/2) ||x||^2
///
/// with labels y_i in {-1, +1} and weights w_i that sum to one (uniform 1/n
/// when `weights` is empty).
struct LogisticTask {
  Matrix features;             // n x d, one sample per row
  std::vector<double> labels;  // +-1
  double l2_reg = 0.0;
  std::vector<double> weights;  // empty means uniform

  std::size_t num_samples() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }

  double weight(std::size_t i) const {
    return weights.empty() ? 1.0 / static_cast<double>(num_samples()) : weights[i];
  }

  void validate() const {
    if (labels.size() != num_samples()) {
      throw std::invalid_argument("LogisticTask: label count differs from row count");
    }
    for (double y : labels) {
      if (y != 1.0 && y != -1.0) {
        throw std::invalid_argument("LogisticTask: labels must be -1 or +1");
      }
    }
    if (!weights.empty()) {
      if (weights.size() != num_samples()) {
        throw std::invalid_argument("LogisticTask: weight count differs from row count");
      }
      double total = 0.0;
      for (double w : weights) {
        if (!(w > 0.0)) throw std::invalid_argument("LogisticTask: weights must be positive");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("LogisticTask: weights must sum to one");
      }
    }
    if (!(l2_reg >= 0.0)) throw std::invalid_argument("LogisticTask: l2_reg must be >= 0");
  }
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

/// log(1 + exp(-z)) without overflow.
inline double log1p_exp_neg(double z) {
  return z > 0.0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

inline double logistic_loss(const LogisticTask& task, const Vector& x) {
  const Eigen::VectorXd margins = task.features * as_eigen(x);
  double acc = 0.0;
  for (std::size_t i = 0; i < task.num_samples(); ++i) {
    acc += task.weight(i) * log1p_exp_neg(task.labels[i] * margins(static_cast<Eigen::Index>(i)));
  }
  return acc + 0.5 * task.l2_reg * x.squared_norm();
}

inline Vector logistic_gradient(const LogisticTask& task, const Vector& x) {
  const Eigen::VectorXd margins = task.features * as_eigen(x);
  Eigen::VectorXd coeff(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const auto s = static_cast<std::size_t>(i);
    const double y = task.labels[s];
    coeff(i) = -task.weight(s) * y * sigmoid(-y * margins(i));
  }
  Eigen::VectorXd g = task.features.transpose() * coeff;
  g += task.l2_reg * as_eigen(x);
  return from_eigen(g);
}

/// Mean gradient over `indices` (repeats allowed), plus the regularizer.
inline Vector logistic_batch_gradient(const LogisticTask& task, const Vector& x,
                                      const std::vector<std::size_t>& indices) {
  const auto xe = as_eigen(x);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(task.dim()));
  for (std::size_t i : indices) {
    const auto row = task.features.row(static_cast<Eigen::Index>(i));
    const double y = task.labels[i];
    const double margin = row.dot(xe);
    g += (-y * sigmoid(-y * margin)) * row.transpose();
  }
  g /= static_cast<double>(indices.size());
  g += task.l2_reg * xe;
  return from_eigen(g);
}

/// sum_i w_i s_i (1 - s_i) a_i a_i' + l2_reg I with s_i = sigmoid(a_i'x).
/// The labels never enter.
inline Matrix exact_hessian_logistic(const LogisticTask& task, const Vector& x) {
  if (x.size() != task.dim()) throw DimensionError(task.dim(), x.size());
  const Eigen::VectorXd margins = task.features * as_eigen(x);
  Eigen::VectorXd curvature(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double s = sigmoid(margins(i));
    curvature(i) = task.weight(static_cast<std::size_t>(i)) * s * (1.0 - s);
  }
  Matrix H = task.features.transpose() * curvature.asDiagonal() * task.features;
  H.diagonal().array() += task.l2_reg;
  return H;
}

/// Global smoothness constant: ||sum_i w_i a_i a_i'||_2 / 4 + l2_reg.
inline double logistic_smoothness(const LogisticTask& task) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(task.num_samples()));
  for (std::size_t i = 0; i < task.num_samples(); ++i) {
    w(static_cast<Eigen::Index>(i)) = task.weight(i);
  }
  const Matrix gram = task.features.transpose() * w.asDiagonal() * task.features;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  return 0.25 * eig.eigenvalues().maxCoeff() + task.l2_reg;
}

/// Row indices of one minibatch, drawn with replacement with probability w_i.
inline std::vector<std::size_t> draw_minibatch(const LogisticTask& task,
                                               std::size_t batch_size,
                                               const RandomToken& token) {
  NoiseStream stream(token);
  std::vector<std::size_t> batch(batch_size);
  const std::size_t n = task.num_samples();
  if (task.weights.empty()) {
    for (auto& i : batch) i = stream.next_below(n);
    return batch;
  }
  std::vector<double> cumulative(n);
  std::partial_sum(task.weights.begin(), task.weights.end(), cumulative.begin());
  for (auto& i : batch) {
    const double u = stream.next_uniform() * cumulative.back();
    i = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) - cumulative.begin());
    i = std::min(i, n - 1);
  }
  return batch;
}

/// Oracle pair with f = loss of `target` and h = loss of `helper`.
///
/// batch_size == 0 uses full gradients; otherwise each stochastic gradient is
/// a minibatch mean drawn from the token. helper_batch_size does the same for
/// h and defaults to batch_size. Additive `noise` is applied on top in both
/// cases. grad_f_minus_h draws the f batch and the h batch from the same token
/// it would hand to grad_f and grad_h.
inline OraclePair make_logistic_oracle(LogisticTask target, LogisticTask helper,
                                       std::size_t batch_size, NoiseSpec noise,
                                       std::optional<std::size_t> helper_batch_size = {}) {
  target.validate();
  helper.validate();
  if (target.dim() != helper.dim()) {
    throw std::invalid_argument("make_logistic_oracle: feature dimensions differ");
  }
  noise.validate();
  const std::size_t dim = target.dim();
  auto tf = std::make_shared<const LogisticTask>(std::move(target));
  auto th = std::make_shared<const LogisticTask>(std::move(helper));

  OraclePair pair;
  pair.dim = dim;
  pair.noise = noise;
  pair.exact_grad_f = [tf](const Vector& x) { return logistic_gradient(*tf, x); };
  pair.exact_grad_h = [th](const Vector& x) { return logistic_gradient(*th, x); };
  pair.value_f = [tf](const Vector& x) { return logistic_loss(*tf, x); };
  pair.value_h = [th](const Vector& x) { return logistic_loss(*th, x); };

  const std::size_t f_batch = batch_size;
  const std::size_t h_batch = helper_batch_size.value_or(batch_size);
  auto sample_grad = [](const LogisticTask& task, std::size_t batch, const Vector& x,
                        const RandomToken& t) {
    if (batch == 0) return logistic_gradient(task, x);
    return logistic_batch_gradient(task, x, draw_minibatch(task, batch, t));
  };
  const bool quiet = noise.deterministic();
  pair.grad_f = [tf, f_batch, sample_grad, noise, dim, quiet](const Vector& x, const RandomToken& t) {
    Vector g = sample_grad(*tf, f_batch, x, stream_fork(t, 1));
    if (!quiet) g += draw_gaussian_noise(noise, t, dim).noise_f;
    return g;
  };
  pair.grad_h = [th, h_batch, sample_grad, noise, dim, quiet](const Vector& x, const RandomToken& t) {
    Vector g = sample_grad(*th, h_batch, x, stream_fork(t, 2));
    if (!quiet) g += draw_gaussian_noise(noise, t, dim).noise_h;
    return g;
  };
  pair.grad_f_minus_h = [tf, th, f_batch, h_batch, sample_grad, noise, dim,
                         quiet](const Vector& x, const RandomToken& t) {
    Vector g = sample_grad(*tf, f_batch, x, stream_fork(t, 1)) - sample_grad(*th, h_batch, x, stream_fork(t, 2));
    if (!quiet) {
      auto n = draw_gaussian_noise(noise, t, dim);
      g += n.noise_f - n.noise_h;
    }
    return g;
  };
  return pair;
}

}  // namespace auxopt::problems
