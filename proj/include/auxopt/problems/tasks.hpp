#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "auxopt/core/random.hpp"
#include "auxopt/problems/logistic.hpp"

namespace auxopt::problems {

enum class HelperKind { random_labels, coreset, subset_batch };

/// How the helper task is built from the data.
///
///  - random_labels: the unlabeled split with Rademacher labels.
///  - coreset: a uniform subset of the labeled split holding `fraction` of
///    its rows, weighted 1/M each (or `weights` when given).
///  - subset_batch: the rows `indices` of the labeled split, uniform weights.
struct HelperBuild {
  HelperKind kind = HelperKind::random_labels;
  double fraction = 0.2;
  std::vector<std::size_t> indices;
  std::vector<double> weights;
};

struct SplitFractions {
  double train = 1.0 / 3.0;
  double test = 1.0 / 3.0;
  double unlabeled = 1.0 / 3.0;
};

struct SemiSupervisedTasks {
  LogisticTask target;  // labeled training split, f
  LogisticTask helper;  // h
  LogisticTask test;
};

inline LogisticTask select_rows(const LogisticTask& task,
                                const std::vector<std::size_t>& rows) {
  LogisticTask out;
  out.l2_reg = task.l2_reg;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), task.features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.features.row(static_cast<Eigen::Index>(r)) =
        task.features.row(static_cast<Eigen::Index>(rows[r]));
    out.labels.push_back(task.labels[rows[r]]);
  }
  return out;
}

namespace detail {

inline std::size_t floor_count(double fraction, std::size_t n) {
  // The small pad absorbs products like 0.2 * 1000 landing a hair under 200.
  return static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n) + 1e-9));
}

}  // namespace detail

/// Uniform subset without replacement holding `fraction` of the rows, weighted
/// 1/M. Rows keep their original relative order.
inline LogisticTask build_coreset_helper(const LogisticTask& task, double fraction,
                                         const RandomToken& seed) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("build_coreset_helper: fraction must lie in (0, 1]");
  }
  const std::size_t m = detail::floor_count(fraction, task.num_samples());
  if (m == 0) throw std::invalid_argument("build_coreset_helper: fraction yields zero samples");
  auto rows = sample_without_replacement(task.num_samples(), m, seed);
  std::sort(rows.begin(), rows.end());
  return select_rows(task, rows);
}

inline LogisticTask build_subset_helper(const LogisticTask& task,
                                        const std::vector<std::size_t>& indices,
                                        const std::vector<double>& weights = {}) {
  if (indices.empty()) throw std::invalid_argument("build_subset_helper: empty index set");
  for (std::size_t i : indices) {
    if (i >= task.num_samples()) {
      throw std::out_of_range("build_subset_helper: index out of range");
    }
  }
  LogisticTask out = select_rows(task, indices);
  out.weights = weights;
  out.validate();
  return out;
}

/// Shuffles the rows with `seed`, then cuts contiguous test and unlabeled
/// blocks of floor(fraction * n) rows; the remainder is the training split.
inline SemiSupervisedTasks build_semisupervised(const LogisticTask& task,
                                                const SplitFractions& split,
                                                const HelperBuild& helper,
                                                const RandomToken& seed) {
  task.validate();
  if (!(split.train > 0.0 && split.test > 0.0 && split.unlabeled > 0.0)) {
    throw std::invalid_argument("build_semisupervised: split fractions must be positive");
  }
  if (std::abs(split.train + split.test + split.unlabeled - 1.0) > 1e-9) {
    throw std::invalid_argument("build_semisupervised: split fractions must sum to 1");
  }
  const std::size_t n = task.num_samples();
  const std::size_t n_test = detail::floor_count(split.test, n);
  const std::size_t n_unlabeled = detail::floor_count(split.unlabeled, n);
  if (n_test == 0 || n_unlabeled == 0 || n_test + n_unlabeled >= n) {
    throw std::invalid_argument("build_semisupervised: a split would be empty");
  }
  const auto perm = random_permutation(n, stream_fork(seed, 0));
  std::vector<std::size_t> train_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_unlabeled),
                                      perm.end());
  std::vector<std::size_t> test_rows(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_test));
  std::vector<std::size_t> unlabeled_rows(perm.begin() + static_cast<std::ptrdiff_t>(n_test),
                                          perm.begin() + static_cast<std::ptrdiff_t>(n_test + n_unlabeled));

  SemiSupervisedTasks out;
  out.target = select_rows(task, train_rows);
  out.test = select_rows(task, test_rows);

  switch (helper.kind) {
    case HelperKind::random_labels: {
      out.helper = select_rows(task, unlabeled_rows);
      NoiseStream signs(stream_fork(seed, 1));
      for (double& y : out.helper.labels) y = signs.next_sign();
      break;
    }
    case HelperKind::coreset:
      if (!helper.weights.empty()) {
        throw std::invalid_argument("build_semisupervised: coreset weights need explicit indices");
      }
      out.helper = build_coreset_helper(out.target, helper.fraction, stream_fork(seed, 2));
      break;
    case HelperKind::subset_batch:
      out.helper = build_subset_helper(out.target, helper.indices, helper.weights);
      break;
  }
  return out;
}

}  // namespace auxopt::problems
