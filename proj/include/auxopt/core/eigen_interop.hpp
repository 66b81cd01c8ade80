#pragma once

#include <Eigen/Dense>
#include <vector>

#include "auxopt/core/vector.hpp"

namespace auxopt {

using Matrix = Eigen::MatrixXd;

inline Eigen::Map<const Eigen::VectorXd> as_eigen(const Vector& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(),
                                           static_cast<Eigen::Index>(v.size()));
}

inline Vector from_eigen(const Eigen::Ref<const Eigen::VectorXd>& v) {
  return Vector(std::vector<double>(v.data(), v.data() + v.size()));
}

/// Largest singular value of a dense matrix.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

}  // namespace auxopt
