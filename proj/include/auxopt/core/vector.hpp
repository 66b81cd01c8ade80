#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace auxopt {

/// Thrown when two vectors of different dimension meet in an arithmetic op.
class DimensionError : public std::invalid_argument {
 public:
  DimensionError(std::size_t lhs, std::size_t rhs)
      : std::invalid_argument("dimension mismatch: " + std::to_string(lhs) +
                              " vs " + std::to_string(rhs)) {}
};

/// Thrown when an operation would leave a NaN or Inf in a vector.
class NonFiniteError : public std::domain_error {
 public:
  explicit NonFiniteError(const std::string& what) : std::domain_error(what) {}
};

/// Dense real vector of fixed dimension.
///
/// Every public operation keeps two invariants: operands share a dimension,
/// and the result holds only finite entries. Violations throw
/// DimensionError / NonFiniteError instead of propagating garbage.
class Vector {
 public:
  Vector() = default;

  explicit Vector(std::size_t dim, double fill = 0.0) : data_(dim, fill) {
    check_finite("Vector(dim, fill)");
  }

  Vector(std::initializer_list<double> values) : data_(values) {
    check_finite("Vector(initializer_list)");
  }

  explicit Vector(std::vector<double> values) : data_(std::move(values)) {
    check_finite("Vector(std::vector)");
  }

  static Vector zeros(std::size_t dim) { return Vector(dim, 0.0); }

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double operator[](std::size_t i) const { return data_[i]; }

  /// Checked element write. Use this instead of a mutable operator[] so the
  /// finiteness invariant cannot be bypassed.
  void set(std::size_t i, double value) {
    if (!std::isfinite(value)) {
      throw NonFiniteError("Vector::set: non-finite value");
    }
    data_.at(i) = value;
  }

  const double* data() const noexcept { return data_.data(); }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& std_vector() const noexcept { return data_; }

  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  Vector& operator+=(const Vector& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    check_finite("operator+=");
    return *this;
  }

  Vector& operator-=(const Vector& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    check_finite("operator-=");
    return *this;
  }

  Vector& operator*=(double scale) {
    for (double& v : data_) v *= scale;
    check_finite("operator*=");
    return *this;
  }

  /// this += alpha * other
  Vector& axpy(double alpha, const Vector& other) {
    require_same_size(other);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      data_[i] += alpha * other.data_[i];
    }
    check_finite("axpy");
    return *this;
  }

  double dot(const Vector& other) const {
    require_same_size(other);
    double acc = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) {
      acc += data_[i] * other.data_[i];
    }
    return acc;
  }

  double squared_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return acc;
  }

  double norm() const { return std::sqrt(squared_norm()); }

  double max_abs() const {
    double best = 0.0;
    for (double v : data_) best = std::max(best, std::abs(v));
    return best;
  }

  friend Vector operator+(Vector lhs, const Vector& rhs) { return lhs += rhs; }
  friend Vector operator-(Vector lhs, const Vector& rhs) { return lhs -= rhs; }
  friend Vector operator*(double scale, Vector v) { return v *= scale; }
  friend Vector operator*(Vector v, double scale) { return v *= scale; }
  friend Vector operator-(Vector v) { return v *= -1.0; }

  friend bool operator==(const Vector& lhs, const Vector& rhs) {
    return lhs.data_ == rhs.data_;
  }

  void require_same_size(const Vector& other) const {
    if (other.size() != size()) throw DimensionError(size(), other.size());
  }

 private:
  void check_finite(const char* where) const {
    for (double v : data_) {
      if (!std::isfinite(v)) {
        throw NonFiniteError(std::string("non-finite entry after ") + where);
      }
    }
  }

  std::vector<double> data_;
};

inline double squared_distance(const Vector& a, const Vector& b) {
  a.require_same_size(b);
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

}  // namespace auxopt
