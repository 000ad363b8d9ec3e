#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>

#include "fluxnet/core/errors.hpp"

namespace fluxnet {

/// Largest number of conserved variables of any supported system (SWE-2D).
inline constexpr std::size_t kMaxVars = 3;
/// Largest spatial dimension.
inline constexpr std::size_t kMaxDim = 2;

/// Conserved variables U of length m <= 3, stored inline.
///
/// Also used for numerical flux vectors, which have the same length.
class StateVector {
 public:
  StateVector() = default;
  explicit StateVector(std::size_t m) : size_(m) {
    if (m > kMaxVars) throw DimensionError("state vector longer than 3 components");
  }
  StateVector(std::initializer_list<double> values) : StateVector(values.size()) {
    std::copy(values.begin(), values.end(), v_.begin());
  }
  explicit StateVector(std::span<const double> values) : StateVector(values.size()) {
    std::copy(values.begin(), values.end(), v_.begin());
  }

  std::size_t size() const noexcept { return size_; }
  double& operator[](std::size_t i) noexcept { return v_[i]; }
  double operator[](std::size_t i) const noexcept { return v_[i]; }
  double* data() noexcept { return v_.data(); }
  const double* data() const noexcept { return v_.data(); }
  double* begin() noexcept { return v_.data(); }
  double* end() noexcept { return v_.data() + size_; }
  const double* begin() const noexcept { return v_.data(); }
  const double* end() const noexcept { return v_.data() + size_; }
  std::span<const double> span() const noexcept { return {v_.data(), size_}; }

  StateVector& operator+=(const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < size_; ++i) v_[i] += o.v_[i];
    return *this;
  }
  StateVector& operator-=(const StateVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < size_; ++i) v_[i] -= o.v_[i];
    return *this;
  }
  StateVector& operator*=(double s) noexcept {
    for (std::size_t i = 0; i < size_; ++i) v_[i] *= s;
    return *this;
  }

  friend StateVector operator+(StateVector a, const StateVector& b) { return a += b; }
  friend StateVector operator-(StateVector a, const StateVector& b) { return a -= b; }
  friend StateVector operator*(StateVector a, double s) { return a *= s; }
  friend StateVector operator*(double s, StateVector a) { return a *= s; }
  friend bool operator==(const StateVector& a, const StateVector& b) noexcept {
    return a.size_ == b.size_ && std::equal(a.begin(), a.end(), b.begin());
  }

  /// Largest absolute component.
  double max_abs() const noexcept {
    double m = 0.0;
    for (std::size_t i = 0; i < size_; ++i) m = std::max(m, std::abs(v_[i]));
    return m;
  }

 private:
  void check_same(const StateVector& o) const {
    if (o.size_ != size_) throw DimensionError("state vector size mismatch");
  }

  std::array<double, kMaxVars> v_{};
  std::size_t size_ = 0;
};

using FluxVector = StateVector;

/// Unit vector in R^d, d in {1, 2}. Construction checks ||N|| = 1 within 1e-12.
class UnitNormal {
 public:
  UnitNormal() = default;
  UnitNormal(std::initializer_list<double> values);
  /// Normalizes an arbitrary non-zero vector.
  static UnitNormal normalized(std::span<const double> v);
  static UnitNormal e1(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double operator[](std::size_t i) const noexcept { return n_[i]; }
  UnitNormal flipped() const noexcept {
    UnitNormal r = *this;
    for (std::size_t i = 0; i < dim_; ++i) r.n_[i] = -r.n_[i];
    return r;
  }

 private:
  std::array<double, kMaxDim> n_{};
  std::size_t dim_ = 0;
};

/// Small dense row-major square matrix (n <= 3).
struct SquareMatrix {
  std::size_t n = 0;
  std::array<double, kMaxVars * kMaxVars> a{};

  explicit SquareMatrix(std::size_t size = 0) : n(size) {}
  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * kMaxVars + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * kMaxVars + j]; }

  static SquareMatrix identity(std::size_t size);
  SquareMatrix operator*(const SquareMatrix& o) const;
  StateVector operator*(const StateVector& v) const;
  SquareMatrix inverse() const;
};

/// m x d inviscid flux matrix F_I(U); column j is the flux in direction x_j.
struct FluxMatrix {
  std::size_t m = 0;
  std::size_t d = 0;
  std::array<double, kMaxVars * kMaxDim> a{};

  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * kMaxDim + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * kMaxDim + j]; }
  StateVector column(std::size_t j) const;
  /// F * N
  StateVector project(const UnitNormal& n) const;
};

}  // namespace fluxnet
