#include "fluxnet/core/state.hpp"

#include <string>

namespace fluxnet {

namespace {
constexpr double kNormTolerance = 1e-12;
}

UnitNormal::UnitNormal(std::initializer_list<double> values) {
  if (values.size() < 1 || values.size() > kMaxDim) {
    throw DimensionError("unit normal must have 1 or 2 components");
  }
  dim_ = values.size();
  std::copy(values.begin(), values.end(), n_.begin());
  double norm2 = 0.0;
  for (std::size_t i = 0; i < dim_; ++i) norm2 += n_[i] * n_[i];
  if (std::abs(std::sqrt(norm2) - 1.0) > kNormTolerance) {
    throw InvalidStateError("normal vector is not of unit length");
  }
}

UnitNormal UnitNormal::normalized(std::span<const double> v) {
  if (v.empty() || v.size() > kMaxDim) throw DimensionError("normal must have 1 or 2 components");
  double norm2 = 0.0;
  for (double x : v) norm2 += x * x;
  const double norm = std::sqrt(norm2);
  if (!(norm > 0.0)) throw InvalidStateError("cannot normalize a zero vector");
  UnitNormal r;
  r.dim_ = v.size();
  for (std::size_t i = 0; i < r.dim_; ++i) r.n_[i] = v[i] / norm;
  return r;
}

UnitNormal UnitNormal::e1(std::size_t dim) {
  if (dim == 1) return UnitNormal{1.0};
  if (dim == 2) return UnitNormal{1.0, 0.0};
  throw DimensionError("dimension must be 1 or 2");
}

SquareMatrix SquareMatrix::identity(std::size_t size) {
  SquareMatrix r(size);
  for (std::size_t i = 0; i < size; ++i) r(i, i) = 1.0;
  return r;
}

SquareMatrix SquareMatrix::operator*(const SquareMatrix& o) const {
  if (o.n != n) throw DimensionError("matrix size mismatch");
  SquareMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += (*this)(i, k) * o(k, j);
      r(i, j) = s;
    }
  return r;
}

StateVector SquareMatrix::operator*(const StateVector& v) const {
  if (v.size() != n) throw DimensionError("matrix/vector size mismatch");
  StateVector r(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += (*this)(i, k) * v[k];
    r[i] = s;
  }
  return r;
}

SquareMatrix SquareMatrix::inverse() const {
  SquareMatrix r(n);
  const auto& m = *this;
  switch (n) {
    case 1:
      if (m(0, 0) == 0.0) throw InvalidStateError("singular matrix");
      r(0, 0) = 1.0 / m(0, 0);
      return r;
    case 2: {
      const double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      if (det == 0.0) throw InvalidStateError("singular matrix");
      r(0, 0) = m(1, 1) / det;
      r(0, 1) = -m(0, 1) / det;
      r(1, 0) = -m(1, 0) / det;
      r(1, 1) = m(0, 0) / det;
      return r;
    }
    case 3: {
      // adjugate / determinant
      r(0, 0) = m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1);
      r(0, 1) = m(0, 2) * m(2, 1) - m(0, 1) * m(2, 2);
      r(0, 2) = m(0, 1) * m(1, 2) - m(0, 2) * m(1, 1);
      r(1, 0) = m(1, 2) * m(2, 0) - m(1, 0) * m(2, 2);
      r(1, 1) = m(0, 0) * m(2, 2) - m(0, 2) * m(2, 0);
      r(1, 2) = m(0, 2) * m(1, 0) - m(0, 0) * m(1, 2);
      r(2, 0) = m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0);
      r(2, 1) = m(0, 1) * m(2, 0) - m(0, 0) * m(2, 1);
      r(2, 2) = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
      const double det = m(0, 0) * r(0, 0) + m(0, 1) * r(1, 0) + m(0, 2) * r(2, 0);
      if (det == 0.0) throw InvalidStateError("singular matrix");
      for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) r(i, j) /= det;
      return r;
    }
    default:
      throw DimensionError("inverse supports n in {1,2,3}, got " + std::to_string(n));
  }
}

StateVector FluxMatrix::column(std::size_t j) const {
  StateVector c(m);
  for (std::size_t i = 0; i < m; ++i) c[i] = (*this)(i, j);
  return c;
}

StateVector FluxMatrix::project(const UnitNormal& n) const {
  if (n.dim() != d) throw DimensionError("normal dimension does not match flux");
  StateVector r(m);
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) s += (*this)(i, j) * n[j];
    r[i] = s;
  }
  return r;
}

}  // namespace fluxnet
