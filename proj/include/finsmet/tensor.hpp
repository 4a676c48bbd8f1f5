#pragma once

// Fixed-size (dimension 4) arrays and small dense linear algebra that works
// over any scalar type, including nested duals.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "finsmet/dual.hpp"

namespace finsmet {

inline constexpr std::size_t kDim = 4;

template <class T>
using Vec4 = std::array<T, kDim>;
template <class T>
using Mat4 = std::array<std::array<T, kDim>, kDim>;
/// Rank-3 array indexed [mu][nu][rho].
template <class T>
using Tensor3 = std::array<Mat4<T>, kDim>;

using Vec4d = Vec4<double>;
using Mat4d = Mat4<double>;
using Tensor3d = Tensor3<double>;

/// Chart coordinates x^mu.
struct Point {
  Vec4d coords{};
  double operator[](std::size_t i) const { return coords[i]; }
  double& operator[](std::size_t i) { return coords[i]; }
};

/// Components v^mu of a tangent vector at some point.
struct TangentVector {
  Vec4d components{};
  double operator[](std::size_t i) const { return components[i]; }
  double& operator[](std::size_t i) { return components[i]; }
};

enum class ErrorCode {
  InvalidArgument,
  SingularMetric,
  Inadmissible,
  DegenerateHessian,
  NullOneForm,
  NoSubcase,
  MissingFunction,
  DegenerateResult,
  InsufficientData,
  BlowUp,
  Config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline constexpr double kSingularDetTolerance = 1e-12;

template <class T>
Mat4<T> zero_mat() {
  Mat4<T> m;
  for (auto& row : m)
    for (auto& e : row) e = T(0.0);
  return m;
}

template <class T>
Vec4<T> zero_vec() {
  Vec4<T> v;
  for (auto& e : v) e = T(0.0);
  return v;
}

template <class T>
Tensor3<T> zero_tensor3() {
  Tensor3<T> t;
  for (auto& m : t) m = zero_mat<T>();
  return t;
}

template <class T>
Vec4<T> lift(const Vec4d& v) {
  Vec4<T> r;
  for (std::size_t i = 0; i < kDim; ++i) r[i] = T(v[i]);
  return r;
}

template <class T>
T dot(const Vec4<T>& a, const Vec4<T>& b) {
  T s = a[0] * b[0];
  for (std::size_t i = 1; i < kDim; ++i) s = s + a[i] * b[i];
  return s;
}

template <class T>
Vec4<T> mat_vec(const Mat4<T>& m, const Vec4<T>& v) {
  Vec4<T> r;
  for (std::size_t i = 0; i < kDim; ++i) r[i] = dot(m[i], v);
  return r;
}

/// v^T m w
template <class T>
T quad_form(const Mat4<T>& m, const Vec4<T>& v, const Vec4<T>& w) {
  return dot(v, mat_vec(m, w));
}

/// Determinant by elimination with partial pivoting on the real value.
template <class T>
T determinant(Mat4<T> m) {
  T det(1.0);
  for (std::size_t c = 0; c < kDim; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < kDim; ++r)
      if (std::abs(value_of(m[r][c])) > std::abs(value_of(m[piv][c]))) piv = r;
    if (value_of(m[piv][c]) == 0.0) return T(0.0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det = det * m[c][c];
    const T inv = T(1.0) / m[c][c];
    for (std::size_t r = c + 1; r < kDim; ++r) {
      const T f = m[r][c] * inv;
      for (std::size_t k = c; k < kDim; ++k) m[r][k] = m[r][k] - f * m[c][k];
    }
  }
  return det;
}

/// Gauss-Jordan inverse. Throws SingularMetric when a pivot vanishes.
template <class T>
Mat4<T> inverse(Mat4<T> m) {
  Mat4<T> inv = zero_mat<T>();
  for (std::size_t i = 0; i < kDim; ++i) inv[i][i] = T(1.0);
  for (std::size_t c = 0; c < kDim; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < kDim; ++r)
      if (std::abs(value_of(m[r][c])) > std::abs(value_of(m[piv][c]))) piv = r;
    if (std::abs(value_of(m[piv][c])) < 1e-300) throw Error(ErrorCode::SingularMetric, "singular 4x4 matrix");
    std::swap(m[piv], m[c]);
    std::swap(inv[piv], inv[c]);
    const T p = T(1.0) / m[c][c];
    for (std::size_t k = 0; k < kDim; ++k) {
      m[c][k] = m[c][k] * p;
      inv[c][k] = inv[c][k] * p;
    }
    for (std::size_t r = 0; r < kDim; ++r) {
      if (r == c) continue;
      const T f = m[r][c];
      for (std::size_t k = 0; k < kDim; ++k) {
        m[r][k] = m[r][k] - f * m[c][k];
        inv[r][k] = inv[r][k] - f * inv[c][k];
      }
    }
  }
  return inv;
}

inline double norm(const Vec4d& v) { return std::sqrt(dot(v, v)); }

inline double frobenius(const Mat4d& m) {
  double s = 0.0;
  for (const auto& row : m)
    for (double e : row) s += e * e;
  return std::sqrt(s);
}

inline double max_abs(const Vec4d& v) {
  double m = 0.0;
  for (double e : v) m = std::max(m, std::abs(e));
  return m;
}

inline double max_abs(const Mat4d& m) {
  double r = 0.0;
  for (const auto& row : m) r = std::max(r, max_abs(row));
  return r;
}

inline double max_abs(const Tensor3d& t) {
  double r = 0.0;
  for (const auto& m : t) r = std::max(r, max_abs(m));
  return r;
}

/// |det g| below 1e-12, with the threshold scaled by max|g|^4 once entries exceed 1.
inline bool hessian_degenerate(const Mat4d& g, double det) {
  const double m = std::max(1.0, max_abs(g));
  return !(std::abs(det) >= kSingularDetTolerance * m * m * m * m);
}

/// Gamma^mu_{nu rho} v^nu v^rho
inline Vec4d contract_quadratic(const Tensor3d& gamma, const Vec4d& v) {
  Vec4d r{};
  for (std::size_t mu = 0; mu < kDim; ++mu) r[mu] = quad_form(gamma[mu], v, v);
  return r;
}

}  // namespace finsmet
