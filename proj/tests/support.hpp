#pragma once

// Shared fields and independent oracles for the tests. The oracles use
// central finite differences on double evaluations only, so they share no
// code path with the jet-based derivatives they check.

#include <array>
#include <cmath>
#include <functional>
#include <memory>

#include "finsmet/connection.hpp"
#include "finsmet/finsler.hpp"

namespace fmtest {

using namespace finsmet;

inline std::shared_ptr<const MetricField> euclidean() {
  return make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        for (std::size_t i = 0; i < kDim; ++i) m[i][i] = S(1.0);
        return m;
      },
      "euclidean");
}

inline std::shared_ptr<const MetricField> minkowski() {
  return make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        m[0][0] = S(-1.0);
        for (std::size_t i = 1; i < kDim; ++i) m[i][i] = S(1.0);
        return m;
      },
      "minkowski");
}

/// diag(1, (x^0)^2, 1, 1) on x^0 > 0.
inline std::shared_ptr<const MetricField> polar_like() {
  return make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        m[0][0] = S(1.0);
        m[1][1] = x[0] * x[0];
        m[2][2] = S(1.0);
        m[3][3] = S(1.0);
        return m;
      },
      "diag(1, x0^2, 1, 1)", [](const Point& x) { return x[0] > 0.0; });
}

/// A curved Lorentzian metric with off-diagonal terms, for generic checks.
inline std::shared_ptr<const MetricField> wavy() {
  return make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        m[0][0] = -(1.0 + 0.2 * sin(x[1]));
        m[1][1] = 1.0 + 0.1 * x[0] * x[0];
        m[2][2] = exp(0.3 * x[3]);
        m[3][3] = S(1.0) + 0.05 * x[2] * x[1];
        m[0][1] = 0.1 * cos(x[2]);
        m[1][0] = m[0][1];
        m[2][3] = 0.05 * x[0];
        m[3][2] = m[2][3];
        return m;
      },
      "wavy");
}

inline std::shared_ptr<const OneFormField> constant_oneform(Vec4d c) {
  return make_oneform(
      [c](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Vec4<S> b;
        for (std::size_t i = 0; i < kDim; ++i) b[i] = S(c[i]);
        return b;
      },
      "constant");
}

inline std::shared_ptr<const OneFormField> wavy_oneform() {
  return make_oneform(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Vec4<S> b;
        b[0] = 1.0 + 0.3 * sin(x[1]);
        b[1] = 0.2 * x[0] * x[2];
        b[2] = exp(0.1 * x[3]);
        b[3] = S(0.4) + 0.1 * x[0];
        return b;
      },
      "wavy");
}

/// b = e^{x^0} dx^0
inline std::shared_ptr<const OneFormField> exp_oneform() {
  return make_oneform(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Vec4<S> b = zero_vec<S>();
        b[0] = exp(x[0]);
        return b;
      },
      "exp(x0) dx0");
}

/// b = x / r^2 (|b| = 1/r on Euclidean space), r > 0.
inline std::shared_ptr<const OneFormField> radial_oneform() {
  return make_oneform(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        const S r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        Vec4<S> b;
        for (std::size_t i = 0; i < kDim; ++i) b[i] = x[i] / r2;
        return b;
      },
      "x / r^2", [](const Point& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3] > 1e-6; });
}

using ScalarLagrangian = std::function<double(const Vec4d&, const Vec4d&)>;

inline ScalarLagrangian as_function(const FinslerLagrangian& L) {
  return [&L](const Vec4d& x, const Vec4d& v) { return L.value(x, v); };
}

/// Mixed central differences over the eight (x, v) variables.
struct FdJet {
  std::array<double, 8> grad{};
  std::array<std::array<double, 8>, 8> hess{};
};

inline FdJet fd_jet(const ScalarLagrangian& L, const Vec4d& x, const Vec4d& v, double h = 1e-4) {
  auto eval = [&](std::array<double, 8> z) {
    Vec4d xx{z[0], z[1], z[2], z[3]};
    Vec4d vv{z[4], z[5], z[6], z[7]};
    return L(xx, vv);
  };
  std::array<double, 8> z{x[0], x[1], x[2], x[3], v[0], v[1], v[2], v[3]};
  FdJet out;
  for (std::size_t i = 0; i < 8; ++i) {
    auto zp = z;
    auto zm = z;
    zp[i] += h;
    zm[i] -= h;
    out.grad[i] = (eval(zp) - eval(zm)) / (2 * h);
    for (std::size_t j = 0; j < 8; ++j) {
      auto pp = z, pm = z, mp = z, mm = z;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      out.hess[i][j] = (eval(pp) - eval(pm) - eval(mp) + eval(mm)) / (4 * h * h);
    }
  }
  return out;
}

inline Mat4d fd_metric_tensor(const ScalarLagrangian& L, const Vec4d& x, const Vec4d& v) {
  const FdJet j = fd_jet(L, x, v);
  Mat4d g{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) g[a][b] = 0.5 * j.hess[4 + a][4 + b];
  return g;
}

/// G = g^{-1} (v^s d_s dL/dv - dL/dx) / 4 from finite differences.
inline Vec4d fd_spray(const ScalarLagrangian& L, const Vec4d& x, const Vec4d& v) {
  const FdJet j = fd_jet(L, x, v);
  Mat4d g{};
  for (std::size_t a = 0; a < 4; ++a)
    for (std::size_t b = 0; b < 4; ++b) g[a][b] = 0.5 * j.hess[4 + a][4 + b];
  Vec4d w{};
  for (std::size_t n = 0; n < 4; ++n) {
    double s = -j.grad[n];
    for (std::size_t r = 0; r < 4; ++r) s += v[r] * j.hess[r][4 + n];
    w[n] = 0.25 * s;
  }
  return mat_vec(inverse(g), w);
}

/// Christoffel symbols from central differences of the metric.
inline Tensor3d fd_christoffel(const MetricField& a, const Point& x, double h = 1e-5) {
  Tensor3d d{};  // d[l][m][n] = partial_l a_mn
  for (std::size_t l = 0; l < 4; ++l) {
    Point xp = x, xm = x;
    xp[l] += h;
    xm[l] -= h;
    const Mat4d ap = a.at(xp), am = a.at(xm);
    for (std::size_t m = 0; m < 4; ++m)
      for (std::size_t n = 0; n < 4; ++n) d[l][m][n] = (ap[m][n] - am[m][n]) / (2 * h);
  }
  const Mat4d inv = inverse(a.at(x));
  Tensor3d g{};
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t r = 0; r < 4; ++r) {
        double s = 0.0;
        for (std::size_t l = 0; l < 4; ++l) s += inv[m][l] * 0.5 * (d[n][l][r] + d[r][l][n] - d[l][n][r]);
        g[m][n][r] = s;
      }
  return g;
}

inline double max_diff(const Tensor3d& a, const Tensor3d& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t k = 0; k < 4; ++k) m = std::max(m, std::abs(a[i][j][k] - b[i][j][k]));
  return m;
}

inline double max_diff(const Mat4d& a, const Mat4d& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) m = std::max(m, std::abs(a[i][j] - b[i][j]));
  return m;
}

inline double max_diff(const Vec4d& a, const Vec4d& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fmtest
