#pragma once

// Forward-mode dual numbers with a fixed number of tangent directions.
//
// Nesting Dual<Dual<double, N>, N> yields exact second derivatives, one more
// level yields third derivatives. All field evaluators and Lagrangians are
// written generically over the scalar type so the same expression tree serves
// plain evaluation and every derivative order.

#include <array>
#include <cmath>
#include <cstddef>
#include <type_traits>

namespace finsmet {

// Generic code calls these unqualified; bring the double overloads in next to
// the dual ones.
using std::abs;
using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;

template <class T, std::size_t N>
struct Dual {
  T v{};
  std::array<T, N> d{};

  constexpr Dual() = default;
  constexpr Dual(double value) : v(value) {}  // NOLINT: implicit lift of constants
  constexpr Dual(const T& value, const std::array<T, N>& grad) : v(value), d(grad) {}
  template <class U = T, std::enable_if_t<!std::is_same_v<U, double>, int> = 0>
  constexpr Dual(const T& value) : v(value) {}  // NOLINT

  Dual& operator+=(const Dual& o) {
    v += o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] += o.d[i];
    return *this;
  }
  Dual& operator-=(const Dual& o) {
    v -= o.v;
    for (std::size_t i = 0; i < N; ++i) d[i] -= o.d[i];
    return *this;
  }
  Dual& operator*=(const Dual& o) {
    for (std::size_t i = 0; i < N; ++i) d[i] = d[i] * o.v + v * o.d[i];
    v *= o.v;
    return *this;
  }
  Dual& operator/=(const Dual& o) {
    *this = *this / o;
    return *this;
  }
  Dual& operator*=(double s) {
    v *= s;
    for (auto& g : d) g *= s;
    return *this;
  }
  Dual& operator+=(double s) {
    v += s;
    return *this;
  }
};

template <class T>
struct is_dual : std::false_type {};
template <class T, std::size_t N>
struct is_dual<Dual<T, N>> : std::true_type {};

/// Innermost real value of a possibly nested dual.
inline double value_of(double x) { return x; }
template <class T, std::size_t N>
double value_of(const Dual<T, N>& x) {
  return value_of(x.v);
}

template <class T, std::size_t N>
Dual<T, N> operator-(const Dual<T, N>& a) {
  Dual<T, N> r;
  r.v = -a.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = -a.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> operator+(Dual<T, N> a, const Dual<T, N>& b) {
  return a += b;
}
template <class T, std::size_t N>
Dual<T, N> operator-(Dual<T, N> a, const Dual<T, N>& b) {
  return a -= b;
}
template <class T, std::size_t N>
Dual<T, N> operator*(const Dual<T, N>& a, const Dual<T, N>& b) {
  Dual<T, N> r;
  r.v = a.v * b.v;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * b.v + a.v * b.d[i];
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator/(const Dual<T, N>& a, const Dual<T, N>& b) {
  const T inv = T(1.0) / b.v;
  Dual<T, N> r;
  r.v = a.v * inv;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = (a.d[i] - r.v * b.d[i]) * inv;
  return r;
}

// Mixed operations with plain doubles.
template <class T, std::size_t N>
Dual<T, N> operator+(Dual<T, N> a, double s) {
  a.v += s;
  return a;
}
template <class T, std::size_t N>
Dual<T, N> operator+(double s, Dual<T, N> a) {
  a.v += s;
  return a;
}
template <class T, std::size_t N>
Dual<T, N> operator-(Dual<T, N> a, double s) {
  a.v -= s;
  return a;
}
template <class T, std::size_t N>
Dual<T, N> operator-(double s, const Dual<T, N>& a) {
  Dual<T, N> r = -a;
  r.v += s;
  return r;
}
template <class T, std::size_t N>
Dual<T, N> operator*(Dual<T, N> a, double s) {
  return a *= s;
}
template <class T, std::size_t N>
Dual<T, N> operator*(double s, Dual<T, N> a) {
  return a *= s;
}
template <class T, std::size_t N>
Dual<T, N> operator/(Dual<T, N> a, double s) {
  return a *= (1.0 / s);
}
template <class T, std::size_t N>
Dual<T, N> operator/(double s, const Dual<T, N>& a) {
  return Dual<T, N>(s) / a;
}

template <class T, std::size_t N>
bool operator<(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) < value_of(b);
}
template <class T, std::size_t N>
bool operator>(const Dual<T, N>& a, const Dual<T, N>& b) {
  return value_of(a) > value_of(b);
}

// Elementary functions. Each applies the chain rule one level and recurses
// into the inner scalar type.
template <class T, std::size_t N>
Dual<T, N> exp(const Dual<T, N>& a) {
  using std::exp;
  const T e = exp(a.v);
  Dual<T, N> r;
  r.v = e;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = e * a.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> log(const Dual<T, N>& a) {
  using std::log;
  const T inv = T(1.0) / a.v;
  Dual<T, N> r;
  r.v = log(a.v);
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * inv;
  return r;
}

template <class T, std::size_t N>
Dual<T, N> sqrt(const Dual<T, N>& a) {
  using std::sqrt;
  const T s = sqrt(a.v);
  const T half_inv = T(0.5) / s;
  Dual<T, N> r;
  r.v = s;
  for (std::size_t i = 0; i < N; ++i) r.d[i] = a.d[i] * half_inv;
  return r;
}

template <class T, std::size_t N>
Dual<T, N> abs(const Dual<T, N>& a) {
  return value_of(a) < 0.0 ? -a : a;
}

template <class T, std::size_t N>
Dual<T, N> sin(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  const T c = cos(a.v);
  Dual<T, N> r;
  r.v = sin(a.v);
  for (std::size_t i = 0; i < N; ++i) r.d[i] = c * a.d[i];
  return r;
}

template <class T, std::size_t N>
Dual<T, N> cos(const Dual<T, N>& a) {
  using std::cos;
  using std::sin;
  const T s = sin(a.v);
  Dual<T, N> r;
  r.v = cos(a.v);
  for (std::size_t i = 0; i < N; ++i) r.d[i] = -(s * a.d[i]);
  return r;
}

/// Real power. Negative bases are only valid for integral exponents, which
/// std::pow handles exactly at the innermost level.
template <class T, std::size_t N>
Dual<T, N> pow(const Dual<T, N>& a, double r) {
  using std::pow;
  if (r == 0.0) return Dual<T, N>(1.0);
  const T dv = r * pow(a.v, r - 1.0);
  Dual<T, N> out;
  out.v = pow(a.v, r);
  for (std::size_t i = 0; i < N; ++i) out.d[i] = dv * a.d[i];
  return out;
}

/// Integer power by repeated multiplication; exact for negative bases.
template <class S>
S ipow(const S& a, int n) {
  if (n < 0) return S(1.0) / ipow(a, -n);
  S r(1.0);
  S base = a;
  while (n > 0) {
    if (n & 1) r = r * base;
    base = base * base;
    n >>= 1;
  }
  return r;
}

/// Generic real power: dispatches to ipow for integral exponents so that
/// negative bases stay well defined.
template <class S>
S rpow(const S& a, double r) {
  using std::pow;
  if (r == std::round(r) && std::abs(r) < 64.0) return ipow(a, static_cast<int>(r));
  return pow(a, r);
}

// The three jet levels used throughout: derivatives with respect to the eight
// tangent-bundle coordinates (x^0..x^3, v^0..v^3).
inline constexpr std::size_t kJetVars = 8;
using J1 = Dual<double, kJetVars>;
using J2 = Dual<J1, kJetVars>;
using J3 = Dual<J2, kJetVars>;

/// Lift a constant into any scalar type.
template <class S>
S constant(double c) {
  return S(c);
}

/// Seed independent variable `index` with the given value at every nesting
/// level.
template <class S>
S make_variable(double value, std::size_t index) {
  S r;
  r.v = make_variable<std::decay_t<decltype(r.v)>>(value, index);
  r.d[index] = decltype(r.v)(1.0);
  return r;
}
template <>
inline double make_variable<double>(double value, std::size_t) {
  return value;
}

}  // namespace finsmet
