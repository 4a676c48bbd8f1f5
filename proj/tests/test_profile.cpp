#include "doctest.h"

#include <cmath>
#include <vector>

#include "finsmet/profile.hpp"

using namespace finsmet;

namespace {

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(lo + (hi - lo) * i / (n - 1));
  return xs;
}

template <class F>
std::vector<double> apply(const std::vector<double>& xs, F f) {
  std::vector<double> ys;
  for (double x : xs) ys.push_back(f(x));
  return ys;
}

ChebyshevSeries identity_profile(double lo, double hi) {
  const auto xs = grid(lo, hi, 40);
  return ChebyshevSeries::fit(xs, xs);
}

}  // namespace

TEST_CASE("chebyshev fit reproduces a cubic at the lowest degree") {
  const auto cubic = [](double t) { return t * t * t - 2.0 * t + 1.0; };
  const auto xs = grid(0.5, 2.0, 50);
  const ChebyshevSeries s = ChebyshevSeries::fit(xs, apply(xs, cubic));
  CHECK(s.degree() == 3);
  CHECK(s.fit_error() < 1e-13);
  for (double t : grid(0.5, 2.0, 17)) CHECK(s.eval(t) == doctest::Approx(cubic(t)).epsilon(1e-13));
}

TEST_CASE("chebyshev fit of a smooth function converges") {
  const auto xs = grid(0.0, 1.0, 80);
  const ChebyshevSeries s = ChebyshevSeries::fit(xs, apply(xs, [](double t) { return std::exp(t); }));
  CHECK(s.fit_error() < 1e-11);
  CHECK(s.eval(0.37) == doctest::Approx(std::exp(0.37)).epsilon(1e-11));
  CHECK(s.lo() == 0.0);
  CHECK(s.hi() == 1.0);
}

TEST_CASE("chebyshev fit of a constant") {
  const auto xs = grid(-1.0, 3.0, 20);
  const ChebyshevSeries s = ChebyshevSeries::fit(xs, std::vector<double>(xs.size(), 2.5));
  CHECK(s.degree() == 0);
  CHECK(s.eval(1.7) == doctest::Approx(2.5).epsilon(1e-15));
}

TEST_CASE("chebyshev series propagates jets") {
  const auto xs = grid(0.5, 2.0, 50);
  const ChebyshevSeries s = ChebyshevSeries::fit(xs, apply(xs, [](double t) { return t * t; }));
  J2 t = make_variable<J2>(1.3, 0);
  const J2 y = s.eval(t);
  CHECK(y.v.v == doctest::Approx(1.69).epsilon(1e-13));
  CHECK(y.v.d[0] == doctest::Approx(2.6).epsilon(1e-12));
  CHECK(y.d[0].d[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("profile integral against closed forms") {
  // lambda(t) = t: int t^1 / t = t - a, int t^2 / t = (t^2 - a^2) / 2.
  const ChebyshevSeries lam = identity_profile(0.5, 3.0);
  const ProfileIntegral rho(lam, 1, 1.0, 0.5, "rho");
  const ProfileIntegral g(lam, 2, 3.0, 0.5, "g");
  for (double t : grid(0.5, 3.0, 11)) {
    CHECK(rho.eval(t) == doctest::Approx(t - 0.5).epsilon(1e-12));
    CHECK(g.eval(t) == doctest::Approx(1.5 * (t * t - 0.25)).epsilon(1e-12));
  }
  CHECK(rho.eval(0.5) == 0.0);
  CHECK(rho.anchor() == 0.5);
}

TEST_CASE("profile integral with lambda = -t^2") {
  // rho = int t / (-t^2) = -ln(t / a)
  const auto xs = grid(0.4, 2.5, 60);
  const ChebyshevSeries lam = ChebyshevSeries::fit(xs, apply(xs, [](double t) { return -t * t; }));
  const ProfileIntegral rho(lam, 1, 1.0, 1.0, "rho");
  for (double t : grid(0.4, 2.5, 9)) CHECK(rho.eval(t) == doctest::Approx(-std::log(t)).epsilon(1e-11));
}

TEST_CASE("profile integral jets carry the integrand and its derivative") {
  const ChebyshevSeries lam = identity_profile(0.5, 3.0);
  const ProfileIntegral g(lam, 3, 1.0, 0.5, "g");  // integrand t^2
  const J2 y = g.eval(make_variable<J2>(1.7, 2));
  CHECK(y.v.v == doctest::Approx((std::pow(1.7, 3) - 0.125) / 3.0).epsilon(1e-12));
  CHECK(y.v.d[2] == doctest::Approx(1.7 * 1.7).epsilon(1e-12));
  CHECK(y.d[2].d[2] == doctest::Approx(2.0 * 1.7).epsilon(1e-10));
  const J3 z = g.eval(make_variable<J3>(1.7, 0));
  CHECK(z.d[0].d[0].d[0] == doctest::Approx(2.0).epsilon(1e-9));
}
