#include "doctest.h"

#include <sstream>

#include "finsmet/verification.hpp"
#include "support.hpp"

using namespace finsmet;
using namespace fmtest;

namespace {

VectorialConnection translational() { return VectorialConnection(euclidean(), exp_oneform(), {0, 0, 1}); }

/// A + (e^{|b|^3/3} - 1) (v^0)^2 with |b| = e^{x0}.
std::shared_ptr<const FinslerLagrangian> translational_lagrangian() {
  return make_lagrangian(
      [](const auto& x, const auto& v) {
        const auto n3 = exp(3.0 * x[0]);
        return v[0] * v[0] * exp(n3 / 3.0) + v[1] * v[1] + v[2] * v[2] + v[3] * v[3];
      },
      {}, "translational");
}

std::vector<std::pair<Point, TangentVector>> samples(std::size_t n, std::uint64_t seed, double shrink = 1.0) {
  Sampler s(seed);
  const DomainBox box{{-shrink, -shrink, -shrink, -shrink}, {shrink, shrink, shrink, shrink}};
  std::vector<std::pair<Point, TangentVector>> out;
  for (std::size_t i = 0; i < n; ++i) {
    const Point x = s.point(box);
    out.emplace_back(x, s.direction());
  }
  return out;
}

}  // namespace

TEST_CASE("flat Levi-Civita autoparallels are straight lines") {
  const LeviCivitaConnection lc(euclidean());
  const Point x0{{0.1, -0.2, 0.3, 0.0}};
  const TangentVector v0{{0.5, 0.25, -1.0, 2.0}};
  const Trajectory t = integrate_autoparallel(lc, x0, v0, 1e-2, 100);
  REQUIRE(t.states.size() == 101);
  CHECK(t.states.back().s == doctest::Approx(1.0).epsilon(1e-14));
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(t.states.back().x[i] == doctest::Approx(x0[i] + v0[i]).epsilon(1e-13));
    CHECK(t.states.back().v[i] == doctest::Approx(v0[i]).epsilon(1e-14));
  }
  const auto L = make_riemannian(euclidean());
  const Trajectory g = integrate_geodesic(*L, x0, v0, 1e-2, 100);
  const ComparisonResult c = compare_trajectories(t, g, *L, lc);
  CHECK(c.max_coordinate_deviation < 1e-13);
  CHECK(c.span == doctest::Approx(1.0));
}

TEST_CASE("one-dimensional Weyl autoparallel against the closed form") {
  // x0'' = -(x0')^2 with x0(0) = 0, x0'(0) = 1 gives x0 = ln(1 + s).
  const VectorialConnection c(euclidean(), constant_oneform({1, 0, 0, 0}), {2, 0, 0});
  const Trajectory t = integrate_autoparallel(c, Point{}, TangentVector{{1, 0, 0, 0}}, 1e-3, 1000);
  CHECK(t.states.back().x[0] == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(t.states.back().v[0] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("autoparallel blow-up truncates the trajectory") {
  // With x0'(0) = -1 the solution ln(1 - s) diverges at s = 1.
  const VectorialConnection c(euclidean(), constant_oneform({1, 0, 0, 0}), {2, 0, 0});
  const Trajectory t = integrate_autoparallel(c, Point{}, TangentVector{{-1, 0, 0, 0}}, 1e-3, 2000);
  CHECK(t.truncated);
  CHECK(t.truncation_reason.find("autoparallel") != std::string::npos);
  CHECK(t.states.size() < 2001);
  CHECK(t.states.back().s > 0.9);
  // Matches the closed form well before the singularity.
  CHECK(t.states[900].x[0] == doctest::Approx(std::log(0.1)).epsilon(1e-8));
}

TEST_CASE("RK4 convergence order") {
  const VectorialConnection conn = translational();
  // Steps coarse enough that the differences stay well above roundoff.
  for (const auto& [x, v] : samples(10, 1, 0.5)) CHECK(measure_rk4_order(conn, x, v, 1.0, 0.1) >= 3.5);
}

TEST_CASE("translational Lagrangian reproduces the connection") {
  const VectorialConnection conn = translational();
  const auto L = translational_lagrangian();
  const auto s = samples(500, 2);
  CHECK(spray_vs_connection(*L, conn, s) < 1e-7);
  CHECK(euler_lagrange_residual(*L, conn, s) < 1e-10);

  for (const auto& [x, v] : samples(10, 3, 0.5)) {
    const Trajectory a = integrate_autoparallel(conn, x, v, 1e-3, 1000);
    const Trajectory g = integrate_geodesic(*L, x, v, 1e-3, 1000);
    CHECK_FALSE(g.truncated);
    const ComparisonResult c = compare_trajectories(a, g, *L, conn);
    CHECK(c.max_coordinate_deviation < 1e-6);
    CHECK(c.geodesic_residual_on_autoparallel < 1e-7);
    CHECK(lagrangian_drift(*L, g) < 1e-8);
  }
}

TEST_CASE("Riemannian Lagrangian fails against a Weyl connection") {
  const VectorialConnection conn(euclidean(), constant_oneform({1, 0, 0, 0}), {2, 0, 0});
  const auto L = make_riemannian(euclidean());
  const auto s = samples(100, 4);
  CHECK(spray_vs_connection(*L, conn, s) > 0.1);
  CHECK(euler_lagrange_residual(*L, conn, s) > 0.1);

  VerifyConfig cfg;
  cfg.samples = s;
  cfg.initial_conditions = samples(2, 5, 0.2);
  cfg.steps = 200;
  const VerifyResult r = verify_bundle(*L, conn, cfg);
  CHECK_FALSE(r.passed());
  CHECK(r.trajectories == 2);
  CHECK(r.max_deviation > 1e-6);
}

TEST_CASE("verify bundle") {
  const VectorialConnection conn = translational();
  const auto L = translational_lagrangian();
  VerifyConfig cfg;
  SUBCASE("empty sample set") {
    try {
      verify_bundle(*L, conn, cfg);
      FAIL("expected Config");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::Config);
    }
  }
  SUBCASE("passes") {
    cfg.samples = samples(200, 6);
    cfg.initial_conditions = samples(3, 7, 0.5);
    const VerifyResult r = verify_bundle(*L, conn, cfg);
    CHECK(r.passed());
    CHECK(r.comparisons.size() == 3);
    CHECK(r.horizontal_residual < 1e-7);
    CHECK(r.max_drift < 1e-8);
  }
}

TEST_CASE("spray is undefined for a degenerate Lagrangian") {
  const VectorialConnection conn(minkowski(), constant_oneform({1, 1, 0, 0}), {2, 0, 0});
  const auto L = make_lagrangian(
      [](const auto& x, const auto& v) {
        const auto A = -v[0] * v[0] + v[1] * v[1] + v[2] * v[2] + v[3] * v[3] + 0.0 * x[0];
        const auto B = v[0] + v[1];
        return A * A / (B * B);
      },
      [](const Point&, const TangentVector& v) { return std::abs(v[0] + v[1]) > 1e-2; }, "A^2 / B^2");
  std::vector<std::pair<Point, TangentVector>> s;
  for (const auto& p : samples(200, 8))
    if (L->admissible(p.first, p.second)) s.push_back(p);
  try {
    spray_vs_connection(*L, conn, s);
    FAIL("expected DegenerateHessian");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateHessian);
  }
  CHECK(euler_lagrange_residual(*L, conn, s) < 1e-12);

  // Geodesic integration stops at the first step.
  const Trajectory g = integrate_geodesic(*L, s.front().first, s.front().second, 1e-3, 10);
  CHECK(g.truncated);
  CHECK(g.states.size() == 1);
}

TEST_CASE("autoparallel flow respects affine reparametrization") {
  // gamma(2 s) for v0 matches the curve started at 2 v0.
  const VectorialConnection conn = translational();
  for (const auto& [x, v] : samples(5, 9, 0.3)) {
    TangentVector v2 = v;
    for (double& e : v2.components) e *= 2.0;
    const Trajectory a = integrate_autoparallel(conn, x, v, 1e-3, 1000);
    const Trajectory b = integrate_autoparallel(conn, x, v2, 1e-3, 500);
    CHECK(max_diff(a.states.back().x.coords, b.states.back().x.coords) < 1e-9);
  }
}

TEST_CASE("trajectory CSV") {
  const LeviCivitaConnection lc(euclidean());
  const Trajectory t = integrate_autoparallel(lc, Point{}, TangentVector{{1, 0, 0, 0}}, 0.5, 2);
  std::istringstream in(trajectory_csv(t));
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  REQUIRE(lines.size() == 4);
  CHECK(lines[0] == "s,x0,x1,x2,x3,v0,v1,v2,v3");
  CHECK(lines[3].rfind("1,1,0,0,0,1,0,0,0", 0) == 0);
}
