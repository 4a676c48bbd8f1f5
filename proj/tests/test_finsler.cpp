#include "doctest.h"

#include <string>

#include "finsmet/sampling.hpp"
#include "support.hpp"

using namespace finsmet;
using namespace fmtest;

namespace {

struct Named {
  std::string name;
  std::shared_ptr<const FinslerLagrangian> L;
  DomainBox box;
};

std::shared_ptr<const ScalarFunction> cube_third() {
  return make_scalar_function([](const auto& t) { return t * t * t / 3.0; }, "|b|^3/3");
}

std::shared_ptr<const ScalarFunction> one_plus() {
  return make_scalar_function([](const auto& z) { return 1.0 + z; }, "1 + z");
}

std::shared_ptr<const FinslerLagrangian> weyl_null_L(double kappa = 1.0) {
  AlphaBetaParams p;
  p.kind = AlphaBetaCase::PowerLaw;
  p.lambda = -1.0;
  p.kappa = kappa;
  p.c1 = 2.0;
  return std::make_shared<AlphaBetaMetric>(minkowski(), constant_oneform({1, 1, 0, 0}), p);
}

std::shared_ptr<const FinslerLagrangian> translational_L() {
  GeneralizedParams p;
  p.kind = GeneralizedCase::I;
  p.c3 = 1.0;
  return std::make_shared<GeneralizedAlphaBetaMetric>(euclidean(), exp_oneform(), p, nullptr, cube_third(),
                                                      one_plus());
}

/// A curved, non-quadratic and nondegenerate Lagrangian: kappa A s^0.3 on the s > 0, A > 0 cone.
std::shared_ptr<const FinslerLagrangian> fractional_L(double kappa = 1.0) {
  AlphaBetaParams p;
  p.kind = AlphaBetaCase::PowerLaw;
  p.lambda = 0.3;
  p.kappa = kappa;
  AdmissibilityMargins m;
  m.cone = Cone::Positive;
  m.delta_A = 1e-2;
  m.delta_B = 1e-2;
  return std::make_shared<AlphaBetaMetric>(euclidean(), wavy_oneform(), p, m);
}

std::shared_ptr<const FinslerLagrangian> exponential_L() {
  AlphaBetaParams p;
  p.kind = AlphaBetaCase::Exponential;
  p.c1 = 1.0;
  p.c3 = 2.0;
  AdmissibilityMargins m;
  m.delta_B = 1e-2;
  return std::make_shared<AlphaBetaMetric>(wavy(), wavy_oneform(), p, m);
}

const DomainBox kUnit{{-1, -1, -1, -1}, {1, 1, 1, 1}};
const DomainBox kPositive{{0.5, 0.5, 0.5, 0.5}, {1.5, 1.5, 1.5, 1.5}};

std::vector<Named> lagrangians() {
  return {
      {"riemannian wavy", make_riemannian(wavy()), kPositive},
      {"A^2/B^2 null", weyl_null_L(), kUnit},
      {"translational", translational_L(), kUnit},
      {"A s^0.3", fractional_L(), kPositive},
      {"exponential", exponential_L(), kPositive},
  };
}

std::vector<std::pair<Point, TangentVector>> admissible(const FinslerLagrangian& L, const DomainBox& box,
                                                         std::size_t n, std::uint64_t seed) {
  Sampler s(seed);
  std::vector<std::pair<Point, TangentVector>> out;
  while (out.size() < n) {
    const Point x = s.point(box);
    const TangentVector v = s.direction();
    if (L.admissible(x, v)) out.emplace_back(x, v);
  }
  return out;
}

/// Admissible samples away from the hypersurfaces where g turns singular, where the spray exists.
std::vector<std::pair<Point, TangentVector>> regular(const FinslerLagrangian& L, const DomainBox& box, std::size_t n,
                                                     std::uint64_t seed) {
  std::vector<std::pair<Point, TangentVector>> out;
  for (const auto& s : admissible(L, box, 4 * n, seed)) {
    if (std::abs(determinant(finsler_metric_tensor(L, s.first, s.second))) > 1e-4) out.push_back(s);
    if (out.size() == n) break;
  }
  REQUIRE(out.size() == n);
  return out;
}

TangentVector scaled(const TangentVector& v, double k) {
  TangentVector r = v;
  for (double& e : r.components) e *= k;
  return r;
}

}  // namespace

TEST_CASE("positive 2-homogeneity") {
  for (const auto& [name, L, box] : lagrangians()) {
    INFO(name);
    for (const auto& [x, v] : admissible(*L, box, 1000, 1))
      for (double k : {0.5, 2.0, 7.3}) {
        REQUIRE(L->admissible(x, scaled(v, k)));
        const double lk = (*L)(x, scaled(v, k));
        const double expect = k * k * (*L)(x, v);
        REQUIRE(std::abs(lk - expect) <= 1e-8 * std::abs(expect));
      }
  }
}

TEST_CASE("Euler identity g(v, v) = L") {
  for (const auto& [name, L, box] : lagrangians()) {
    INFO(name);
    for (const auto& [x, v] : admissible(*L, box, 1000, 2)) {
      const Mat4d g = finsler_metric_tensor(*L, x, v);
      const double l = (*L)(x, v);
      REQUIRE(std::abs(quad_form(g, v.components, v.components) - l) <= 1e-8 * std::max(1.0, std::abs(l)));
    }
  }
}

TEST_CASE("metric tensor is exactly symmetric") {
  for (const auto& [name, L, box] : lagrangians())
    for (const auto& [x, v] : admissible(*L, box, 200, 3)) {
      const Mat4d g = finsler_metric_tensor(*L, x, v);
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) REQUIRE(g[i][j] == g[j][i]);
    }
}

TEST_CASE("L = A on flat space has identity metric tensor and zero spray") {
  const auto L = make_riemannian(euclidean());
  Mat4d id{};
  for (std::size_t i = 0; i < 4; ++i) id[i][i] = 1.0;
  for (const auto& [x, v] : admissible(*L, kUnit, 50, 4)) {
    CHECK(max_diff(finsler_metric_tensor(*L, x, v), id) == 0.0);
    CHECK(max_abs(spray_coefficients(*L, x, v)) == 0.0);
  }
}

TEST_CASE("metric tensor of A^2/B^2 against a finite-difference Hessian") {
  const auto L = weyl_null_L();
  const Point x{{0.1, -0.2, 0.3, 0.05}};
  const TangentVector v{{1, 0, 0, 0}};
  const Mat4d g = finsler_metric_tensor(*L, x, v);
  const Mat4d fd = fd_metric_tensor(as_function(*L), x.coords, v.components);
  CHECK(max_diff(g, fd) <= 1e-6 * std::max(1.0, max_abs(g)));
  // The Hessian is finite but singular everywhere on this family.
  CHECK(std::abs(determinant(g)) < 1e-12);
}

TEST_CASE("spray against a finite-difference oracle") {
  for (const auto& [name, L, box] : lagrangians()) {
    if (name == "A^2/B^2 null") continue;  // singular g, see below
    INFO(name);
    for (const auto& [x, v] : regular(*L, box, 10, 5)) {
      const Vec4d G = spray_coefficients(*L, x, v);
      const Vec4d fd = fd_spray(as_function(*L), x.coords, v.components);
      CHECK(max_diff(G, fd) <= 1e-5 * std::max(1.0, max_abs(G)));
    }
  }
}

TEST_CASE("spray is undefined for A^2/B^2 with null b") {
  const auto L = weyl_null_L();
  for (const auto& [x, v] : admissible(*L, kUnit, 20, 6)) {
    try {
      spray_coefficients(*L, x, v);
      FAIL("expected DegenerateHessian");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateHessian);
    }
  }
}

TEST_CASE("spray homogeneity") {
  for (const auto& [name, L, box] : lagrangians()) {
    if (name == "A^2/B^2 null") continue;
    INFO(name);
    for (const auto& [x, v] : regular(*L, box, 1000, 7)) {
      const Vec4d G = spray_coefficients(*L, x, v);
      for (double k : {0.5, 2.0}) {
        const Vec4d Gk = spray_coefficients(*L, x, scaled(v, k));
        Vec4d expect = G;
        for (double& e : expect) e *= k * k;
        REQUIRE(max_diff(Gk, expect) <= 1e-8 * std::max(1.0, max_abs(expect)));
      }
    }
  }
}

TEST_CASE("spray is invariant under rescaling L") {
  const auto L1 = fractional_L(1.0);
  const auto L5 = fractional_L(5.0);
  for (const auto& [x, v] : admissible(*L1, kPositive, 100, 8))
    CHECK(max_diff(spray_coefficients(*L1, x, v), spray_coefficients(*L5, x, v)) < 1e-10);
}

TEST_CASE("Riemannian spray is half the Christoffel contraction") {
  const auto a = polar_like();
  const auto L = make_riemannian(a);
  for (const auto& [x, v] : admissible(*L, kPositive, 100, 9)) {
    const Vec4d G = spray_coefficients(*L, x, v);
    const Vec4d gvv = contract_quadratic(christoffel(*a, x), v.components);
    Vec4d twoG = G;
    for (double& e : twoG) e *= 2.0;
    REQUIRE(max_diff(twoG, gvv) < 1e-8);
  }
}

TEST_CASE("nonlinear connection is the velocity derivative of the spray") {
  const auto L = translational_L();
  for (const auto& [x, v] : admissible(*L, kUnit, 10, 10)) {
    const SprayResult s = spray(*L, x, v);
    CHECK(max_diff(s.G, spray_coefficients(*L, x, v)) < 1e-12 * std::max(1.0, max_abs(s.G)));
    for (std::size_t m = 0; m < 4; ++m) {
      TangentVector vp = v, vm = v;
      vp[m] += 1e-6;
      vm[m] -= 1e-6;
      const Vec4d gp = spray_coefficients(*L, x, vp), gm = spray_coefficients(*L, x, vm);
      for (std::size_t n = 0; n < 4; ++n)
        CHECK(std::abs((gp[n] - gm[n]) / 2e-6 - s.N[n][m]) < 1e-5 * std::max(1.0, std::abs(s.N[n][m])));
    }
  }
}

TEST_CASE("Lagrangian jet against finite differences") {
  const auto L = exponential_L();
  for (const auto& [x, v] : admissible(*L, kPositive, 5, 11)) {
    const LagrangianJet j = lagrangian_jet(*L, x, v);
    const FdJet fd = fd_jet(as_function(*L), x.coords, v.components);
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(j.grad[i] - fd.grad[i]) < 1e-7 * std::max(1.0, std::abs(j.grad[i])));
      for (std::size_t k = 0; k < 8; ++k)
        CHECK(std::abs(j.hess[i][k] - fd.hess[i][k]) < 1e-5 * std::max(1.0, std::abs(j.hess[i][k])));
    }
  }
}

TEST_CASE("horizontal derivative") {
  SUBCASE("L = A with its own Levi-Civita connection vanishes") {
    const auto a = wavy();
    const auto L = make_riemannian(a);
    const LeviCivitaConnection lc(a);
    for (const auto& [x, v] : admissible(*L, kPositive, 200, 12))
      REQUIRE(max_abs(horizontal_derivative(*L, lc, x, v).delta) < 1e-8);
  }
  SUBCASE("L = A with a flat Weyl connection") {
    // delta_0 L = -Gamma^1_{01} v^1 dL/dv^1 = -1 * 1 * 2.
    const auto L = make_riemannian(euclidean());
    const VectorialConnection conn(euclidean(), constant_oneform({1, 0, 0, 0}), {2, 0, 0});
    const HorizontalDerivative h = horizontal_derivative(*L, conn, Point{}, TangentVector{{0, 1, 0, 0}});
    CHECK(h.delta[0] == doctest::Approx(-2.0).epsilon(1e-14));
    CHECK(std::abs(h.delta[0]) > 0.1);
  }
  SUBCASE("A^2/B^2 with null b and the Weyl connection vanishes") {
    const auto L = weyl_null_L();
    const VectorialConnection conn(minkowski(), constant_oneform({1, 1, 0, 0}), {2, 0, 0});
    double worst = 0.0;
    for (const auto& [x, v] : admissible(*L, kUnit, 1000, 13)) {
      const HorizontalDerivative h = horizontal_derivative(*L, conn, x, v);
      worst = std::max(worst, max_abs(h.delta) / std::max(h.scale, 1e-300));
    }
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("Berwald quadraticity") {
  SUBCASE("Riemannian spray is quadratic with the Christoffel symbols") {
    const auto a = wavy();
    const auto L = make_riemannian(a);
    Sampler s(14);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(s.point(kPositive));
    const QuadraticityResult q = berwald_quadraticity(*L, pts, s, 20);
    CHECK(q.max_residual < 1e-9);
    for (std::size_t i = 0; i < q.points.size(); ++i)
      CHECK(max_diff(q.fitted[i], christoffel(*a, q.points[i])) < 1e-8);
  }
  SUBCASE("translational Lagrangian is Berwald with the input connection") {
    const auto L = translational_L();
    const VectorialConnection conn(euclidean(), exp_oneform(), {0, 0, 1});
    Sampler s(15);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(s.point(kUnit));
    const QuadraticityResult q = berwald_quadraticity(*L, pts, s, 20);
    CHECK(q.max_residual < 1e-8);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Tensor3d g = conn.coefficients(q.points[i]);
      CHECK(max_diff(q.fitted[i], g) < 1e-5 * std::max(1.0, max_abs(g)));
    }
  }
  SUBCASE("a Randers-like perturbation is not Berwald") {
    // L = A + B^4 / A with a non-parallel b.
    const auto a = euclidean();
    const auto b = wavy_oneform();
    const auto L = make_lagrangian(
        [a, b](const auto& x, const auto& v) {
          const auto A = quad_form(a->eval(x), v, v);
          const auto B = dot(b->eval(x), v);
          return A + B * B * B * B / A;
        },
        {}, "A + B^4/A");
    Sampler s(16);
    std::vector<Point> pts;
    for (int i = 0; i < 20; ++i) pts.push_back(s.point(kPositive));
    CHECK(berwald_quadraticity(*L, pts, s, 20).max_residual > 1e-3);
  }
}

TEST_CASE("nondegeneracy scan") {
  SUBCASE("Minkowski L = A") {
    const auto L = make_riemannian(minkowski());
    const NondegeneracyResult r = nondegeneracy_scan(*L, admissible(*L, kUnit, 100, 17));
    CHECK(r.degenerate_count == 0);
    CHECK(r.min_abs_det == doctest::Approx(1.0).epsilon(1e-14));
    REQUIRE(r.signatures.size() == 1);
    CHECK(r.signatures.begin()->first == "-+++");
  }
  SUBCASE("U^2 e^g is a perfect square and has rank one") {
    GeneralizedParams p;
    p.kind = GeneralizedCase::I;
    p.c3 = 1.0;
    const auto constant = make_scalar_function([](const auto& z) { return 0.0 * z + 1.0; }, "1");
    const auto L = std::make_shared<GeneralizedAlphaBetaMetric>(euclidean(), exp_oneform(), p, nullptr, cube_third(),
                                                                constant);
    const auto samples = admissible(*L, kUnit, 100, 18);
    CHECK(nondegeneracy_scan(*L, samples).degenerate_count == samples.size());
  }
  SUBCASE("translational Lagrangian: det g = e^g det a") {
    const auto L = translational_L();
    const auto samples = admissible(*L, kUnit, 200, 19);
    const NondegeneracyResult r = nondegeneracy_scan(*L, samples);
    CHECK(r.degenerate_count == 0);
    CHECK(r.min_abs_det > 0.0);
    for (const auto& [x, v] : samples) {
      const double bn = std::exp(x[0]);
      const double expect = std::exp(bn * bn * bn / 3.0);
      CHECK(determinant(finsler_metric_tensor(*L, x, v)) == doctest::Approx(expect).epsilon(1e-10));
    }
  }
  SUBCASE("A^2/B^2 with null b is degenerate everywhere") {
    const auto L = weyl_null_L();
    const auto samples = admissible(*L, kUnit, 100, 20);
    CHECK(nondegeneracy_scan(*L, samples).degenerate_count == samples.size());
  }
}

TEST_CASE("admissibility is cone stable") {
  for (const auto& [name, L, box] : lagrangians()) {
    Sampler s(21);
    for (int i = 0; i < 500; ++i) {
      const Point x = s.point(box);
      const TangentVector v = s.direction();
      if (!L->admissible(x, v)) continue;
      for (double k : {0.1, 3.0, 40.0}) REQUIRE(L->admissible(x, scaled(v, k)));
    }
  }
}

TEST_CASE("inadmissible directions are rejected") {
  const auto L = weyl_null_L();
  // B = 0 for v = (1, -1, 0, 0).
  CHECK_FALSE(L->admissible(Point{}, TangentVector{{1, -1, 0, 0}}));
  CHECK_THROWS_AS(finsler_metric_tensor(*L, Point{}, TangentVector{{1, -1, 0, 0}}), Error);
}

TEST_CASE("case formulas") {
  const Point x{{0.2, 0.1, -0.3, 0.4}};
  const TangentVector v{{0.3, 0.8, -0.1, 0.5}};
  const Vec4d b = wavy_oneform()->at(x);
  const double A = quad_form(euclidean()->at(x), v.components, v.components);
  const double B = dot(b, v.components);

  AlphaBetaParams p;
  p.kind = AlphaBetaCase::Riemannian;
  p.kappa = 3.0;
  p.tau = 2.0;
  const AlphaBetaMetric riem(euclidean(), wavy_oneform(), p);
  CHECK(riem(x, v) == doctest::Approx(3.0 * (2.0 * A + B * B)).epsilon(1e-14));

  p = {};
  p.kind = AlphaBetaCase::Exponential;
  p.c1 = 1.0;
  p.c3 = 2.0;
  const AlphaBetaMetric expo(euclidean(), wavy_oneform(), p);
  CHECK(expo(x, v) == doctest::Approx(B * B * std::exp(-A / (2.0 * B * B))).epsilon(1e-14));

  const auto L = weyl_null_L();
  const Vec4d bn{1, 1, 0, 0};
  const double An = quad_form(minkowski()->at(x), v.components, v.components);
  const double Bn = dot(bn, v.components);
  CHECK((*L)(x, v) == doctest::Approx(An * An / (Bn * Bn)).epsilon(1e-14));
}
