#include "doctest.h"

#include "finsmet/catalog.hpp"
#include "finsmet/sampling.hpp"
#include "support.hpp"

using namespace finsmet;
using namespace fmtest;

namespace {

std::shared_ptr<const MetricField> catalog_metric(const char* json) {
  Issues issues;
  auto m = make_catalog_metric(Json::parse(json), "metric", issues);
  REQUIRE(issues.empty());
  return m;
}

std::vector<std::shared_ptr<const MetricField>> catalog_metrics() {
  return {
      catalog_metric(R"({"family": "euclidean"})"),
      catalog_metric(R"({"family": "minkowski"})"),
      catalog_metric(R"({"family": "diag-power", "entries": [
          {"coefficient": 1, "axis": 0, "power": 0},
          {"coefficient": 1, "axis": 0, "power": 2},
          {"coefficient": 2, "axis": 3, "power": 2},
          {"coefficient": 1, "axis": 0, "power": 0}]})"),
      catalog_metric(R"({"family": "conformal-flat", "f": {"family": "poly", "coefficients": [0, 0.3, 0.1]}})"),
      catalog_metric(R"({"family": "conformal-flat", "signature": "euclidean",
          "f": {"family": "exp", "amplitude": 0.2, "rate": 1}})"),
      wavy(),
  };
}

/// Points in [0.5, 1.5]^4, inside every catalog metric's domain.
std::vector<Point> test_points(std::size_t n, std::uint64_t seed) {
  Sampler s(seed);
  DomainBox box{{0.5, 0.5, 0.5, 0.5}, {1.5, 1.5, 1.5, 1.5}};
  std::vector<Point> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(s.point(box));
  return out;
}

}  // namespace

TEST_CASE("christoffel of diag(1, x0^2, 1, 1)") {
  const auto a = polar_like();
  const Tensor3d g = christoffel(*a, Point{{2.0, 0.3, -0.1, 0.4}});
  CHECK(g[1][0][1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g[1][1][0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(g[0][1][1] == doctest::Approx(-2.0).epsilon(1e-14));
  double others = 0.0;
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n)
      for (std::size_t r = 0; r < 4; ++r) {
        const bool known = (m == 1 && ((n == 0 && r == 1) || (n == 1 && r == 0))) || (m == 0 && n == 1 && r == 1);
        if (!known) others = std::max(others, std::abs(g[m][n][r]));
      }
  CHECK(others == 0.0);
}

TEST_CASE("christoffel is symmetric in the lower indices") {
  for (const auto& a : catalog_metrics())
    for (const Point& x : test_points(50, 3)) {
      const Tensor3d g = christoffel(*a, x);
      for (std::size_t m = 0; m < 4; ++m)
        for (std::size_t n = 0; n < 4; ++n)
          for (std::size_t r = 0; r < 4; ++r) REQUIRE(g[m][n][r] == g[m][r][n]);
    }
}

TEST_CASE("levi-civita connection is metric compatible on every catalog metric") {
  for (const auto& a : catalog_metrics()) {
    const LeviCivitaConnection lc(a);
    double worst = 0.0;
    for (const Point& x : test_points(100, 5)) worst = std::max(worst, max_abs(covariant_derivative_of_metric(lc, *a, x)));
    INFO(a->description());
    CHECK(worst < 1e-8);
  }
}

TEST_CASE("christoffel agrees with a finite-difference oracle") {
  for (const auto& a : catalog_metrics()) {
    double worst = 0.0;
    for (const Point& x : test_points(20, 7)) {
      const Tensor3d exact = christoffel(*a, x);
      worst = std::max(worst, max_diff(exact, fd_christoffel(*a, x)) / std::max(1.0, max_abs(exact)));
    }
    INFO(a->description());
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("metric jet derivatives agree with central differences") {
  for (const auto& a : catalog_metrics())
    for (const Point& x : test_points(20, 9)) {
      const MetricJet j = metric_jet(*a, x);
      for (std::size_t l = 0; l < 4; ++l) {
        Point xp = x, xm = x;
        xp[l] += 1e-5;
        xm[l] -= 1e-5;
        const Mat4d ap = a->at(xp), am = a->at(xm);
        for (std::size_t m = 0; m < 4; ++m)
          for (std::size_t n = 0; n < 4; ++n) {
            const double fd = (ap[m][n] - am[m][n]) / 2e-5;
            REQUIRE(std::abs(fd - j.d[l][m][n]) <= 1e-6 * std::max(1.0, std::abs(fd)));
          }
      }
    }
}

TEST_CASE("one-form derivatives agree with central differences") {
  const std::vector<std::shared_ptr<const OneFormField>> forms{wavy_oneform(), exp_oneform(), radial_oneform()};
  for (const auto& b : forms)
    for (const Point& x : test_points(20, 11)) {
      const Mat4d d = oneform_derivative(*b, x);
      for (std::size_t m = 0; m < 4; ++m) {
        Point xp = x, xm = x;
        xp[m] += 1e-5;
        xm[m] -= 1e-5;
        const Vec4d bp = b->at(xp), bm = b->at(xm);
        for (std::size_t n = 0; n < 4; ++n) {
          const double fd = (bp[n] - bm[n]) / 2e-5;
          REQUIRE(std::abs(fd - d[m][n]) <= 1e-6 * std::max(1.0, std::abs(fd)));
        }
      }
    }
}

TEST_CASE("raise and lower index") {
  const Point x{{0.1, 0.2, 0.3, 0.4}};
  CHECK(max_diff(raise_index(*euclidean(), x, {1, 0, 0, 0}), Vec4d{1, 0, 0, 0}) == 0.0);
  CHECK(max_diff(raise_index(*minkowski(), x, {1, 0, 0, 0}), Vec4d{-1, 0, 0, 0}) == 0.0);
  CHECK(max_diff(raise_index(*minkowski(), x, {1, 1, 0, 0}), Vec4d{-1, 1, 0, 0}) == 0.0);
  CHECK(oneform_norm_squared(*minkowski(), *constant_oneform({1, 1, 0, 0}), x) == 0.0);

  const auto a = wavy();
  for (const Point& p : test_points(20, 13)) {
    const Vec4d b{0.3, -1.2, 0.7, 2.0};
    CHECK(max_diff(lower_index(*a, p, raise_index(*a, p, b)), b) < 1e-12);
  }
}

TEST_CASE("levi-civita derivative of dr on Euclidean space") {
  // b = dr = x / r, so nabla_mu b_nu = (delta_{mu nu} - b_mu b_nu) / r.
  const auto dr = make_oneform(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        const S r = sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
        Vec4<S> b;
        for (std::size_t i = 0; i < kDim; ++i) b[i] = x[i] / r;
        return b;
      },
      "dr");
  const Point x{{2.0, 0.0, 0.0, 0.0}};
  const Mat4d nb = levi_civita_covariant_derivative_oneform(*euclidean(), *dr, x);
  const Vec4d b{1, 0, 0, 0};
  Mat4d expected{};
  for (std::size_t m = 0; m < 4; ++m)
    for (std::size_t n = 0; n < 4; ++n) expected[m][n] = ((m == n ? 1.0 : 0.0) - b[m] * b[n]) / 2.0;
  CHECK(max_diff(nb, expected) < 1e-14);
}

TEST_CASE("levi-civita derivative of exp(x0) dx0 on flat space") {
  const Point x{{0.7, -0.2, 0.1, 0.5}};
  const Mat4d nb = levi_civita_covariant_derivative_oneform(*euclidean(), *exp_oneform(), x);
  Mat4d expected{};
  expected[0][0] = std::exp(0.7);
  CHECK(max_diff(nb, expected) < 1e-14);
}

TEST_CASE("|b| jet agrees with central differences") {
  const auto a = wavy();
  const auto b = wavy_oneform();
  for (const Point& x : test_points(10, 15)) {
    const Scalar2Jet j = oneform_norm_jet(*a, *b, x);
    CHECK(j.value == doctest::Approx(std::sqrt(std::abs(oneform_norm_squared(*a, *b, x)))).epsilon(1e-14));
    for (std::size_t m = 0; m < 4; ++m) {
      Point xp = x, xm = x;
      xp[m] += 1e-5;
      xm[m] -= 1e-5;
      const double fp = oneform_norm_jet(*a, *b, xp).value;
      const double fm = oneform_norm_jet(*a, *b, xm).value;
      CHECK(std::abs((fp - fm) / 2e-5 - j.first[m]) < 1e-6);
      const Vec4d gp = oneform_norm_jet(*a, *b, xp).first;
      const Vec4d gm = oneform_norm_jet(*a, *b, xm).first;
      for (std::size_t n = 0; n < 4; ++n) CHECK(std::abs((gp[n] - gm[n]) / 2e-5 - j.second[m][n]) < 1e-5);
    }
  }
}

TEST_CASE("singular metric raises") {
  const auto degenerate = make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        m[0][0] = S(1.0);
        m[1][1] = S(1.0);
        m[2][2] = S(1.0);
        return m;
      },
      "rank 3");
  const Point x{{0, 0, 0, 0}};
  try {
    metric_jet(*degenerate, x);
    FAIL("expected SingularMetric");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularMetric);
  }
  CHECK_THROWS_AS(christoffel(*degenerate, x), Error);
  CHECK_THROWS_AS(check_metric(*degenerate, x), Error);
}

TEST_CASE("asymmetric metric is rejected by check_metric") {
  const auto skew = make_metric(
      [](const auto& x) {
        using S = std::decay_t<decltype(x[0])>;
        Mat4<S> m = zero_mat<S>();
        for (std::size_t i = 0; i < kDim; ++i) m[i][i] = S(1.0);
        m[0][1] = S(0.5);
        return m;
      },
      "skew");
  CHECK_THROWS_AS(check_metric(*skew, Point{}), Error);
  CHECK_NOTHROW(check_metric(*wavy(), Point{{0.1, 0.2, 0.3, 0.4}}));
}
