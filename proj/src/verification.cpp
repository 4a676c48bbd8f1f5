#include "finsmet/verification.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace finsmet {

namespace {

constexpr double kBlowUp = 1e12;

struct State {
  Vec4d x{};
  Vec4d v{};
};

State axpy(const State& y, double h, const State& k) {
  State r;
  for (std::size_t i = 0; i < kDim; ++i) {
    r.x[i] = y.x[i] + h * k.x[i];
    r.v[i] = y.v[i] + h * k.v[i];
  }
  return r;
}

/// One classical RK4 step of x' = v, v' = acc(x, v).
template <class Acc>
State rk4_step(const State& y, double h, const Acc& acc) {
  auto f = [&](const State& s) { return State{s.v, acc(s.x, s.v)}; };
  const State k1 = f(y);
  const State k2 = f(axpy(y, 0.5 * h, k1));
  const State k3 = f(axpy(y, 0.5 * h, k2));
  const State k4 = f(axpy(y, h, k3));
  State r;
  for (std::size_t i = 0; i < kDim; ++i) {
    r.x[i] = y.x[i] + h / 6.0 * (k1.x[i] + 2.0 * k2.x[i] + 2.0 * k3.x[i] + k4.x[i]);
    r.v[i] = y.v[i] + h / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
  }
  return r;
}

bool tame(const State& y) {
  for (std::size_t i = 0; i < kDim; ++i)
    if (!(std::abs(y.x[i]) < kBlowUp) || !(std::abs(y.v[i]) < kBlowUp)) return false;
  return true;
}

void check_step(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw Error(ErrorCode::InvalidArgument, "integration step must be > 0");
}

double rel_mismatch(const Vec4d& twoG, const Vec4d& gvv) {
  double m = 0.0;
  for (std::size_t i = 0; i < kDim; ++i) m = std::max(m, std::abs(twoG[i] - gvv[i]));
  return m / (1.0 + norm(gvv));
}

}  // namespace

Trajectory integrate_autoparallel(const AffineConnection& conn, const Point& x0, const TangentVector& v0, double step,
                                  std::size_t steps) {
  check_step(step);
  if (!conn.in_domain(x0)) throw Error(ErrorCode::InvalidArgument, "initial point outside the connection's domain");
  auto acc = [&conn](const Vec4d& x, const Vec4d& v) {
    const Point p{x};
    if (!conn.in_domain(p)) throw Error(ErrorCode::BlowUp, "left the domain");
    return conn.autoparallel_rhs(p, TangentVector{v});
  };
  Trajectory out;
  out.step = step;
  out.steps_requested = steps;
  out.states.reserve(steps + 1);
  State y{x0.coords, v0.components};
  out.states.push_back({0.0, x0, v0});
  for (std::size_t n = 1; n <= steps; ++n) {
    const double s = static_cast<double>(n) * step;
    std::string why;
    try {
      y = rk4_step(y, step, acc);
      if (!tame(y)) why = "blew up";
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BlowUp) throw;
      why = e.what();
    }
    if (!why.empty()) {
      std::ostringstream os;
      os << "autoparallel " << why << " at s = " << s;
      out.truncated = true;
      out.truncation_reason = os.str();
      break;
    }
    out.states.push_back({s, Point{y.x}, TangentVector{y.v}});
  }
  return out;
}

Trajectory integrate_geodesic(const FinslerLagrangian& L, const Point& x0, const TangentVector& v0, double step,
                              std::size_t steps) {
  check_step(step);
  if (!L.admissible(x0, v0)) throw Error(ErrorCode::Inadmissible, "initial condition is not admissible");
  auto acc = [&L](const Vec4d& x, const Vec4d& v) {
    Vec4d G = spray_coefficients(L, Point{x}, TangentVector{v});
    for (double& g : G) g *= -2.0;
    return G;
  };
  Trajectory out;
  out.step = step;
  out.steps_requested = steps;
  out.states.reserve(steps + 1);
  State y{x0.coords, v0.components};
  out.states.push_back({0.0, x0, v0});
  for (std::size_t n = 1; n <= steps; ++n) {
    State next;
    try {
      next = rk4_step(y, step, acc);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Inadmissible && e.code() != ErrorCode::DegenerateHessian &&
          e.code() != ErrorCode::SingularMetric)
        throw;
      out.truncated = true;
      out.truncation_reason = e.what();
      break;
    }
    if (!tame(next) || !L.admissible(Point{next.x}, TangentVector{next.v})) {
      out.truncated = true;
      out.truncation_reason = "trajectory left the admissible cone";
      break;
    }
    y = next;
    out.states.push_back({static_cast<double>(n) * step, Point{y.x}, TangentVector{y.v}});
  }
  return out;
}

ComparisonResult compare_trajectories(const Trajectory& autoparallel, const Trajectory& geodesic,
                                      const FinslerLagrangian& L, const AffineConnection& conn) {
  if (autoparallel.step != geodesic.step)
    throw Error(ErrorCode::InvalidArgument, "trajectories must share the integration step");
  ComparisonResult out;
  const std::size_t n = std::min(autoparallel.states.size(), geodesic.states.size());
  if (n == 0) return out;
  out.span = autoparallel.states[n - 1].s;
  const std::size_t stride = std::max<std::size_t>(1, n / 100);
  for (std::size_t i = 0; i < n; ++i) {
    const TrajectoryState& a = autoparallel.states[i];
    const TrajectoryState& g = geodesic.states[i];
    for (std::size_t k = 0; k < kDim; ++k) {
      out.max_coordinate_deviation = std::max(out.max_coordinate_deviation, std::abs(a.x[k] - g.x[k]));
      out.max_velocity_deviation = std::max(out.max_velocity_deviation, std::abs(a.v[k] - g.v[k]));
    }
    if (i % stride != 0) continue;
    if (L.admissible(a.x, a.v)) {
      try {
        Vec4d G = spray_coefficients(L, a.x, a.v);
        for (double& e : G) e *= 2.0;
        const Vec4d gvv = contract_quadratic(conn.coefficients(a.x), a.v.components);
        out.geodesic_residual_on_autoparallel = std::max(out.geodesic_residual_on_autoparallel, rel_mismatch(G, gvv));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateHessian) throw;
      }
    }
    if (conn.in_domain(g.x) && L.admissible(g.x, g.v)) {
      try {
        Vec4d G = spray_coefficients(L, g.x, g.v);
        for (double& e : G) e *= 2.0;
        const Vec4d gvv = contract_quadratic(conn.coefficients(g.x), g.v.components);
        out.autoparallel_residual_on_geodesic = std::max(out.autoparallel_residual_on_geodesic, rel_mismatch(G, gvv));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateHessian) throw;
      }
    }
  }
  return out;
}

double spray_vs_connection(const FinslerLagrangian& L, const AffineConnection& conn,
                           const std::vector<std::pair<Point, TangentVector>>& samples) {
  double worst = 0.0;
  for (const auto& [x, v] : samples) {
    Vec4d G = spray_coefficients(L, x, v);
    for (double& e : G) e *= 2.0;
    worst = std::max(worst, rel_mismatch(G, contract_quadratic(conn.coefficients(x), v.components)));
  }
  return worst;
}

double euler_lagrange_residual(const FinslerLagrangian& L, const AffineConnection& conn,
                               const std::vector<std::pair<Point, TangentVector>>& samples) {
  double worst = 0.0;
  for (const auto& [x, v] : samples) {
    const LagrangianJet j = lagrangian_jet(L, x, v);
    const Vec4d gvv = contract_quadratic(conn.coefficients(x), v.components);
    double scale = 0.0;
    Vec4d r{};
    for (std::size_t n = 0; n < kDim; ++n) {
      double w = -j.grad[n];
      double wabs = std::abs(j.grad[n]);
      for (std::size_t k = 0; k < kDim; ++k) {
        w += v[k] * j.hess[k][kDim + n];
        wabs += std::abs(v[k] * j.hess[k][kDim + n]);
      }
      double lhs = 0.0;
      double labs = 0.0;
      for (std::size_t m = 0; m < kDim; ++m) {
        lhs += 0.5 * j.hess[kDim + n][kDim + m] * gvv[m];
        labs += std::abs(0.5 * j.hess[kDim + n][kDim + m] * gvv[m]);
      }
      r[n] = lhs - 0.5 * w;
      scale = std::max(scale, labs + 0.5 * wabs);
    }
    worst = std::max(worst, max_abs(r) / std::max(scale, 1e-300));
  }
  return worst;
}

double lagrangian_drift(const FinslerLagrangian& L, const Trajectory& trajectory) {
  if (trajectory.states.empty()) return 0.0;
  const double L0 = L(trajectory.states.front().x, trajectory.states.front().v);
  double worst = 0.0;
  for (const auto& st : trajectory.states) worst = std::max(worst, std::abs(L(st.x, st.v) - L0));
  return worst / std::abs(L0);
}

double measure_rk4_order(const AffineConnection& conn, const Point& x0, const TangentVector& v0, double span,
                         double h) {
  auto final_point = [&](double step) {
    const auto steps = static_cast<std::size_t>(std::llround(span / step));
    const Trajectory t = integrate_autoparallel(conn, x0, v0, step, steps);
    if (t.truncated) throw Error(ErrorCode::BlowUp, t.truncation_reason);
    return t.states.back().x.coords;
  };
  // Coarsen while the finest difference is at the roundoff floor.
  for (double step = h;; step *= 2.0) {
    const Vec4d a = final_point(step);
    const Vec4d b = final_point(0.5 * step);
    const Vec4d c = final_point(0.25 * step);
    double e1 = 0.0;
    double e2 = 0.0;
    for (std::size_t i = 0; i < kDim; ++i) {
      e1 = std::max(e1, std::abs(a[i] - b[i]));
      e2 = std::max(e2, std::abs(b[i] - c[i]));
    }
    const bool at_floor = e2 < 1e-13 * std::max(1.0, max_abs(c));
    if (at_floor && 4.0 * step <= span) continue;
    if (e2 == 0.0) return std::numeric_limits<double>::infinity();
    return std::log2(e1 / e2);
  }
}

VerifyResult verify_bundle(const FinslerLagrangian& L, const AffineConnection& conn, const VerifyConfig& config) {
  if (config.samples.empty()) throw Error(ErrorCode::Config, "verification needs at least one sample");
  VerifyResult out;
  const VerifyTolerances& tol = config.tolerances;

  for (const auto& [x, v] : config.samples) {
    const HorizontalDerivative hd = horizontal_derivative(L, conn, x, v);
    out.horizontal_residual = std::max(out.horizontal_residual, max_abs(hd.delta) / std::max(hd.scale, 1e-300));
  }
  out.euler_lagrange_residual = euler_lagrange_residual(L, conn, config.samples);
  try {
    out.spray_residual = spray_vs_connection(L, conn, config.samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHessian) throw;
    out.spray_residual = std::numeric_limits<double>::infinity();
    out.failures.push_back(std::string("spray undefined: ") + e.what());
  }

  for (const auto& [x0, v0] : config.initial_conditions) {
    const Trajectory ap = integrate_autoparallel(conn, x0, v0, config.step, config.steps);
    if (ap.truncated) {
      out.failures.push_back(ap.truncation_reason);
      continue;
    }
    const Trajectory geo = integrate_geodesic(L, x0, v0, config.step, config.steps);
    ++out.trajectories;
    if (geo.truncated) ++out.truncated;
    ComparisonResult cmp = compare_trajectories(ap, geo, L, conn);
    out.max_deviation = std::max(out.max_deviation, cmp.max_coordinate_deviation);
    out.max_velocity_deviation = std::max(out.max_velocity_deviation, cmp.max_velocity_deviation);
    out.max_drift = std::max(out.max_drift, lagrangian_drift(L, geo));
    out.comparisons.push_back(cmp);
  }

  auto check = [&out](const char* what, double value, double limit) {
    if (!(value < limit)) {
      std::ostringstream os;
      os << what << " " << value << " exceeds " << limit;
      out.failures.push_back(os.str());
    }
  };
  check("horizontal residual", out.horizontal_residual, tol.horizontal);
  check("Euler-Lagrange residual", out.euler_lagrange_residual, tol.horizontal);
  if (std::isfinite(out.spray_residual)) check("spray residual", out.spray_residual, tol.spray);
  if (out.truncated > 0) {
    std::ostringstream os;
    os << out.truncated << " of " << out.trajectories << " geodesics truncated";
    out.failures.push_back(os.str());
  }
  if (out.trajectories > 0) {
    check("trajectory deviation", out.max_deviation, tol.deviation);
    check("Lagrangian drift", out.max_drift, tol.conservation);
  }
  return out;
}

std::string trajectory_csv(const Trajectory& trajectory) {
  std::ostringstream os;
  os.precision(17);
  os << "s,x0,x1,x2,x3,v0,v1,v2,v3\n";
  for (const auto& st : trajectory.states) {
    os << st.s;
    for (double c : st.x.coords) os << ',' << c;
    for (double c : st.v.components) os << ',' << c;
    os << '\n';
  }
  return os.str();
}

}  // namespace finsmet
