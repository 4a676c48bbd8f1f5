#pragma once

// Fixed-step RK4 integration of autoparallels and Finsler geodesics, and the
// residual checks that compare a Lagrangian with a connection.

#include <string>
#include <utility>
#include <vector>

#include "finsmet/finsler.hpp"

namespace finsmet {

struct TrajectoryState {
  double s = 0.0;
  Point x;
  TangentVector v;
};

struct Trajectory {
  std::vector<TrajectoryState> states;
  double step = 0.0;
  std::size_t steps_requested = 0;
  std::string method = "rk4";
  bool truncated = false;
  std::string truncation_reason;
};

/// x'' = -Gamma(x)(x', x'). A state component above 1e12 in magnitude, a
/// non-finite value or leaving the connection's domain stops the integration
/// at the last good state with `truncated` set.
Trajectory integrate_autoparallel(const AffineConnection& conn, const Point& x0, const TangentVector& v0, double step,
                                  std::size_t steps);

/// x'' = -2 G(x, x'). Leaving the admissible cone (or hitting a degenerate
/// Hessian) stops the integration at the last good state with `truncated` set.
Trajectory integrate_geodesic(const FinslerLagrangian& L, const Point& x0, const TangentVector& v0, double step,
                              std::size_t steps);

struct ComparisonResult {
  double max_coordinate_deviation = 0.0;
  double max_velocity_deviation = 0.0;
  double span = 0.0;  ///< common parameter span
  /// Geodesic ODE residual |2G - Gamma v v| / (1 + |Gamma v v|) along the autoparallel.
  double geodesic_residual_on_autoparallel = 0.0;
  /// Autoparallel ODE residual along the geodesic, same normalization.
  double autoparallel_residual_on_geodesic = 0.0;
};

/// Compares states at equal parameter values over the common span.
ComparisonResult compare_trajectories(const Trajectory& autoparallel, const Trajectory& geodesic,
                                      const FinslerLagrangian& L, const AffineConnection& conn);

/// max over samples and mu of |2G^mu - Gamma^mu_{nu rho} v^nu v^rho| / (1 + |Gamma v v|).
/// Throws DegenerateHessian at the first sample with a singular g.
double spray_vs_connection(const FinslerLagrangian& L, const AffineConnection& conn,
                           const std::vector<std::pair<Point, TangentVector>>& samples);

/// Euler-Lagrange residual of the autoparallel equation, g Gamma v v - w / 2
/// with w_nu = v^s d_s dL/dv^nu - d_nu L, relative to the size of its terms.
/// Unlike the spray comparison it stays defined when g is singular.
double euler_lagrange_residual(const FinslerLagrangian& L, const AffineConnection& conn,
                               const std::vector<std::pair<Point, TangentVector>>& samples);

/// max |L(x(s), v(s)) - L(x0, v0)| / |L(x0, v0)| along a trajectory.
double lagrangian_drift(const FinslerLagrangian& L, const Trajectory& trajectory);

/// Observed convergence order from the final positions at steps h, h/2, h/4
/// over the parameter span. h is doubled (up to span/4) while the h/2 vs h/4
/// difference is below 1e-13 relative, where roundoff swamps truncation error.
/// Throws BlowUp when any of the runs is truncated.
double measure_rk4_order(const AffineConnection& conn, const Point& x0, const TangentVector& v0, double span,
                         double h);

struct VerifyTolerances {
  double horizontal = 1e-7;   ///< max |delta L| / scale
  double spray = 1e-7;        ///< spray_vs_connection
  double deviation = 1e-6;    ///< autoparallel vs geodesic coordinates
  double conservation = 1e-8; ///< L drift along geodesics
};

struct VerifyConfig {
  std::vector<std::pair<Point, TangentVector>> samples;
  std::vector<std::pair<Point, TangentVector>> initial_conditions;
  double step = 1e-3;
  std::size_t steps = 1000;
  VerifyTolerances tolerances;
};

struct VerifyResult {
  double horizontal_residual = 0.0;
  double spray_residual = 0.0;  ///< infinite when g is singular at a sample
  double euler_lagrange_residual = 0.0;
  double max_deviation = 0.0;
  double max_velocity_deviation = 0.0;
  double max_drift = 0.0;
  std::size_t trajectories = 0;
  std::size_t truncated = 0;
  std::vector<ComparisonResult> comparisons;
  std::vector<std::string> failures;
  bool passed() const { return failures.empty(); }
};

/// Throws Config when the sample set is empty.
VerifyResult verify_bundle(const FinslerLagrangian& L, const AffineConnection& conn, const VerifyConfig& config);

/// CSV with header s,x0,x1,x2,x3,v0,v1,v2,v3.
std::string trajectory_csv(const Trajectory& trajectory);

}  // namespace finsmet
