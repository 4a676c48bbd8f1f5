#include "finsmet/metrizability.hpp"

#include <cmath>
#include <sstream>

#include "finsmet/verification.hpp"

namespace finsmet {

namespace {

double frob_inner(const Mat4d& x, const Mat4d& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) s += x[i][j] * y[i][j];
  return s;
}

Mat4d outer(const Vec4d& x, const Vec4d& y) {
  Mat4d m{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) m[i][j] = x[i] * y[j];
  return m;
}

/// x + s y
Mat4d add_scaled(const Mat4d& x, double s, const Mat4d& y) {
  Mat4d m{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = 0; j < kDim; ++j) m[i][j] = x[i][j] + s * y[i][j];
  return m;
}

double max_antisym(const Mat4d& m) {
  double r = 0.0;
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = i + 1; j < kDim; ++j) r = std::max(r, std::abs(m[i][j] - m[j][i]));
  return r;
}

bool is_zero(double c, const NonmetricityCoefficients& coeffs) {
  return std::abs(c) <= 1e-12 * std::max(1.0, coeffs.max_abs());
}

std::string sci(double v) {
  std::ostringstream os;
  os.precision(3);
  os << std::scientific << v;
  return os.str();
}

/// Spread of per-sample constants: max deviation from the mean, relative to max(1, |mean|).
double spread_of(const std::vector<double>& xs, double& mean) {
  mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double dev = 0.0;
  for (double x : xs) dev = std::max(dev, std::abs(x - mean));
  return dev / std::max(1.0, std::abs(mean));
}

/// Shared per-sample scalar fit R = c P for both (alpha,beta) cases.
struct ScalarSample {
  double constant = 0.0;
  double residual = 0.0;
};

ScalarSample fit_scalar(const Mat4d& R, const Mat4d& P, double prefactor, double extra_scale) {
  ScalarSample s;
  s.constant = frob_inner(R, P) / (prefactor * frob_inner(P, P));
  const Mat4d r = add_scaled(R, -prefactor * s.constant, P);
  const double scale = extra_scale + std::abs(prefactor * s.constant) * frobenius(P);
  s.residual = frobenius(r) / std::max(scale, 1e-300);
  return s;
}

/// nabla_mu u_nu for u = b/|b|, indexed [mu][nu].
Mat4d unit_oneform_derivative(const Mat4d& nb, const Vec4d& b, double n, const Vec4d& dn) {
  Mat4d m{};
  for (std::size_t mu = 0; mu < kDim; ++mu)
    for (std::size_t nu = 0; nu < kDim; ++nu) m[mu][nu] = nb[mu][nu] / n - b[nu] * dn[mu] / (n * n);
  return m;
}

/// Runs the per-sample fit and the constancy test; `mean` receives the mean constant.
template <class FitFn>
ConstraintFit run_alpha_beta_fit(Branch branch, const VectorialConnection& conn, const std::vector<Point>& points,
                                 const FitOptions& options, FitFn&& per_sample, double& mean) {
  ConstraintFit fit;
  fit.branch = branch;
  std::vector<double> constants;
  double sum_res = 0.0;
  for (const Point& x : points) {
    if (!conn.in_domain(x)) {
      ++fit.samples_rejected;
      continue;
    }
    const Vec4d b = conn.oneform().at(x);
    if (max_abs(b) < 1e-12) {
      ++fit.samples_rejected;
      continue;
    }
    const Mat4d nb = levi_civita_covariant_derivative_oneform(conn.metric(), conn.oneform(), x);
    const ScalarSample s = per_sample(x, b, nb);
    constants.push_back(s.constant);
    fit.max_residual = std::max(fit.max_residual, s.residual);
    sum_res += s.residual;
    fit.max_antisymmetric = std::max(fit.max_antisymmetric, max_antisym(nb));
    ++fit.samples_used;
  }
  if (constants.empty()) throw Error(ErrorCode::InsufficientData, "every sample point was rejected (b = 0 or outside the domain)");
  fit.mean_residual = sum_res / static_cast<double>(fit.samples_used);
  fit.spread = spread_of(constants, mean);
  if (!(fit.max_residual < options.residual_tol)) {
    fit.reason = "constraint residual " + sci(fit.max_residual) + " exceeds " + sci(options.residual_tol);
  } else if (!(fit.spread < options.constancy_tol)) {
    fit.reason = "fitted constant varies across samples (spread " + sci(fit.spread) + ")";
  }
  return fit;
}

}  // namespace

const char* to_string(FitVerdict v) { return v == FitVerdict::Satisfied ? "Satisfied" : "Violated"; }

const char* to_string(Branch b) {
  switch (b) {
    case Branch::AlphaBetaCase1: return "alpha-beta/case-1";
    case Branch::AlphaBetaCase2: return "alpha-beta/case-2";
    case Branch::Generalized: return "generalized";
  }
  return "generalized";
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::AlphaBetaMetrizable: return "AlphaBetaMetrizable";
    case Verdict::GeneralizedMetrizable: return "GeneralizedMetrizable";
    case Verdict::NotMetrizableByTheseFamilies: return "NotMetrizableByTheseFamilies";
  }
  return "NotMetrizableByTheseFamilies";
}

// ---------------------------------------------------------------------------

ConstraintFit fit_theorem1_case1(const VectorialConnection& conn, const std::vector<Point>& points,
                                 const FitOptions& options) {
  const NonmetricityCoefficients& c = conn.coeffs();
  if (!is_zero(c.c2, c) || !is_zero(c.c3, c)) {
    ConstraintFit fit;
    fit.branch = Branch::AlphaBetaCase1;
    fit.reason = !is_zero(c.c2, c) ? "c2 != 0" : "c3 != 0";
    return fit;
  }
  const double h = 0.5 * c.c1;
  // R = nabla b + (c1/2) <b,b> a  must equal  (c1/2) k b (x) b,  k = 1/lambda + 1.
  auto per_sample = [&](const Point& x, const Vec4d& b, const Mat4d& nb) {
    const Mat4d a = conn.metric().at(x);
    const double bb = dot(b, raise_index(conn.metric(), x, b));
    const Mat4d R = add_scaled(nb, h * bb, a);
    const Mat4d P = outer(b, b);
    return fit_scalar(R, P, h, frobenius(nb) + std::abs(h * bb) * frobenius(a));
  };
  double k = 0.0;
  ConstraintFit fit = run_alpha_beta_fit(Branch::AlphaBetaCase1, conn, points, options, per_sample, k);
  if (fit.reason.empty()) {
    if (std::abs(k - 1.0) <= options.constancy_tol) {
      fit.reason = "1/lambda = 0: no finite lambda";
    } else {
      fit.lambda = 1.0 / (k - 1.0);
      fit.verdict = FitVerdict::Satisfied;
    }
  }
  return fit;
}

ConstraintFit fit_theorem1_case2(const VectorialConnection& conn, const std::vector<Point>& points,
                                 const FitOptions& options) {
  const NonmetricityCoefficients& c = conn.coeffs();
  if (!is_zero(c.c2, c) || is_zero(c.c3, c)) {
    ConstraintFit fit;
    fit.branch = Branch::AlphaBetaCase2;
    fit.reason = !is_zero(c.c2, c) ? "c2 != 0" : "c3 = 0";
    return fit;
  }
  const double h1 = 0.5 * c.c1;
  const double h3 = 0.5 * c.c3;
  // R = nabla b + (c1/2)<b,b> a - (c3/2)(c1/c3 + <b,b>) b b  must equal  (c3/2) tau b b.
  auto per_sample = [&](const Point& x, const Vec4d& b, const Mat4d& nb) {
    const Mat4d a = conn.metric().at(x);
    const double bb = dot(b, raise_index(conn.metric(), x, b));
    const Mat4d P = outer(b, b);
    const double shift = h3 * (c.c1 / c.c3 + bb);
    const Mat4d R = add_scaled(add_scaled(nb, h1 * bb, a), -shift, P);
    return fit_scalar(R, P, h3, frobenius(nb) + std::abs(h1 * bb) * frobenius(a) + std::abs(shift) * frobenius(P));
  };
  double tau = 0.0;
  ConstraintFit fit = run_alpha_beta_fit(Branch::AlphaBetaCase2, conn, points, options, per_sample, tau);
  fit.tau = tau;
  if (fit.reason.empty()) {
    if (std::abs(fit.tau) <= options.constancy_tol) fit.tau = 0.0;
    if (is_zero(c.c1, c) && fit.tau == 0.0) {
      fit.reason = "no Theorem 1 subcase applies (c1 = 0 and tau = 0)";
    } else {
      fit.verdict = FitVerdict::Satisfied;
    }
  }
  return fit;
}

std::shared_ptr<const AlphaBetaMetric> construct_theorem1(const VectorialConnection& conn, const ConstraintFit& fit,
                                                          double kappa, AdmissibilityMargins margins) {
  if (fit.verdict != FitVerdict::Satisfied || fit.branch == Branch::Generalized)
    throw Error(ErrorCode::InvalidArgument, "construction needs a Satisfied (alpha,beta) fit");
  const NonmetricityCoefficients& c = conn.coeffs();
  AlphaBetaParams p;
  p.kappa = kappa;
  p.c1 = c.c1;
  p.c3 = c.c3;
  if (fit.branch == Branch::AlphaBetaCase1) {
    p.kind = AlphaBetaCase::PowerLaw;
    p.lambda = fit.lambda;
  } else {
    p.tau = fit.tau;
    const bool c1_zero = is_zero(c.c1, c);
    if (!c1_zero && fit.tau != 0.0) {
      p.kind = AlphaBetaCase::MKropina;
    } else if (c1_zero && fit.tau != 0.0) {
      p.kind = AlphaBetaCase::Riemannian;
    } else if (!c1_zero) {
      p.kind = AlphaBetaCase::Exponential;
    } else {
      throw Error(ErrorCode::NoSubcase, "no Theorem 1 subcase applies (c1 = 0 and tau = 0)");
    }
  }
  return std::make_shared<AlphaBetaMetric>(conn.metric_ptr(), conn.oneform_ptr(), p, margins);
}

PdeResidual alpha_beta_pde_residual(const AlphaBetaMetric& L, const VectorialConnection& conn, const Point& x,
                                    const TangentVector& v) {
  const Mat4d a = conn.metric().at(x);
  const Vec4d b = conn.oneform().at(x);
  const double A = quad_form(a, v.components, v.components);
  const double B = dot(b, v.components);
  const J1 ph = L.phi(make_variable<J1>(B * B / A, 0));
  const double Phi = ph.v;
  const double dPhi = ph.d[0];
  const Mat4d nb = levi_civita_covariant_derivative_oneform(conn.metric(), conn.oneform(), x);
  const ContractedDistortion cd = conn.contracted_distortion(x, v);

  PdeResidual out;
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    double dB = 0.0;
    for (std::size_t r = 0; r < kDim; ++r) dB += nb[mu][r] * v[r];
    const double t1 = A * dB;
    const double t2 = A * cd.with_oneform[mu];
    const double t3 = B * cd.with_velocity[mu];
    const double t4 = Phi * A * cd.with_velocity[mu];
    out.residual[mu] = dPhi * B * (t1 - t2 + t3) - t4;
    out.scale = std::max(out.scale, std::abs(dPhi * B) * (std::abs(t1) + std::abs(t2) + std::abs(t3)) + std::abs(t4));
  }
  return out;
}

// ---------------------------------------------------------------------------

ConstraintFit fit_theorem2(const VectorialConnection& conn, const std::vector<Point>& points,
                           const FitOptions& options) {
  const NonmetricityCoefficients& c = conn.coeffs();
  ConstraintFit fit;
  fit.branch = Branch::Generalized;
  if (!is_zero(c.c3, c) && !(is_zero(c.c1, c) && is_zero(c.c2, c))) {
    fit.reason = "condition 1 of Theorem 2 fails: need c3 = 0, or c1 = c2 = 0";
    return fit;
  }

  std::vector<double> ns;
  std::vector<double> lambdas;
  std::vector<double> taus;
  std::vector<double> per_sample_res;
  int sign = 0;
  bool sign_flip = false;
  for (const Point& x : points) {
    if (!conn.in_domain(x)) {
      ++fit.samples_rejected;
      continue;
    }
    const Vec4d b = conn.oneform().at(x);
    const Vec4d bu = raise_index(conn.metric(), x, b);
    const double bb = dot(b, bu);
    if (std::abs(bb) < options.null_tol) {
      std::ostringstream os;
      os << "<b,b> = " << bb << " at x = (" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3]
         << "): null one-forms are outside the scope of the generalized family";
      throw Error(ErrorCode::NullOneForm, os.str());
    }
    const int s = bb > 0.0 ? 1 : -1;
    if (sign != 0 && s != sign) sign_flip = true;
    sign = s;
    const double eps = s;

    const Scalar2Jet nj = oneform_norm_jet(conn.metric(), conn.oneform(), x);
    const double n = nj.value;
    Vec4d u{};
    Vec4d uu{};
    for (std::size_t i = 0; i < kDim; ++i) {
      u[i] = b[i] / n;
      uu[i] = bu[i] / n;
    }
    const double lam = eps * dot(uu, nj.first);
    Vec4d gres{};
    for (std::size_t i = 0; i < kDim; ++i) gres[i] = nj.first[i] - lam * u[i];
    const double gscale = norm(nj.first) + std::abs(lam) * norm(u);
    const double grad_res = norm(gres) / std::max(gscale, 1e-300);

    const Mat4d nb = levi_civita_covariant_derivative_oneform(conn.metric(), conn.oneform(), x);
    const Mat4d nu = unit_oneform_derivative(nb, b, n, nj.first);
    const Mat4d P = add_scaled(conn.metric().at(x), -eps, outer(u, u));
    const double tau = frob_inner(nu, P) / frob_inner(P, P);
    // The two terms of nabla u cancel when u is parallel, so they set the scale.
    const double tscale =
        frobenius(nu) + std::abs(tau) * frobenius(P) + (frobenius(nb) + norm(b) * norm(nj.first) / n) / n;
    const double torse_res = frobenius(add_scaled(nu, -tau, P)) / std::max(tscale, 1e-300);

    fit.gradient_residual = std::max(fit.gradient_residual, grad_res);
    fit.torse_residual = std::max(fit.torse_residual, torse_res);
    ns.push_back(n);
    lambdas.push_back(lam);
    taus.push_back(tau);
    per_sample_res.push_back(std::max(grad_res, torse_res));
    ++fit.samples_used;
  }
  if (ns.empty()) throw Error(ErrorCode::InsufficientData, "every sample point was rejected (outside the domain)");
  fit.epsilon = sign;
  const auto [lo, hi] = std::minmax_element(ns.begin(), ns.end());
  fit.bnorm_min = *lo;
  fit.bnorm_max = *hi;
  fit.integral_anchor = std::isnan(options.integral_anchor) ? fit.bnorm_min : options.integral_anchor;

  fit.lambda_profile = ChebyshevSeries::fit(ns, lambdas);
  fit.tau_profile = ChebyshevSeries::fit(ns, taus);
  fit.spread = std::max(fit.lambda_profile->fit_error(), fit.tau_profile->fit_error());

  double lam_max = 0.0;
  fit.lambda_min_abs = std::numeric_limits<double>::infinity();
  for (double l : lambdas) {
    lam_max = std::max(lam_max, std::abs(l));
    fit.lambda_min_abs = std::min(fit.lambda_min_abs, std::abs(l));
  }
  const bool lambda_nonzero = fit.lambda_min_abs > 1e-9 * std::max(1.0, lam_max);

  // tau (c1 C1 e^{k rho} - 2 eps) = c1 |b|, k = c1 + 2 c2, linear in C1.
  const double eps = fit.epsilon;
  const double k = c.c1 + 2.0 * c.c2;
  const bool c1_free = !is_zero(c.c1, c) && (is_zero(c.c2, c) || is_zero(c.c1 - 2.0 * c.c2, c)) && lambda_nonzero;
  std::vector<double> alpha(ns.size(), 0.0);
  if (c1_free) {
    const ProfileIntegral rho(*fit.lambda_profile, 1, 1.0, fit.integral_anchor, "rho");
    for (std::size_t i = 0; i < ns.size(); ++i) alpha[i] = taus[i] * c.c1 * std::exp(k * rho.eval(ns[i]));
  }
  std::vector<double> beta(ns.size());
  std::vector<double> base_scale(ns.size());
  for (std::size_t i = 0; i < ns.size(); ++i) {
    beta[i] = 2.0 * eps * taus[i] + c.c1 * ns[i];
    base_scale[i] = std::abs(c.c1) * ns[i] + 2.0 * std::abs(taus[i]) + ns[i] * c.max_abs();
  }
  if (c1_free) {
    double num = 0.0;
    double den = 0.0;
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const double w = 1.0 / (base_scale[i] * base_scale[i]);
      num += w * alpha[i] * beta[i];
      den += w * alpha[i] * alpha[i];
    }
    fit.C1 = den > 1e-300 ? num / den : 0.0;
  }
  double sum_res = 0.0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double r = fit.C1 * alpha[i] - beta[i];
    const double rel = std::abs(r) / std::max(base_scale[i] + std::abs(fit.C1 * alpha[i]), 1e-300);
    fit.tau_formula_residual = std::max(fit.tau_formula_residual, rel);
    sum_res += std::max(per_sample_res[i], rel);
  }
  fit.max_residual = std::max({fit.gradient_residual, fit.torse_residual, fit.tau_formula_residual});
  fit.mean_residual = sum_res / static_cast<double>(ns.size());

  if (sign_flip) {
    fit.reason = "<b,b> changes sign across samples";
  } else if (!(fit.gradient_residual < options.residual_tol)) {
    fit.reason = "d|b| is not proportional to u (residual " + sci(fit.gradient_residual) + ")";
  } else if (!(fit.lambda_profile->fit_error() < options.profile_tol)) {
    fit.reason = "lambda is not a function of |b| alone (spread " + sci(fit.lambda_profile->fit_error()) + ")";
  } else if (!lambda_nonzero) {
    fit.reason = "lambda(|b|) vanishes at sampled points";
  } else if (!(fit.torse_residual < options.residual_tol)) {
    fit.reason = "nabla u is not of the form tau (a - eps u u) (residual " + sci(fit.torse_residual) + ")";
  } else if (!(fit.tau_profile->fit_error() < options.profile_tol)) {
    fit.reason = "tau is not a function of |b| alone (spread " + sci(fit.tau_profile->fit_error()) + ")";
  } else if (!(fit.tau_formula_residual < options.tau_formula_tol)) {
    fit.reason = "tau(|b|) does not match its closed form (residual " + sci(fit.tau_formula_residual) + ")";
  } else {
    fit.verdict = FitVerdict::Satisfied;
  }
  return fit;
}

std::shared_ptr<const ProfileIntegral> rho_profile(const ConstraintFit& fit) {
  if (!fit.lambda_profile) throw Error(ErrorCode::InvalidArgument, "fit carries no lambda profile");
  return std::make_shared<ProfileIntegral>(*fit.lambda_profile, 1, 1.0, fit.integral_anchor,
                                           "rho(|b|) = int |b|/lambda d|b|");
}

std::shared_ptr<const GeneralizedAlphaBetaMetric> construct_theorem2(
    const VectorialConnection& conn, const ConstraintFit& fit, const Theorem2Constants& constants,
    std::shared_ptr<const ScalarFunction> F, double kappa, AdmissibilityMargins margins,
    const std::vector<Point>& check_points, Sampler& sampler) {
  if (fit.verdict != FitVerdict::Satisfied || fit.branch != Branch::Generalized)
    throw Error(ErrorCode::InvalidArgument, "construction needs a Satisfied generalized fit");
  const NonmetricityCoefficients& c = conn.coeffs();
  const bool z1 = is_zero(c.c1, c);
  const bool z2 = is_zero(c.c2, c);
  const bool z3 = is_zero(c.c3, c);

  GeneralizedParams p;
  p.kappa = kappa;
  p.epsilon = fit.epsilon;
  p.c1 = c.c1;
  p.c2 = c.c2;
  p.c3 = c.c3;
  p.C1 = constants.C1.value_or(fit.C1);
  p.C2 = constants.C2;
  p.C3 = constants.C3;
  p.C4 = constants.C4;
  std::shared_ptr<const ScalarFunction> g;
  if (!z3 && z1 && z2) {
    p.kind = GeneralizedCase::I;
    if (!F) throw Error(ErrorCode::MissingFunction, "case (i) requires the free function F");
    g = std::make_shared<ProfileIntegral>(*fit.lambda_profile, 3, c.c3 * fit.epsilon, fit.integral_anchor,
                                          "g(|b|) = c3 eps int |b|^3/lambda d|b|");
  } else if (z3 && z2 && !z1) {
    p.kind = GeneralizedCase::IIa;
  } else if (z3 && !z2 && !is_zero(c.c1 - 2.0 * c.c2, c) && !z1) {
    p.kind = GeneralizedCase::IIb;
    p.C1 = 0.0;
  } else if (z3 && !z2 && is_zero(c.c1 - 2.0 * c.c2, c)) {
    p.kind = GeneralizedCase::IIc;
  } else {
    throw Error(ErrorCode::NoSubcase, "no Theorem 2 case covers these coefficients");
  }

  auto L = std::make_shared<GeneralizedAlphaBetaMetric>(conn.metric_ptr(), conn.oneform_ptr(), p, rho_profile(fit),
                                                        g, std::move(F), margins);

  std::size_t scanned = 0;
  std::size_t degenerate = 0;
  for (const Point& x : check_points) {
    if (!conn.in_domain(x)) continue;
    for (int attempt = 0; attempt < 50; ++attempt) {
      const TangentVector v = sampler.direction();
      if (!L->admissible(x, v)) continue;
      const Mat4d gm = finsler_metric_tensor(*L, x, v);
      ++scanned;
      if (hessian_degenerate(gm, determinant(gm))) ++degenerate;
      break;
    }
  }
  if (scanned == 0) throw Error(ErrorCode::DegenerateResult, "no admissible direction found at the check points");
  if (2 * degenerate > scanned) {
    std::ostringstream os;
    os << "constructed Lagrangian is degenerate at " << degenerate << " of " << scanned << " check samples";
    throw Error(ErrorCode::DegenerateResult, os.str());
  }
  return L;
}

PdeResidual generalized_pde_residual(const GeneralizedAlphaBetaMetric& L, const VectorialConnection& conn,
                                     const Point& x, const TangentVector& v) {
  const double eps = L.params().epsilon;
  const Mat4d a = conn.metric().at(x);
  const Vec4d b = conn.oneform().at(x);
  const Scalar2Jet nj = oneform_norm_jet(conn.metric(), conn.oneform(), x);
  const double n = nj.value;
  if (!(n > 0.0) || eps * oneform_norm_squared(conn.metric(), conn.oneform(), x) <= 0.0)
    throw Error(ErrorCode::NullOneForm, "residual needs <b,b> != 0 with the metric's sign");
  Vec4d u{};
  for (std::size_t i = 0; i < kDim; ++i) u[i] = b[i] / n;
  const double A = quad_form(a, v.components, v.components);
  const double U = dot(u, v.components);
  const J1 ph = L.phi(make_variable<J1>(n, 0), make_variable<J1>(U * U / A, 1));
  const double Phi = ph.v;
  const double Phi_b = ph.d[0];
  const double Phi_p = ph.d[1];

  const Mat4d nb = levi_civita_covariant_derivative_oneform(conn.metric(), conn.oneform(), x);
  const Mat4d nu = unit_oneform_derivative(nb, b, n, nj.first);
  const ContractedDistortion cd = conn.contracted_distortion(x, v);

  PdeResidual out;
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    double dU = 0.0;
    for (std::size_t r = 0; r < kDim; ++r) dU += nu[mu][r] * v[r];
    const double t0 = 0.5 * A * A * Phi_b * nj.first[mu];
    const double t1 = A * dU;
    const double t2 = A * cd.with_oneform[mu] / n;
    const double t3 = U * cd.with_velocity[mu];
    const double t4 = A * cd.with_velocity[mu] * Phi;
    out.residual[mu] = t0 + Phi_p * U * (t1 - t2 + t3) - t4;
    out.scale = std::max(out.scale, std::abs(t0) + std::abs(Phi_p * U) * (std::abs(t1) + std::abs(t2) + std::abs(t3)) +
                                        std::abs(t4));
  }
  return out;
}

std::array<double, 2> reduced_system_residual(const GeneralizedAlphaBetaMetric& L, const ConstraintFit& fit,
                                              double bnorm, double p) {
  if (!fit.lambda_profile || !fit.tau_profile)
    throw Error(ErrorCode::InvalidArgument, "reduced system needs a generalized fit with profiles");
  const GeneralizedParams& q = L.params();
  const double eps = q.epsilon;
  const double lam = fit.lambda_profile->eval(bnorm);
  const double tau = fit.tau_profile->eval(bnorm);
  const J1 ph = L.phi(make_variable<J1>(bnorm, 0), make_variable<J1>(p, 1));
  const double Psi_b = ph.d[0] / ph.v;
  const double Psi_p = ph.d[1] / ph.v;
  if (!(std::abs(Psi_p) > 1e-12)) throw Error(ErrorCode::DegenerateResult, "dPsi/dp vanishes: reduced residual undefined");
  const double n = bnorm;
  const double first = -eps * tau + (1.0 / (2.0 * Psi_p)) *
                                        ((lam / p) * Psi_b + n * (-q.c1 + n * n * q.c3 * (p - eps)) * Psi_p -
                                         n * (n * n * q.c3 + q.c1 / p));
  const double second = tau + (1.0 / (2.0 * Psi_p)) * n * (2.0 * p * q.c2 + eps * q.c1 - 2.0 * eps * q.c2);
  return {first, second};
}

// ---------------------------------------------------------------------------

MetrizabilityReport decide(const VectorialConnection& conn, const std::vector<Point>& fit_points,
                           const std::vector<Point>& check_points, Sampler& sampler, const DecideOptions& options) {
  MetrizabilityReport report;
  const NonmetricityCoefficients& c = conn.coeffs();
  report.tags = classify_subfamily(c);

  report.fits.push_back(is_zero(c.c3, c) ? fit_theorem1_case1(conn, fit_points, options.fit)
                                         : fit_theorem1_case2(conn, fit_points, options.fit));
  try {
    report.fits.push_back(fit_theorem2(conn, fit_points, options.fit));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NullOneForm) throw;
    ConstraintFit g;
    g.branch = Branch::Generalized;
    g.reason = e.what();
    report.fits.push_back(g);
  }
  report.notes.push_back("torse-forming condition read as nabla u = tau (a - eps u (x) u)");

  for (const ConstraintFit& fit : report.fits) {
    if (fit.verdict != FitVerdict::Satisfied) continue;
    try {
      if (fit.branch == Branch::Generalized) {
        report.lagrangian = construct_theorem2(conn, fit, options.constants, options.F, options.kappa,
                                               options.margins, check_points, sampler);
        report.verdict = Verdict::GeneralizedMetrizable;
      } else {
        report.lagrangian = construct_theorem1(conn, fit, options.kappa, options.margins);
        report.verdict = Verdict::AlphaBetaMetrizable;
      }
      report.branch = fit.branch;
      break;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoSubcase && e.code() != ErrorCode::MissingFunction &&
          e.code() != ErrorCode::DegenerateResult)
        throw;
      report.notes.push_back(std::string(to_string(fit.branch)) + ": construction failed: " + e.what());
    }
  }
  if (!report.lagrangian) return report;
  report.descriptor = report.lagrangian->describe();

  const FinslerLagrangian& L = *report.lagrangian;
  std::vector<Point> pts;
  for (const Point& x : check_points) {
    if (static_cast<int>(pts.size()) >= options.berwald_points) break;
    if (conn.in_domain(x)) pts.push_back(x);
  }
  try {
    const QuadraticityResult q = berwald_quadraticity(L, pts, sampler, options.berwald_directions);
    report.berwald_residual = q.max_residual;
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      const Tensor3d gamma = conn.coefficients(q.points[i]);
      double diff = 0.0;
      for (std::size_t m = 0; m < kDim; ++m)
        for (std::size_t n = 0; n < kDim; ++n)
          for (std::size_t r = 0; r < kDim; ++r) diff = std::max(diff, std::abs(q.fitted[i][m][n][r] - gamma[m][n][r]));
      report.gamma_mismatch = std::max(report.gamma_mismatch, diff / std::max(1.0, max_abs(gamma)));
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    report.berwald_residual = std::numeric_limits<double>::infinity();
    report.notes.push_back(std::string("Berwald check skipped: ") + e.what());
  }

  std::vector<std::pair<Point, TangentVector>> samples;
  for (const Point& x : pts) {
    for (int attempt = 0; attempt < 50; ++attempt) {
      const TangentVector v = sampler.direction();
      if (L.admissible(x, v)) {
        samples.emplace_back(x, v);
        break;
      }
    }
  }
  const NondegeneracyResult nd = nondegeneracy_scan(L, samples);
  report.check_samples = samples.size();
  report.degenerate_samples = nd.degenerate_count;
  report.euler_lagrange_residual = euler_lagrange_residual(L, conn, samples);
  if (!(report.euler_lagrange_residual < 1e-6))
    report.notes.push_back("the constructed Lagrangian does not reproduce the connection: Euler-Lagrange residual " +
                           sci(report.euler_lagrange_residual));
  if (nd.degenerate_count > 0) {
    std::ostringstream os;
    os << "Finsler metric tensor singular at " << nd.degenerate_count << " of " << samples.size()
       << " check samples (min |det g| = " << sci(nd.min_abs_det) << "); the spray is undefined there";
    report.notes.push_back(os.str());
  }
  try {
    report.spray_vs_connection = spray_vs_connection(L, conn, samples);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::DegenerateHessian) throw;
    report.spray_vs_connection = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace finsmet
