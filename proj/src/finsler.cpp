#include "finsmet/finsler.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace finsmet {

namespace {

bool is_integer(double r) { return r == std::round(r); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double chart_norm(const Vec4d& v) { return norm(v); }

bool cone_ok(double A, double nv, const AdmissibilityMargins& m) {
  if (!(std::abs(A) > m.delta_A * nv * nv)) return false;
  if (m.cone == Cone::Positive && A <= 0.0) return false;
  if (m.cone == Cone::Negative && A >= 0.0) return false;
  return true;
}

Mat4d symmetric_part(const Mat4d& m) {
  Mat4d s{};
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = i; j < kDim; ++j) {
      const double v = 0.5 * (m[i][j] + m[j][i]);
      s[i][j] = v;
      s[j][i] = v;
    }
  return s;
}

void require_admissible(const FinslerLagrangian& L, const Point& x, const TangentVector& v) {
  if (!L.admissible(x, v)) {
    std::ostringstream os;
    os << "direction (" << v[0] << ", " << v[1] << ", " << v[2] << ", " << v[3]
       << ") is not admissible at x = (" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3] << ")";
    throw Error(ErrorCode::Inadmissible, os.str());
  }
}

Mat4d vertical_hessian_half(const LagrangianJet& j) {
  Mat4d g{};
  for (std::size_t a = 0; a < kDim; ++a)
    for (std::size_t b = 0; b < kDim; ++b) g[a][b] = 0.5 * j.hess[kDim + a][kDim + b];
  return symmetric_part(g);
}

Mat4d checked_inverse(const Mat4d& g) {
  const double det = determinant(g);
  if (hessian_degenerate(g, det)) {
    std::ostringstream os;
    os << "Finsler metric tensor is degenerate: |det g| = " << std::abs(det);
    throw Error(ErrorCode::DegenerateHessian, os.str());
  }
  return inverse(g);
}

}  // namespace

const char* to_string(Cone cone) {
  switch (cone) {
    case Cone::Any: return "any";
    case Cone::Positive: return "A>0";
    case Cone::Negative: return "A<0";
  }
  return "any";
}

const char* to_string(AlphaBetaCase c) {
  switch (c) {
    case AlphaBetaCase::PowerLaw: return "power-law";
    case AlphaBetaCase::MKropina: return "m-kropina";
    case AlphaBetaCase::Riemannian: return "riemannian";
    case AlphaBetaCase::Exponential: return "exponential";
  }
  return "power-law";
}

const char* to_string(GeneralizedCase c) {
  switch (c) {
    case GeneralizedCase::I: return "i";
    case GeneralizedCase::IIa: return "ii-a";
    case GeneralizedCase::IIb: return "ii-b";
    case GeneralizedCase::IIc: return "ii-c";
  }
  return "ii-b";
}

// ---------------------------------------------------------------------------

std::shared_ptr<const FinslerLagrangian> make_riemannian(std::shared_ptr<const MetricField> a) {
  auto f = [a](const auto& x, const auto& v) { return quad_form(a->eval(x), v, v); };
  auto adm = [a](const Point& x, const TangentVector&) { return a->in_domain(x); };
  auto L = make_lagrangian(f, adm, "L = A");
  return L;
}

// ---------------------------------------------------------------------------

AlphaBetaMetric::AlphaBetaMetric(std::shared_ptr<const MetricField> a, std::shared_ptr<const OneFormField> b,
                                 AlphaBetaParams params, AdmissibilityMargins margins)
    : a_(std::move(a)), b_(std::move(b)), params_(params), margins_(margins) {
  if (!a_ || !b_) throw Error(ErrorCode::InvalidArgument, "(alpha,beta)-metric needs a metric and a one-form");
  if (params_.kappa == 0.0) throw Error(ErrorCode::InvalidArgument, "kappa must be nonzero");
  if (params_.kind == AlphaBetaCase::MKropina && (params_.tau == 0.0 || params_.c3 == 0.0))
    throw Error(ErrorCode::InvalidArgument, "m-Kropina case needs tau != 0 and c3 != 0");
  if (params_.kind == AlphaBetaCase::Exponential && params_.c3 == 0.0)
    throw Error(ErrorCode::InvalidArgument, "exponential case needs c3 != 0");
}

template <class S>
S AlphaBetaMetric::phi(const S& s) const {
  const AlphaBetaParams& q = params_;
  switch (q.kind) {
    case AlphaBetaCase::PowerLaw: return rpow(s, q.lambda);
    case AlphaBetaCase::MKropina: {
      const double e = q.c1 / (q.c3 * q.tau);
      return rpow(s, e) * rpow(s + q.tau, 1.0 - e);
    }
    case AlphaBetaCase::Riemannian: return s + q.tau;
    case AlphaBetaCase::Exponential: return s * exp(-(q.c1 / q.c3) / s);
  }
  return s;
}

template <class S>
S AlphaBetaMetric::evaluate(const Vec4<S>& x, const Vec4<S>& v) const {
  const Mat4<S> a = a_->eval(x);
  const Vec4<S> b = b_->eval(x);
  const S A = quad_form(a, v, v);
  const S B = dot(b, v);
  return params_.kappa * A * phi(B * B / A);
}

bool AlphaBetaMetric::needs_nonzero_B() const {
  switch (params_.kind) {
    case AlphaBetaCase::PowerLaw: return !(is_integer(params_.lambda) && params_.lambda >= 0.0);
    case AlphaBetaCase::Riemannian: return false;
    default: return true;
  }
}

bool AlphaBetaMetric::needs_positive_s() const {
  switch (params_.kind) {
    case AlphaBetaCase::PowerLaw: return !is_integer(params_.lambda);
    case AlphaBetaCase::MKropina: return !is_integer(params_.c1 / (params_.c3 * params_.tau));
    default: return false;
  }
}

bool AlphaBetaMetric::admissible(const Point& x, const TangentVector& v) const {
  if (!a_->in_domain(x) || !b_->in_domain(x)) return false;
  const double nv = chart_norm(v.components);
  if (nv == 0.0) return false;
  const Mat4d a = a_->at(x);
  const Vec4d b = b_->at(x);
  const double A = quad_form(a, v.components, v.components);
  const double B = dot(b, v.components);
  if (!cone_ok(A, nv, margins_)) return false;
  if (needs_nonzero_B() && !(std::abs(B) > margins_.delta_B * nv * chart_norm(b))) return false;
  const double s = B * B / A;
  if (needs_positive_s() && !(s > 0.0)) return false;
  if (params_.kind == AlphaBetaCase::MKropina) {
    const double e = params_.c1 / (params_.c3 * params_.tau);
    if (!is_integer(1.0 - e) && !(s + params_.tau > 0.0)) return false;
  }
  return std::isfinite(value(x.coords, v.components));
}

LagrangianDescriptor AlphaBetaMetric::describe() const {
  const AlphaBetaParams& q = params_;
  LagrangianDescriptor d;
  d.family = "alpha-beta";
  d.case_tag = to_string(q.kind);
  const std::string k = fmt(q.kappa);
  switch (q.kind) {
    case AlphaBetaCase::PowerLaw:
      d.constants = {{"kappa", q.kappa}, {"lambda", q.lambda}};
      d.formula = "L = " + k + " A s^(" + fmt(q.lambda) + "), s = B^2/A";
      break;
    case AlphaBetaCase::MKropina: {
      const double e = q.c1 / (q.c3 * q.tau);
      d.constants = {{"kappa", q.kappa}, {"c1", q.c1}, {"c3", q.c3}, {"tau", q.tau}};
      d.formula = "L = " + k + " A s^(" + fmt(e) + ") (s + " + fmt(q.tau) + ")^(" + fmt(1.0 - e) + "), s = B^2/A";
      break;
    }
    case AlphaBetaCase::Riemannian:
      d.constants = {{"kappa", q.kappa}, {"tau", q.tau}};
      d.formula = "L = " + k + " (" + fmt(q.tau) + " A + B^2)";
      break;
    case AlphaBetaCase::Exponential:
      d.constants = {{"kappa", q.kappa}, {"c1", q.c1}, {"c3", q.c3}};
      d.formula = "L = " + k + " B^2 exp(-" + fmt(q.c1 / q.c3) + "/s), s = B^2/A";
      break;
  }
  return d;
}

template double AlphaBetaMetric::phi<double>(const double&) const;
template J1 AlphaBetaMetric::phi<J1>(const J1&) const;
template J2 AlphaBetaMetric::phi<J2>(const J2&) const;
template J3 AlphaBetaMetric::phi<J3>(const J3&) const;
template double AlphaBetaMetric::evaluate<double>(const Vec4<double>&, const Vec4<double>&) const;
template J1 AlphaBetaMetric::evaluate<J1>(const Vec4<J1>&, const Vec4<J1>&) const;
template J2 AlphaBetaMetric::evaluate<J2>(const Vec4<J2>&, const Vec4<J2>&) const;
template J3 AlphaBetaMetric::evaluate<J3>(const Vec4<J3>&, const Vec4<J3>&) const;

// ---------------------------------------------------------------------------

GeneralizedAlphaBetaMetric::GeneralizedAlphaBetaMetric(std::shared_ptr<const MetricField> a,
                                                       std::shared_ptr<const OneFormField> b, GeneralizedParams params,
                                                       std::shared_ptr<const ScalarFunction> rho,
                                                       std::shared_ptr<const ScalarFunction> g,
                                                       std::shared_ptr<const ScalarFunction> F,
                                                       AdmissibilityMargins margins)
    : a_(std::move(a)),
      b_(std::move(b)),
      params_(params),
      rho_(std::move(rho)),
      g_(std::move(g)),
      F_(std::move(F)),
      margins_(margins) {
  if (!a_ || !b_) throw Error(ErrorCode::InvalidArgument, "generalized metric needs a metric and a one-form");
  if (params_.kappa == 0.0) throw Error(ErrorCode::InvalidArgument, "kappa must be nonzero");
  if (params_.epsilon != 1.0 && params_.epsilon != -1.0)
    throw Error(ErrorCode::InvalidArgument, "epsilon must be +1 or -1");
  if (params_.kind == GeneralizedCase::I) {
    if (!F_) throw Error(ErrorCode::MissingFunction, "case (i) requires the free function F");
    if (!g_) throw Error(ErrorCode::InvalidArgument, "case (i) requires the exponent profile g(|b|)");
  } else if (!rho_) {
    throw Error(ErrorCode::InvalidArgument, "case (ii) requires the profile rho(|b|)");
  }
  if ((params_.kind == GeneralizedCase::IIa || params_.kind == GeneralizedCase::IIb) && params_.c1 == 0.0)
    throw Error(ErrorCode::InvalidArgument, "cases (ii)a and (ii)b need c1 != 0");
}

template <class S>
S GeneralizedAlphaBetaMetric::phi(const S& bnorm, const S& p) const {
  const GeneralizedParams& q = params_;
  const double eps = q.epsilon;
  switch (q.kind) {
    case GeneralizedCase::I: {
      const S G = g_->eval(bnorm);
      const S z = exp(-G) * (eps - p) / (p * eps);
      return (p / eps) * exp(G) * F_->eval(z);
    }
    case GeneralizedCase::IIa: {
      const S rho = rho_->eval(bnorm);
      const S e = exp(q.c1 * rho);
      const S pref = eps / q.c1 - (0.5 * q.C1) * e;
      const S inner = q.c1 * eps * p + (q.C2 - 2.0 * q.c1 * rho) / (q.C1 * e - 2.0 * eps / q.c1);
      return exp(pref * inner);
    }
    case GeneralizedCase::IIb: {
      const S rho = rho_->eval(bnorm);
      return exp((eps / q.c1) * (q.c2 * p * p + eps * (q.c1 - 2.0 * q.c2) * p + q.C3 + eps * q.c1 * q.c1 * rho));
    }
    case GeneralizedCase::IIc: {
      const S rho = rho_->eval(bnorm);
      const S coef = 0.5 * eps - (0.5 * q.C1 * q.c2) * exp(4.0 * q.c2 * rho);
      return exp(coef * p * p + (2.0 * q.c2 * rho - 0.5 * q.C4));
    }
  }
  return p;
}

template <class S>
S GeneralizedAlphaBetaMetric::evaluate(const Vec4<S>& x, const Vec4<S>& v) const {
  const Mat4<S> a = a_->eval(x);
  const Vec4<S> b = b_->eval(x);
  const S A = quad_form(a, v, v);
  const S bb = quad_form(inverse(a), b, b);
  const S bnorm = sqrt(params_.epsilon * bb);
  const S U = dot(b, v) / bnorm;
  return params_.kappa * A * phi(bnorm, U * U / A);
}

bool GeneralizedAlphaBetaMetric::admissible(const Point& x, const TangentVector& v) const {
  if (!a_->in_domain(x) || !b_->in_domain(x)) return false;
  const double nv = chart_norm(v.components);
  if (nv == 0.0) return false;
  const Mat4d a = a_->at(x);
  if (std::abs(determinant(a)) < kSingularDetTolerance) return false;
  const Vec4d b = b_->at(x);
  const double bb = quad_form(inverse(a), b, b);
  if (!(params_.epsilon * bb > 0.0)) return false;
  const double A = quad_form(a, v.components, v.components);
  if (!cone_ok(A, nv, margins_)) return false;
  if (params_.kind == GeneralizedCase::I) {
    const double bnorm = std::sqrt(params_.epsilon * bb);
    const double U = dot(b, v.components) / bnorm;
    if (!(std::abs(U) > margins_.delta_B * nv * chart_norm(b) / bnorm)) return false;
  }
  return std::isfinite(value(x.coords, v.components));
}

LagrangianDescriptor GeneralizedAlphaBetaMetric::describe() const {
  const GeneralizedParams& q = params_;
  LagrangianDescriptor d;
  d.family = "generalized-alpha-beta";
  d.case_tag = to_string(q.kind);
  const std::string k = fmt(q.kappa);
  const std::string e = fmt(q.epsilon);
  switch (q.kind) {
    case GeneralizedCase::I:
      d.constants = {{"kappa", q.kappa}, {"epsilon", q.epsilon}, {"c3", q.c3}};
      d.formula = "L = " + k + " A (p/" + e + ") e^g F(e^(-g) (" + e + " - p)/(" + e +
                  " p)), g = " + fmt(q.c3 * q.epsilon) + " int |b|^3/lambda d|b|, F = " + F_->description() +
                  ", p = U^2/A";
      break;
    case GeneralizedCase::IIa:
      d.constants = {{"kappa", q.kappa}, {"epsilon", q.epsilon}, {"c1", q.c1}, {"C1", q.C1}, {"C2", q.C2}};
      d.formula = "L = " + k + " A exp((" + e + "/" + fmt(q.c1) + " - (" + fmt(q.C1) + "/2) e^(" + fmt(q.c1) +
                  " rho)) (" + fmt(q.c1 * q.epsilon) + " p + (" + fmt(q.C2) + " - " + fmt(2.0 * q.c1) + " rho)/(" +
                  fmt(q.C1) + " e^(" + fmt(q.c1) + " rho) - " + fmt(2.0 * q.epsilon / q.c1) +
                  "))), rho = int |b|/lambda d|b|, p = U^2/A";
      break;
    case GeneralizedCase::IIb:
      d.constants = {{"kappa", q.kappa}, {"epsilon", q.epsilon}, {"c1", q.c1}, {"c2", q.c2}, {"C3", q.C3}};
      d.formula = "L = " + k + " A exp((" + fmt(q.epsilon / q.c1) + ") (" + fmt(q.c2) + " p^2 + " +
                  fmt(q.epsilon * (q.c1 - 2.0 * q.c2)) + " p + " + fmt(q.C3) + " + " +
                  fmt(q.epsilon * q.c1 * q.c1) + " rho)), rho = int |b|/lambda d|b|, p = U^2/A";
      break;
    case GeneralizedCase::IIc:
      d.constants = {{"kappa", q.kappa}, {"epsilon", q.epsilon}, {"c2", q.c2}, {"C1", q.C1}, {"C4", q.C4}};
      d.formula = "L = " + k + " A exp((" + fmt(0.5 * q.epsilon) + " - " + fmt(0.5 * q.C1 * q.c2) + " e^(" +
                  fmt(4.0 * q.c2) + " rho)) p^2 + " + fmt(2.0 * q.c2) + " rho - " + fmt(0.5 * q.C4) +
                  "), rho = int |b|/lambda d|b|, p = U^2/A";
      break;
  }
  return d;
}

template double GeneralizedAlphaBetaMetric::phi<double>(const double&, const double&) const;
template J1 GeneralizedAlphaBetaMetric::phi<J1>(const J1&, const J1&) const;
template J2 GeneralizedAlphaBetaMetric::phi<J2>(const J2&, const J2&) const;
template J3 GeneralizedAlphaBetaMetric::phi<J3>(const J3&, const J3&) const;
template double GeneralizedAlphaBetaMetric::evaluate<double>(const Vec4<double>&, const Vec4<double>&) const;
template J1 GeneralizedAlphaBetaMetric::evaluate<J1>(const Vec4<J1>&, const Vec4<J1>&) const;
template J2 GeneralizedAlphaBetaMetric::evaluate<J2>(const Vec4<J2>&, const Vec4<J2>&) const;
template J3 GeneralizedAlphaBetaMetric::evaluate<J3>(const Vec4<J3>&, const Vec4<J3>&) const;

// ---------------------------------------------------------------------------

LagrangianJet lagrangian_jet(const FinslerLagrangian& L, const Point& x, const TangentVector& v) {
  require_admissible(L, x, v);
  const J2 y = L.value(seed_coordinates<J2>(x.coords), seed_velocities<J2>(v.components));
  LagrangianJet out;
  out.value = y.v.v;
  for (std::size_t i = 0; i < kJetVars; ++i) {
    out.grad[i] = y.v.d[i];
    for (std::size_t j = 0; j < kJetVars; ++j) out.hess[i][j] = y.d[i].d[j];
  }
  return out;
}

Mat4d finsler_metric_tensor(const FinslerLagrangian& L, const Point& x, const TangentVector& v) {
  return vertical_hessian_half(lagrangian_jet(L, x, v));
}

Vec4d spray_coefficients(const FinslerLagrangian& L, const Point& x, const TangentVector& v) {
  const LagrangianJet j = lagrangian_jet(L, x, v);
  const Mat4d ginv = checked_inverse(vertical_hessian_half(j));
  Vec4d w{};
  for (std::size_t n = 0; n < kDim; ++n) {
    double s = -j.grad[n];
    for (std::size_t r = 0; r < kDim; ++r) s += v[r] * j.hess[r][kDim + n];
    w[n] = 0.25 * s;
  }
  return mat_vec(ginv, w);
}

SprayResult spray(const FinslerLagrangian& L, const Point& x, const TangentVector& v) {
  require_admissible(L, x, v);
  const J3 y = L.value(seed_coordinates<J3>(x.coords), seed_velocities<J3>(v.components));
  auto grad = [&](std::size_t i) { return y.v.v.d[i]; };
  auto hess = [&](std::size_t i, std::size_t j) { return y.v.d[i].d[j]; };
  auto third = [&](std::size_t i, std::size_t j, std::size_t k) { return y.d[i].d[j].d[k]; };

  Mat4d g{};
  for (std::size_t a = 0; a < kDim; ++a)
    for (std::size_t b = 0; b < kDim; ++b) g[a][b] = 0.5 * hess(kDim + a, kDim + b);
  g = symmetric_part(g);
  const Mat4d ginv = checked_inverse(g);

  // w_nu = v^s d_s dL/dv^nu - d_nu L, so that g G = w / 4.
  Vec4d w{};
  for (std::size_t n = 0; n < kDim; ++n) {
    double s = -grad(n);
    for (std::size_t r = 0; r < kDim; ++r) s += v[r] * hess(r, kDim + n);
    w[n] = s;
  }
  SprayResult out;
  for (std::size_t m = 0; m < kDim; ++m) {
    double s = 0.0;
    for (std::size_t n = 0; n < kDim; ++n) s += ginv[m][n] * w[n];
    out.G[m] = 0.25 * s;
  }

  // Differentiate g G = w/4 along v^mu:  g dG = w_mu/4 - (dg) G.
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    Vec4d rhs{};
    for (std::size_t n = 0; n < kDim; ++n) {
      double dw = hess(mu, kDim + n) - hess(n, kDim + mu);
      for (std::size_t r = 0; r < kDim; ++r) dw += v[r] * third(r, kDim + n, kDim + mu);
      double dgG = 0.0;
      for (std::size_t b = 0; b < kDim; ++b) dgG += 0.5 * third(kDim + mu, kDim + n, kDim + b) * out.G[b];
      rhs[n] = 0.25 * dw - dgG;
    }
    const Vec4d col = mat_vec(ginv, rhs);
    for (std::size_t n = 0; n < kDim; ++n) out.N[n][mu] = col[n];
  }
  return out;
}

HorizontalDerivative horizontal_derivative(const FinslerLagrangian& L, const AffineConnection& conn, const Point& x,
                                           const TangentVector& v) {
  require_admissible(L, x, v);
  const J1 y = L.value(seed_coordinates<J1>(x.coords), seed_velocities<J1>(v.components));
  const Tensor3d gamma = conn.coefficients(x);
  HorizontalDerivative out;
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    double transport = 0.0;
    double size = std::abs(y.d[mu]);
    for (std::size_t nu = 0; nu < kDim; ++nu)
      for (std::size_t r = 0; r < kDim; ++r) {
        const double t = gamma[nu][mu][r] * v[r] * y.d[kDim + nu];
        transport += t;
        size += std::abs(t);
      }
    out.delta[mu] = y.d[mu] - transport;
    out.scale = std::max(out.scale, size);
  }
  return out;
}

QuadraticityResult berwald_quadraticity(const FinslerLagrangian& L, const std::vector<Point>& points,
                                        Sampler& sampler, int directions) {
  static constexpr std::array<std::pair<std::size_t, std::size_t>, 10> kPairs = {
      {{0, 0}, {0, 1}, {0, 2}, {0, 3}, {1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 3}}};
  QuadraticityResult out;
  for (const Point& x : points) {
    std::vector<TangentVector> vs;
    std::vector<Vec4d> sprays;
    for (int attempt = 0; attempt < 50 * directions && static_cast<int>(vs.size()) < directions; ++attempt) {
      const TangentVector v = sampler.direction();
      if (!L.admissible(x, v)) continue;
      try {
        Vec4d G = spray_coefficients(L, x, v);
        for (double& e : G) e *= 2.0;
        vs.push_back(v);
        sprays.push_back(G);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::DegenerateHessian) throw;
      }
    }
    if (vs.size() < 10) {
      std::ostringstream os;
      os << "only " << vs.size() << " usable directions at x = (" << x[0] << ", " << x[1] << ", " << x[2] << ", "
         << x[3] << "); at least 10 are needed";
      throw Error(ErrorCode::InsufficientData, os.str());
    }

    const Eigen::Index rows = static_cast<Eigen::Index>(vs.size());
    Eigen::MatrixXd M(rows, 10);
    Eigen::MatrixXd rhs(rows, 4);
    double gmax = 0.0;
    for (Eigen::Index k = 0; k < rows; ++k) {
      const TangentVector& v = vs[static_cast<std::size_t>(k)];
      for (std::size_t c = 0; c < kPairs.size(); ++c) {
        const auto [n, r] = kPairs[c];
        M(k, static_cast<Eigen::Index>(c)) = (n == r ? 1.0 : 2.0) * v[n] * v[r];
      }
      const Vec4d& G = sprays[static_cast<std::size_t>(k)];
      for (std::size_t m = 0; m < kDim; ++m) rhs(k, static_cast<Eigen::Index>(m)) = G[m];
      gmax = std::max(gmax, norm(G));
    }
    const Eigen::MatrixXd coef = M.colPivHouseholderQr().solve(rhs);
    const double resid = (M * coef - rhs).cwiseAbs().maxCoeff();
    out.max_residual = std::max(out.max_residual, resid / std::max(gmax, 1e-12));

    Tensor3d gamma{};
    for (std::size_t m = 0; m < kDim; ++m)
      for (std::size_t c = 0; c < kPairs.size(); ++c) {
        const auto [n, r] = kPairs[c];
        const double val = coef(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(m));
        gamma[m][n][r] = val;
        gamma[m][r][n] = val;
      }
    out.points.push_back(x);
    out.fitted.push_back(gamma);
  }
  return out;
}

NondegeneracyResult nondegeneracy_scan(const FinslerLagrangian& L,
                                       const std::vector<std::pair<Point, TangentVector>>& samples) {
  NondegeneracyResult out;
  out.min_abs_det = samples.empty() ? 0.0 : std::numeric_limits<double>::infinity();
  for (const auto& [x, v] : samples) {
    const Mat4d g = finsler_metric_tensor(L, x, v);
    Eigen::Matrix4d m;
    for (std::size_t i = 0; i < kDim; ++i)
      for (std::size_t j = 0; j < kDim; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = g[i][j];
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m, Eigen::EigenvaluesOnly);
    const Eigen::Vector4d ev = es.eigenvalues();
    const double det = std::abs(ev.prod());
    out.min_abs_det = std::min(out.min_abs_det, det);
    if (hessian_degenerate(g, det)) ++out.degenerate_count;
    const double tiny = 1e-12 * std::max(ev.cwiseAbs().maxCoeff(), 1e-300);
    std::string sig;
    for (Eigen::Index i = 0; i < 4; ++i) sig += ev(i) > tiny ? '+' : (ev(i) < -tiny ? '-' : '0');
    ++out.signatures[sig];
  }
  return out;
}

}  // namespace finsmet
