#pragma once

// Finsler Lagrangians L(x, v) and the derived objects: metric tensor, spray,
// nonlinear connection, horizontal derivative and Berwald diagnostics.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "finsmet/connection.hpp"
#include "finsmet/sampling.hpp"

namespace finsmet {

enum class Cone { Any, Positive, Negative };

const char* to_string(Cone cone);

/// Margins keeping admissible directions away from A = 0 and B = 0. Both are
/// relative to the chart norm of v, so the admissible set is a cone.
struct AdmissibilityMargins {
  double delta_A = 1e-6;
  double delta_B = 1e-6;
  Cone cone = Cone::Any;
};

/// Case tag and constants of a constructed Lagrangian, for reports.
struct LagrangianDescriptor {
  std::string family;
  std::string case_tag;
  std::vector<std::pair<std::string, double>> constants;
  std::string formula;
};

class FinslerLagrangian {
 public:
  virtual ~FinslerLagrangian() = default;
  virtual double value(const Vec4<double>& x, const Vec4<double>& v) const = 0;
  virtual J1 value(const Vec4<J1>& x, const Vec4<J1>& v) const = 0;
  virtual J2 value(const Vec4<J2>& x, const Vec4<J2>& v) const = 0;
  virtual J3 value(const Vec4<J3>& x, const Vec4<J3>& v) const = 0;
  virtual bool admissible(const Point& x, const TangentVector& v) const = 0;
  virtual LagrangianDescriptor describe() const = 0;

  double operator()(const Point& x, const TangentVector& v) const { return value(x.coords, v.components); }
};

namespace detail {

template <class Derived>
class LagrangianAdapter : public FinslerLagrangian {
 public:
  double value(const Vec4<double>& x, const Vec4<double>& v) const override { return self().evaluate(x, v); }
  J1 value(const Vec4<J1>& x, const Vec4<J1>& v) const override { return self().evaluate(x, v); }
  J2 value(const Vec4<J2>& x, const Vec4<J2>& v) const override { return self().evaluate(x, v); }
  J3 value(const Vec4<J3>& x, const Vec4<J3>& v) const override { return self().evaluate(x, v); }

 private:
  const Derived& self() const { return static_cast<const Derived&>(*this); }
};

template <class F>
class GenericLagrangian final : public LagrangianAdapter<GenericLagrangian<F>> {
 public:
  using Admissible = std::function<bool(const Point&, const TangentVector&)>;
  GenericLagrangian(F f, Admissible adm, LagrangianDescriptor desc)
      : f_(std::move(f)), adm_(std::move(adm)), desc_(std::move(desc)) {}
  template <class S>
  S evaluate(const Vec4<S>& x, const Vec4<S>& v) const {
    return f_(x, v);
  }
  bool admissible(const Point& x, const TangentVector& v) const override { return !adm_ || adm_(x, v); }
  LagrangianDescriptor describe() const override { return desc_; }

 private:
  F f_;
  Admissible adm_;
  LagrangianDescriptor desc_;
};

}  // namespace detail

/// Wrap a generic callable `f(const Vec4<S>& x, const Vec4<S>& v) -> S`.
template <class F>
std::shared_ptr<const FinslerLagrangian> make_lagrangian(
    F f, std::function<bool(const Point&, const TangentVector&)> admissible, std::string formula) {
  LagrangianDescriptor desc{"custom", "custom", {}, std::move(formula)};
  return std::make_shared<detail::GenericLagrangian<F>>(std::move(f), std::move(admissible), std::move(desc));
}

/// L = a_{mu nu}(x) v^mu v^nu
std::shared_ptr<const FinslerLagrangian> make_riemannian(std::shared_ptr<const MetricField> a);

// ---------------------------------------------------------------------------
// (alpha, beta)-metrics: L = kappa A Phi(s), s = B^2 / A.

enum class AlphaBetaCase { PowerLaw, MKropina, Riemannian, Exponential };

const char* to_string(AlphaBetaCase c);

struct AlphaBetaParams {
  AlphaBetaCase kind = AlphaBetaCase::PowerLaw;
  double kappa = 1.0;
  double lambda = 0.0;  ///< PowerLaw exponent
  double c1 = 0.0;
  double c3 = 0.0;
  double tau = 0.0;
};

class AlphaBetaMetric final : public detail::LagrangianAdapter<AlphaBetaMetric> {
 public:
  AlphaBetaMetric(std::shared_ptr<const MetricField> a, std::shared_ptr<const OneFormField> b, AlphaBetaParams params,
                  AdmissibilityMargins margins = {});

  template <class S>
  S evaluate(const Vec4<S>& x, const Vec4<S>& v) const;
  /// Phi(s) of the case formula.
  template <class S>
  S phi(const S& s) const;

  bool admissible(const Point& x, const TangentVector& v) const override;
  LagrangianDescriptor describe() const override;
  const AlphaBetaParams& params() const { return params_; }

 private:
  bool needs_nonzero_B() const;
  bool needs_positive_s() const;

  std::shared_ptr<const MetricField> a_;
  std::shared_ptr<const OneFormField> b_;
  AlphaBetaParams params_;
  AdmissibilityMargins margins_;
};

// ---------------------------------------------------------------------------
// Generalized (alpha, beta)-metrics: L = kappa A Phi(|b|, p), p = U^2 / A,
// |b| = sqrt(|<b,b>|), u = b/|b|, U = u(v).

enum class GeneralizedCase { I, IIa, IIb, IIc };

const char* to_string(GeneralizedCase c);

struct GeneralizedParams {
  GeneralizedCase kind = GeneralizedCase::IIb;
  double kappa = 1.0;
  double epsilon = 1.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
};

class GeneralizedAlphaBetaMetric final : public detail::LagrangianAdapter<GeneralizedAlphaBetaMetric> {
 public:
  /// `rho` is rho(|b|); `g` is the case (i) exponent c3 eps int |b|^3/lambda and
  /// `F` the case (i) free function (both ignored for the other cases).
  GeneralizedAlphaBetaMetric(std::shared_ptr<const MetricField> a, std::shared_ptr<const OneFormField> b,
                             GeneralizedParams params, std::shared_ptr<const ScalarFunction> rho,
                             std::shared_ptr<const ScalarFunction> g = nullptr,
                             std::shared_ptr<const ScalarFunction> F = nullptr, AdmissibilityMargins margins = {});

  template <class S>
  S evaluate(const Vec4<S>& x, const Vec4<S>& v) const;
  /// kappa-free Phi(|b|, p) of the case formula.
  template <class S>
  S phi(const S& bnorm, const S& p) const;

  bool admissible(const Point& x, const TangentVector& v) const override;
  LagrangianDescriptor describe() const override;
  const GeneralizedParams& params() const { return params_; }
  const MetricField& metric() const { return *a_; }
  const OneFormField& oneform() const { return *b_; }

 private:
  std::shared_ptr<const MetricField> a_;
  std::shared_ptr<const OneFormField> b_;
  GeneralizedParams params_;
  std::shared_ptr<const ScalarFunction> rho_;
  std::shared_ptr<const ScalarFunction> g_;
  std::shared_ptr<const ScalarFunction> F_;
  AdmissibilityMargins margins_;
};

// ---------------------------------------------------------------------------
// Derived objects.

/// Value, gradient and Hessian of L in the eight variables (x^0..x^3, v^0..v^3).
struct LagrangianJet {
  double value = 0.0;
  std::array<double, kJetVars> grad{};
  std::array<std::array<double, kJetVars>, kJetVars> hess{};
};

LagrangianJet lagrangian_jet(const FinslerLagrangian& L, const Point& x, const TangentVector& v);

/// g_{mu nu} = (1/2) d^2 L / dv^mu dv^nu. Throws Inadmissible off the cone.
Mat4d finsler_metric_tensor(const FinslerLagrangian& L, const Point& x, const TangentVector& v);

struct SprayResult {
  Vec4d G{};
  Mat4d N{};  ///< [nu][mu] = dG^nu / dv^mu
};

/// G^mu only (second-order jets). Throws DegenerateHessian when |det g| < 1e-12.
Vec4d spray_coefficients(const FinslerLagrangian& L, const Point& x, const TangentVector& v);

/// G^mu and the nonlinear connection (third-order jets).
SprayResult spray(const FinslerLagrangian& L, const Point& x, const TangentVector& v);

struct HorizontalDerivative {
  Vec4d delta{};
  /// max_mu of |d_mu L| plus the sum of |Gamma^nu_{mu rho} v^rho dL/dv^nu| over nu, rho:
  /// the size of the terms that cancel in delta.
  double scale = 0.0;
};

/// delta_mu L = d_mu L - Gamma^nu_{mu rho}(x) v^rho dL/dv^nu
HorizontalDerivative horizontal_derivative(const FinslerLagrangian& L, const AffineConnection& conn, const Point& x,
                                           const TangentVector& v);

struct QuadraticityResult {
  double max_residual = 0.0;   ///< max over points of the relative fit residual
  std::vector<Point> points;   ///< points actually used
  std::vector<Tensor3d> fitted;  ///< fitted Gamma^mu_{nu rho} per point
};

/// Fits 2G^mu(x, .) by a quadratic form over `directions` random directions at
/// each point. Throws InsufficientData when fewer than 10 admissible
/// directions are found at a point.
QuadraticityResult berwald_quadraticity(const FinslerLagrangian& L, const std::vector<Point>& points,
                                        Sampler& sampler, int directions = 20);

struct NondegeneracyResult {
  double min_abs_det = 0.0;
  std::size_t degenerate_count = 0;  ///< samples with |det g| < 1e-12
  std::map<std::string, std::size_t> signatures;  ///< eigenvalue sign pattern, e.g. "-+++"
};

NondegeneracyResult nondegeneracy_scan(const FinslerLagrangian& L,
                                       const std::vector<std::pair<Point, TangentVector>>& samples);

}  // namespace finsmet
