#pragma once

// Decides whether a vectorial-nonmetricity connection is metrized by an
// (alpha,beta)-metric or a generalized (alpha,beta)-metric, by fitting the
// one-form constraints at sample points, and builds the Lagrangian.

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "finsmet/finsler.hpp"
#include "finsmet/profile.hpp"

namespace finsmet {

enum class FitVerdict { Satisfied, Violated };
enum class Branch { AlphaBetaCase1, AlphaBetaCase2, Generalized };
enum class Verdict { AlphaBetaMetrizable, GeneralizedMetrizable, NotMetrizableByTheseFamilies };

const char* to_string(FitVerdict v);
const char* to_string(Branch b);
const char* to_string(Verdict v);

struct FitOptions {
  double residual_tol = 1e-7;      ///< relative constraint residual
  double constancy_tol = 1e-6;     ///< spread of fitted constants across samples
  double profile_tol = 1e-5;       ///< lambda(|b|), tau(|b|) profile consistency
  double tau_formula_tol = 1e-6;   ///< tau(|b|) against its closed form
  double null_tol = 1e-10;         ///< |<b,b>| below this is treated as null
  /// Lower limit of the |b| integrals; NaN selects the smallest sampled |b|.
  double integral_anchor = std::numeric_limits<double>::quiet_NaN();
};

struct ConstraintFit {
  Branch branch = Branch::AlphaBetaCase1;
  FitVerdict verdict = FitVerdict::Violated;
  std::string reason;
  std::size_t samples_used = 0;
  std::size_t samples_rejected = 0;
  double max_residual = 0.0;
  double mean_residual = 0.0;
  double spread = 0.0;  ///< cross-sample constancy statistic of the fitted constant / profiles

  // (alpha,beta) branch.
  double lambda = std::numeric_limits<double>::quiet_NaN();
  double tau = std::numeric_limits<double>::quiet_NaN();
  double max_antisymmetric = 0.0;  ///< max |nabla_mu b_nu - nabla_nu b_mu|

  // Generalized branch.
  double epsilon = 0.0;
  double C1 = 0.0;
  double gradient_residual = 0.0;  ///< d|b| = lambda u
  double torse_residual = 0.0;     ///< nabla u = tau (a - eps u u)
  double tau_formula_residual = 0.0;
  double lambda_min_abs = 0.0;
  double bnorm_min = 0.0;
  double bnorm_max = 0.0;
  double integral_anchor = 0.0;
  std::optional<ChebyshevSeries> lambda_profile;
  std::optional<ChebyshevSeries> tau_profile;
};

/// Rejects the alpha-beta branch unless c2 = c3 = 0; fits 1/lambda + 1.
ConstraintFit fit_theorem1_case1(const VectorialConnection& conn, const std::vector<Point>& points,
                                 const FitOptions& options = {});

/// Rejects unless c2 = 0, c3 != 0; fits tau.
ConstraintFit fit_theorem1_case2(const VectorialConnection& conn, const std::vector<Point>& points,
                                 const FitOptions& options = {});

/// Throws NoSubcase when c1 = 0 and tau = 0; InvalidArgument if the fit is
/// not Satisfied.
std::shared_ptr<const AlphaBetaMetric> construct_theorem1(const VectorialConnection& conn, const ConstraintFit& fit,
                                                          double kappa, AdmissibilityMargins margins = {});

struct PdeResidual {
  Vec4d residual{};
  double scale = 0.0;  ///< largest magnitude among the terms that cancel
};

/// Phi'(s) B (A dB_mu - A D^nu_mu b_nu + B D^nu_mu v_nu) - Phi A D^nu_mu v_nu
/// with dB_mu = (nabla_mu b_rho) v^rho (Levi-Civita).
PdeResidual alpha_beta_pde_residual(const AlphaBetaMetric& L, const VectorialConnection& conn, const Point& x,
                                    const TangentVector& v);

/// Throws NullOneForm if <b,b> is (numerically) zero at a sample.
ConstraintFit fit_theorem2(const VectorialConnection& conn, const std::vector<Point>& points,
                           const FitOptions& options = {});

struct Theorem2Constants {
  std::optional<double> C1;  ///< overrides the fitted C1 when set
  double C2 = 0.0;
  double C3 = 0.0;
  double C4 = 0.0;
};

/// Case routing by (c1, c2, c3). Throws MissingFunction in case (i) without F,
/// NoSubcase for coefficient patterns outside the four cases, and
/// DegenerateResult when the Finsler metric tensor is singular at most of the
/// check samples.
std::shared_ptr<const GeneralizedAlphaBetaMetric> construct_theorem2(
    const VectorialConnection& conn, const ConstraintFit& fit, const Theorem2Constants& constants,
    std::shared_ptr<const ScalarFunction> F, double kappa, AdmissibilityMargins margins,
    const std::vector<Point>& check_points, Sampler& sampler);

/// rho(|b|) = int_{anchor}^{|b|} t / lambda(t) dt from a Satisfied generalized fit.
std::shared_ptr<const ProfileIntegral> rho_profile(const ConstraintFit& fit);

/// (1/2) A^2 dPhi/d|b| d_mu|b| + dPhi/dp U (A dU_mu - A D^nu_mu u_nu + U D^nu_mu v_nu) - A D^nu_mu v_nu Phi
PdeResidual generalized_pde_residual(const GeneralizedAlphaBetaMetric& L, const VectorialConnection& conn,
                                     const Point& x, const TangentVector& v);

/// The two scalar equations on the (|b|, p) plane, in terms of Psi = ln|kappa Phi|.
/// Throws DegenerateResult when dPsi/dp vanishes.
std::array<double, 2> reduced_system_residual(const GeneralizedAlphaBetaMetric& L, const ConstraintFit& fit,
                                              double bnorm, double p);

struct DecideOptions {
  FitOptions fit;
  double kappa = 1.0;
  AdmissibilityMargins margins;
  Theorem2Constants constants;
  std::shared_ptr<const ScalarFunction> F;
  int berwald_points = 20;
  int berwald_directions = 20;
};

struct MetrizabilityReport {
  std::vector<SubfamilyTag> tags;
  std::vector<ConstraintFit> fits;
  std::optional<Branch> branch;
  std::shared_ptr<const FinslerLagrangian> lagrangian;
  std::optional<LagrangianDescriptor> descriptor;
  double berwald_residual = 0.0;
  double gamma_mismatch = 0.0;        ///< fitted vs actual Gamma, relative to max(1, |Gamma|)
  double spray_vs_connection = 0.0;  ///< infinite when g is singular at a check sample
  double euler_lagrange_residual = 0.0;
  std::size_t check_samples = 0;
  std::size_t degenerate_samples = 0;
  Verdict verdict = Verdict::NotMetrizableByTheseFamilies;
  std::vector<std::string> notes;
};

/// `fit_points` feed the constraint fits; `check_points` (fresh) feed the
/// Berwald and spray checks on the constructed Lagrangian.
MetrizabilityReport decide(const VectorialConnection& conn, const std::vector<Point>& fit_points,
                           const std::vector<Point>& check_points, Sampler& sampler, const DecideOptions& options = {});

}  // namespace finsmet
