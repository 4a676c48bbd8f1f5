#pragma once

// Symmetric affine connections with vectorial nonmetricity:
//   Q_{mu nu rho} = c1 b_mu a_{nu rho} + c2 (b_rho a_{mu nu} + b_nu a_{rho mu}) + c3 b_mu b_nu b_rho
// and the distortion D = Gamma - Gamma(Levi-Civita) it determines.

#include <memory>
#include <string>
#include <vector>

#include "finsmet/geometry.hpp"

namespace finsmet {

struct NonmetricityCoefficients {
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;

  bool all_zero() const { return c1 == 0.0 && c2 == 0.0 && c3 == 0.0; }
  double max_abs() const;
};

enum class Subfamily { Weyl, Schroedinger, CompletelySymmetric, Generic };

const char* to_string(Subfamily family);

struct SubfamilyTag {
  Subfamily family = Subfamily::Generic;
  std::string constraint;
};

/// Every subfamily whose coefficient constraint holds; {Generic} if none does.
std::vector<SubfamilyTag> classify_subfamily(const NonmetricityCoefficients& coeffs);

/// Anything that yields symmetric connection coefficients Gamma^mu_{nu rho}(x).
class AffineConnection {
 public:
  virtual ~AffineConnection() = default;
  virtual Tensor3d coefficients(const Point& x) const = 0;
  virtual bool in_domain(const Point& x) const = 0;

  /// -Gamma^mu_{nu rho}(x) v^nu v^rho
  Vec4d autoparallel_rhs(const Point& x, const TangentVector& v) const;
};

/// The Levi-Civita connection of a metric (zero distortion).
class LeviCivitaConnection final : public AffineConnection {
 public:
  explicit LeviCivitaConnection(std::shared_ptr<const MetricField> metric);
  Tensor3d coefficients(const Point& x) const override;
  bool in_domain(const Point& x) const override;

 private:
  std::shared_ptr<const MetricField> metric_;
};

/// D^nu_mu = D^nu_{mu rho} v^rho and its two standard contractions.
struct ContractedDistortion {
  Mat4d matrix{};        ///< [nu][mu] = D^nu_mu
  Vec4d with_velocity{};  ///< D^nu_mu v_nu, by explicit index contraction
  Vec4d with_oneform{};   ///< D^nu_mu b_nu, by explicit index contraction
  Vec4d with_velocity_closed{};  ///< c2 B v_mu + (c3 B^2 + c1 A) b_mu / 2
  Vec4d with_oneform_closed{};   ///< (c2 - c1/2) <b,b> v_mu + (c1 + c3 <b,b>/2) B b_mu
  double A = 0.0;
  double B = 0.0;
  double bb = 0.0;
};

class VectorialConnection final : public AffineConnection {
 public:
  /// Throws InvalidArgument when (c1, c2, c3) = (0, 0, 0).
  VectorialConnection(std::shared_ptr<const MetricField> metric, std::shared_ptr<const OneFormField> oneform,
                      NonmetricityCoefficients coeffs);

  const MetricField& metric() const { return *metric_; }
  const OneFormField& oneform() const { return *oneform_; }
  const std::shared_ptr<const MetricField>& metric_ptr() const { return metric_; }
  const std::shared_ptr<const OneFormField>& oneform_ptr() const { return oneform_; }
  const NonmetricityCoefficients& coeffs() const { return coeffs_; }

  /// Q_{mu nu rho}, indexed [mu][nu][rho].
  Tensor3d nonmetricity_tensor(const Point& x) const;
  /// D^mu_{nu rho} from the closed vectorial form.
  Tensor3d distortion_tensor(const Point& x) const;
  /// D^mu_{nu rho} rebuilt from Q as (Q_{nu rho}^mu + Q_rho^mu_nu - Q^mu_{nu rho}) / 2.
  Tensor3d distortion_from_nonmetricity(const Point& x) const;
  /// Gamma = Christoffel(a) + D.
  Tensor3d coefficients(const Point& x) const override;
  ContractedDistortion contracted_distortion(const Point& x, const TangentVector& v) const;
  bool in_domain(const Point& x) const override;

 private:
  std::shared_ptr<const MetricField> metric_;
  std::shared_ptr<const OneFormField> oneform_;
  NonmetricityCoefficients coeffs_;
};

/// nabla_mu a_{nu rho} for an arbitrary connection, indexed [mu][nu][rho].
Tensor3d covariant_derivative_of_metric(const AffineConnection& conn, const MetricField& a, const Point& x);

}  // namespace finsmet
