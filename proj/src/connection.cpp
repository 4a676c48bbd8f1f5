#include "finsmet/connection.hpp"

#include <algorithm>
#include <cmath>

namespace finsmet {

double NonmetricityCoefficients::max_abs() const {
  return std::max({std::abs(c1), std::abs(c2), std::abs(c3)});
}

const char* to_string(Subfamily family) {
  switch (family) {
    case Subfamily::Weyl: return "Weyl";
    case Subfamily::Schroedinger: return "Schroedinger";
    case Subfamily::CompletelySymmetric: return "CompletelySymmetric";
    case Subfamily::Generic: return "Generic";
  }
  return "Generic";
}

std::vector<SubfamilyTag> classify_subfamily(const NonmetricityCoefficients& c) {
  const double tol = 1e-12 * std::max(c.max_abs(), 1.0);
  auto zero = [tol](double v) { return std::abs(v) <= tol; };
  std::vector<SubfamilyTag> tags;
  if (zero(c.c2) && zero(c.c3)) tags.push_back({Subfamily::Weyl, "c2 = c3 = 0"});
  if (zero(c.c1 + 2.0 * c.c2) && zero(c.c3)) tags.push_back({Subfamily::Schroedinger, "c1 + 2 c2 = 0, c3 = 0"});
  if (zero(c.c1 - c.c2)) tags.push_back({Subfamily::CompletelySymmetric, "c1 = c2"});
  if (tags.empty()) tags.push_back({Subfamily::Generic, "none"});
  return tags;
}

Vec4d AffineConnection::autoparallel_rhs(const Point& x, const TangentVector& v) const {
  Vec4d acc = contract_quadratic(coefficients(x), v.components);
  for (double& e : acc) e = -e;
  return acc;
}

LeviCivitaConnection::LeviCivitaConnection(std::shared_ptr<const MetricField> metric) : metric_(std::move(metric)) {
  if (!metric_) throw Error(ErrorCode::InvalidArgument, "null metric");
}

Tensor3d LeviCivitaConnection::coefficients(const Point& x) const { return christoffel(*metric_, x); }

bool LeviCivitaConnection::in_domain(const Point& x) const { return metric_->in_domain(x); }

VectorialConnection::VectorialConnection(std::shared_ptr<const MetricField> metric,
                                         std::shared_ptr<const OneFormField> oneform, NonmetricityCoefficients coeffs)
    : metric_(std::move(metric)), oneform_(std::move(oneform)), coeffs_(coeffs) {
  if (!metric_ || !oneform_) throw Error(ErrorCode::InvalidArgument, "connection needs a metric and a one-form");
  if (coeffs_.all_zero())
    throw Error(ErrorCode::InvalidArgument,
                "coefficients not all zero: vectorial nonmetricity requires (c1, c2, c3) != (0, 0, 0)");
}

bool VectorialConnection::in_domain(const Point& x) const { return metric_->in_domain(x) && oneform_->in_domain(x); }

Tensor3d VectorialConnection::nonmetricity_tensor(const Point& x) const {
  const Mat4d a = metric_->at(x);
  const Vec4d b = oneform_->at(x);
  const auto& [c1, c2, c3] = coeffs_;
  Tensor3d q{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = n; r < kDim; ++r) {
        q[m][n][r] = c1 * b[m] * a[n][r] + c2 * (b[r] * a[m][n] + b[n] * a[r][m]) + c3 * b[m] * b[n] * b[r];
        q[m][r][n] = q[m][n][r];
      }
  return q;
}

Tensor3d VectorialConnection::distortion_tensor(const Point& x) const {
  const Vec4d b = oneform_->at(x);
  const Mat4d a = metric_->at(x);
  const Vec4d bu = raise_index(*metric_, x, b);
  const auto& [c1, c2, c3] = coeffs_;
  Tensor3d d{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = 0; r < kDim; ++r) {
        double v = 0.5 * (2.0 * c2 - c1) * bu[m] * a[n][r] + 0.5 * c3 * bu[m] * b[n] * b[r];
        if (m == r) v += 0.5 * c1 * b[n];
        if (m == n) v += 0.5 * c1 * b[r];
        d[m][n][r] = v;
      }
  return d;
}

Tensor3d VectorialConnection::distortion_from_nonmetricity(const Point& x) const {
  const Tensor3d q = nonmetricity_tensor(x);
  const Mat4d inv = inverse(metric_->at(x));
  // D^mu_{nu rho} = a^{mu s} (Q_{nu rho s} + Q_{rho s nu} - Q_{s nu rho}) / 2
  Tensor3d d{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = 0; r < kDim; ++r) {
        double v = 0.0;
        for (std::size_t s = 0; s < kDim; ++s) v += inv[m][s] * (q[n][r][s] + q[r][s][n] - q[s][n][r]);
        d[m][n][r] = 0.5 * v;
      }
  return d;
}

Tensor3d VectorialConnection::coefficients(const Point& x) const {
  Tensor3d g = christoffel(*metric_, x);
  const Tensor3d d = distortion_tensor(x);
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = n; r < kDim; ++r) {
        // Both halves are symmetric in (nu, rho); write once so the result is
        // exactly torsion-free.
        const double v = g[m][n][r] + d[m][n][r];
        g[m][n][r] = v;
        g[m][r][n] = v;
      }
  return g;
}

ContractedDistortion VectorialConnection::contracted_distortion(const Point& x, const TangentVector& v) const {
  const Tensor3d d = distortion_tensor(x);
  const Mat4d a = metric_->at(x);
  const Vec4d b = oneform_->at(x);
  const Vec4d bu = raise_index(*metric_, x, b);
  const Vec4d& vv = v.components;
  const Vec4d vl = mat_vec(a, vv);
  const auto& [c1, c2, c3] = coeffs_;

  ContractedDistortion out;
  out.A = dot(vv, vl);
  out.B = dot(b, vv);
  out.bb = dot(b, bu);
  for (std::size_t nu = 0; nu < kDim; ++nu)
    for (std::size_t mu = 0; mu < kDim; ++mu) {
      double s = 0.0;
      for (std::size_t r = 0; r < kDim; ++r) s += d[nu][mu][r] * vv[r];
      out.matrix[nu][mu] = s;
    }
  for (std::size_t mu = 0; mu < kDim; ++mu) {
    double sx = 0.0;
    double sb = 0.0;
    for (std::size_t nu = 0; nu < kDim; ++nu) {
      sx += out.matrix[nu][mu] * vl[nu];
      sb += out.matrix[nu][mu] * b[nu];
    }
    out.with_velocity[mu] = sx;
    out.with_oneform[mu] = sb;
    out.with_velocity_closed[mu] = c2 * out.B * vl[mu] + 0.5 * (c3 * out.B * out.B + c1 * out.A) * b[mu];
    out.with_oneform_closed[mu] = (c2 - 0.5 * c1) * out.bb * vl[mu] + (c1 + 0.5 * c3 * out.bb) * out.B * b[mu];
  }
  return out;
}

Tensor3d covariant_derivative_of_metric(const AffineConnection& conn, const MetricField& a, const Point& x) {
  const MetricJet j = metric_jet(a, x);
  const Tensor3d g = conn.coefficients(x);
  Tensor3d out{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = 0; r < kDim; ++r) {
        double v = j.d[m][n][r];
        for (std::size_t s = 0; s < kDim; ++s) v -= g[s][m][n] * j.a[s][r] + g[s][m][r] * j.a[n][s];
        out[m][n][r] = v;
      }
  return out;
}

}  // namespace finsmet
