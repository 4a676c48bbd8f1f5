#include "finsmet/geometry.hpp"

#include <cmath>
#include <sstream>

namespace finsmet {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "invalid-argument";
    case ErrorCode::SingularMetric: return "singular-metric";
    case ErrorCode::Inadmissible: return "inadmissible";
    case ErrorCode::DegenerateHessian: return "degenerate-hessian";
    case ErrorCode::NullOneForm: return "null-oneform";
    case ErrorCode::NoSubcase: return "no-subcase";
    case ErrorCode::MissingFunction: return "missing-function";
    case ErrorCode::DegenerateResult: return "degenerate-result";
    case ErrorCode::InsufficientData: return "insufficient-data";
    case ErrorCode::BlowUp: return "blow-up";
    case ErrorCode::Config: return "config";
  }
  return "unknown";
}

MetricJet metric_jet(const MetricField& a, const Point& x) {
  const Mat4<J1> aj = a.eval(seed_coordinates<J1>(x.coords));
  MetricJet out;
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n) {
      out.a[m][n] = aj[m][n].v;
      for (std::size_t l = 0; l < kDim; ++l) out.d[l][m][n] = aj[m][n].d[l];
    }
  out.det = determinant(out.a);
  if (!(std::abs(out.det) >= kSingularDetTolerance)) {
    std::ostringstream os;
    os << "metric is singular at x = (" << x[0] << ", " << x[1] << ", " << x[2] << ", " << x[3]
       << "): |det a| = " << std::abs(out.det);
    throw Error(ErrorCode::SingularMetric, os.str());
  }
  out.inv = inverse(out.a);
  return out;
}

Tensor3d christoffel(const MetricField& a, const Point& x) {
  const MetricJet j = metric_jet(a, x);
  Tensor3d lowered{};  // [lambda][nu][rho]
  for (std::size_t l = 0; l < kDim; ++l)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = n; r < kDim; ++r) {
        const double v = 0.5 * (j.d[n][l][r] + j.d[r][l][n] - j.d[l][n][r]);
        lowered[l][n][r] = v;
        lowered[l][r][n] = v;
      }
  Tensor3d gamma{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t r = n; r < kDim; ++r) {
        double s = 0.0;
        for (std::size_t l = 0; l < kDim; ++l) s += j.inv[m][l] * lowered[l][n][r];
        gamma[m][n][r] = s;
        gamma[m][r][n] = s;
      }
  return gamma;
}

Mat4d oneform_derivative(const OneFormField& b, const Point& x) {
  const Vec4<J1> bj = b.eval(seed_coordinates<J1>(x.coords));
  Mat4d db{};
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n) db[m][n] = bj[n].d[m];
  return db;
}

Mat4d levi_civita_covariant_derivative_oneform(const MetricField& a, const OneFormField& b, const Point& x) {
  const Tensor3d gamma = christoffel(a, x);
  const Vec4d bv = b.at(x);
  Mat4d nb = oneform_derivative(b, x);
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = 0; n < kDim; ++n)
      for (std::size_t s = 0; s < kDim; ++s) nb[m][n] -= gamma[s][m][n] * bv[s];
  return nb;
}

Vec4d raise_index(const MetricField& a, const Point& x, const Vec4d& covector) {
  const Mat4d am = a.at(x);
  if (std::abs(determinant(am)) < kSingularDetTolerance)
    throw Error(ErrorCode::SingularMetric, "cannot raise index: metric is singular");
  return mat_vec(inverse(am), covector);
}

Vec4d lower_index(const MetricField& a, const Point& x, const Vec4d& vector) {
  const Mat4d am = a.at(x);
  if (std::abs(determinant(am)) < kSingularDetTolerance)
    throw Error(ErrorCode::SingularMetric, "cannot lower index: metric is singular");
  return mat_vec(am, vector);
}

double oneform_norm_squared(const MetricField& a, const OneFormField& b, const Point& x) {
  const Vec4d bv = b.at(x);
  return dot(bv, raise_index(a, x, bv));
}

Scalar2Jet oneform_norm_jet(const MetricField& a, const OneFormField& b, const Point& x) {
  const Vec4<J2> xs = seed_coordinates<J2>(x.coords);
  const Mat4<J2> am = a.eval(xs);
  const Vec4<J2> bv = b.eval(xs);
  const J2 bb = quad_form(inverse(am), bv, bv);
  const J2 n = sqrt(abs(bb));
  Scalar2Jet out;
  out.value = n.v.v;
  for (std::size_t i = 0; i < kDim; ++i) {
    out.first[i] = n.v.d[i];
    for (std::size_t k = 0; k < kDim; ++k) out.second[i][k] = n.d[i].d[k];
  }
  return out;
}

void check_metric(const MetricField& a, const Point& x) {
  const Mat4d am = a.at(x);
  const double scale = std::max(max_abs(am), 1e-300);
  for (std::size_t m = 0; m < kDim; ++m)
    for (std::size_t n = m + 1; n < kDim; ++n)
      if (std::abs(am[m][n] - am[n][m]) > 1e-12 * scale)
        throw Error(ErrorCode::InvalidArgument, "metric is not symmetric at the sampled point");
  if (std::abs(determinant(am)) < kSingularDetTolerance)
    throw Error(ErrorCode::SingularMetric, "metric is singular at the sampled point");
}

}  // namespace finsmet
