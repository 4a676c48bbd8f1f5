#include "finsmet/profile.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

namespace finsmet {

ChebyshevSeries::ChebyshevSeries(double lo, double hi, std::vector<double> coeffs)
    : lo_(lo), hi_(hi), coeffs_(std::move(coeffs)) {
  if (!(hi_ > lo_)) throw Error(ErrorCode::InvalidArgument, "Chebyshev interval must have hi > lo");
}

ChebyshevSeries ChebyshevSeries::fit(const std::vector<double>& xs, const std::vector<double>& ys, int max_degree,
                                     double rel_tol) {
  if (xs.empty() || xs.size() != ys.size()) throw Error(ErrorCode::InsufficientData, "no samples to fit a profile");
  const auto [lo_it, hi_it] = std::minmax_element(xs.begin(), xs.end());
  double lo = *lo_it;
  double hi = *hi_it;
  double yscale = 0.0;
  for (double y : ys) yscale = std::max(yscale, std::abs(y));
  if (yscale == 0.0) yscale = 1.0;

  // A single abscissa only supports a constant.
  if (hi - lo <= 1e-12 * std::max(1.0, std::abs(hi))) {
    double mean = 0.0;
    for (double y : ys) mean += y;
    mean /= static_cast<double>(ys.size());
    ChebyshevSeries out(lo - 0.5, hi + 0.5, {mean});
    for (double y : ys) out.fit_error_ = std::max(out.fit_error_, std::abs(y - mean) / yscale);
    return out;
  }

  const auto n = static_cast<Eigen::Index>(xs.size());
  const int top = std::min<int>(max_degree, static_cast<int>(xs.size()) - 1);
  Eigen::VectorXd y(n);
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y(i) = ys[static_cast<std::size_t>(i)];
    z(i) = (2.0 * xs[static_cast<std::size_t>(i)] - (lo + hi)) / (hi - lo);
  }
  // Chebyshev basis T_0..T_top at every sample.
  Eigen::MatrixXd T(n, top + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    T(i, 0) = 1.0;
    if (top >= 1) T(i, 1) = z(i);
    for (int k = 2; k <= top; ++k) T(i, k) = 2.0 * z(i) * T(i, k - 1) - T(i, k - 2);
  }

  ChebyshevSeries best;
  best.fit_error_ = std::numeric_limits<double>::infinity();
  for (int deg = 0; deg <= top; ++deg) {
    const Eigen::MatrixXd basis = T.leftCols(deg + 1);
    const Eigen::VectorXd c = basis.colPivHouseholderQr().solve(y);
    const double err = (basis * c - y).cwiseAbs().maxCoeff() / yscale;
    if (err < best.fit_error_) {
      best = ChebyshevSeries(lo, hi, std::vector<double>(c.data(), c.data() + c.size()));
      best.fit_error_ = err;
    }
    if (err < rel_tol) break;
  }
  return best;
}

ProfileIntegral::ProfileIntegral(ChebyshevSeries lambda, int power, double factor, double anchor,
                                 std::string description)
    : lambda_(std::move(lambda)), power_(power), factor_(factor), anchor_(anchor), desc_(std::move(description)) {}

double ProfileIntegral::quadrature(double t) const {
  if (t == anchor_) return 0.0;
  auto f = [this](double s) { return integrand(s); };
  // The Kronrod rule never samples the endpoints, so an anchor at |b| = 0
  // with lambda(0) = 0 is fine as long as s^k / lambda(s) stays bounded.
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, anchor_, t, 15, 1e-13);
}

}  // namespace finsmet
