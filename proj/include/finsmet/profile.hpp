#pragma once

// One-variable profiles of |b|: least-squares Chebyshev series for sampled
// functions such as lambda(|b|) and tau(|b|), and their integrals
// I(t) = factor * int_{anchor}^{t} s^k / lambda(s) ds.

#include <memory>
#include <string>
#include <vector>

#include "finsmet/geometry.hpp"

namespace finsmet {

class ChebyshevSeries {
 public:
  ChebyshevSeries() = default;
  ChebyshevSeries(double lo, double hi, std::vector<double> coeffs);

  /// Lowest degree (up to max_degree) whose max fit error is below
  /// rel_tol * max|y|; the best fit found otherwise.
  static ChebyshevSeries fit(const std::vector<double>& xs, const std::vector<double>& ys, int max_degree = 16,
                             double rel_tol = 1e-11);

  template <class S>
  S eval(const S& t) const {
    const S z = (2.0 * t - (lo_ + hi_)) / (hi_ - lo_);
    S b1(0.0);
    S b2(0.0);
    for (std::size_t k = coeffs_.size(); k-- > 1;) {
      const S b0 = 2.0 * z * b1 - b2 + coeffs_[k];
      b2 = b1;
      b1 = b0;
    }
    return z * b1 - b2 + (coeffs_.empty() ? 0.0 : coeffs_[0]);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  /// max |fit - y| / max |y| over the fitted samples.
  double fit_error() const { return fit_error_; }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::vector<double> coeffs_;
  double fit_error_ = 0.0;
};

class ProfileIntegral final : public ScalarFunction {
 public:
  ProfileIntegral(ChebyshevSeries lambda, int power, double factor, double anchor, std::string description);

  double eval(double t) const override { return value(t); }
  J1 eval(const J1& t) const override { return value(t); }
  J2 eval(const J2& t) const override { return value(t); }
  J3 eval(const J3& t) const override { return value(t); }
  const std::string& description() const override { return desc_; }

  double anchor() const { return anchor_; }

 private:
  template <class S>
  S integrand(const S& t) const {
    return factor_ * ipow(t, power_) / lambda_.eval(t);
  }
  double quadrature(double t) const;

  template <class S>
  S value(const S& t) const {
    if constexpr (std::is_same_v<S, double>) {
      return quadrature(t);
    } else {
      S r;
      r.v = value(t.v);
      const auto f = integrand(t.v);
      for (std::size_t i = 0; i < r.d.size(); ++i) r.d[i] = f * t.d[i];
      return r;
    }
  }

  ChebyshevSeries lambda_;
  int power_;
  double factor_;
  double anchor_;
  std::string desc_;
};

}  // namespace finsmet
