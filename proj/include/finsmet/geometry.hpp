#pragma once

// Coordinate-chart tensor calculus in dimension 4.
//
// Fields are pure evaluators that can be called with any of the supported
// scalar types (double and the jet levels J1..J3), so derivatives with respect
// to the chart coordinates come out of forward-mode propagation rather than
// finite differences.

#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "finsmet/tensor.hpp"

namespace finsmet {

using DomainPredicate = std::function<bool(const Point&)>;

/// Symmetric (0,2) metric field a_{mu nu}(x). Any nondegenerate signature.
class MetricField {
 public:
  virtual ~MetricField() = default;
  virtual Mat4<double> eval(const Vec4<double>& x) const = 0;
  virtual Mat4<J1> eval(const Vec4<J1>& x) const = 0;
  virtual Mat4<J2> eval(const Vec4<J2>& x) const = 0;
  virtual Mat4<J3> eval(const Vec4<J3>& x) const = 0;
  virtual bool in_domain(const Point& x) const = 0;
  virtual const std::string& description() const = 0;

  Mat4d at(const Point& x) const { return eval(x.coords); }
};

/// One-form field b_mu(x).
class OneFormField {
 public:
  virtual ~OneFormField() = default;
  virtual Vec4<double> eval(const Vec4<double>& x) const = 0;
  virtual Vec4<J1> eval(const Vec4<J1>& x) const = 0;
  virtual Vec4<J2> eval(const Vec4<J2>& x) const = 0;
  virtual Vec4<J3> eval(const Vec4<J3>& x) const = 0;
  virtual bool in_domain(const Point& x) const = 0;
  virtual const std::string& description() const = 0;

  Vec4d at(const Point& x) const { return eval(x.coords); }
};

/// Smooth real function of one real variable, differentiable through jets.
class ScalarFunction {
 public:
  virtual ~ScalarFunction() = default;
  virtual double eval(double t) const = 0;
  virtual J1 eval(const J1& t) const = 0;
  virtual J2 eval(const J2& t) const = 0;
  virtual J3 eval(const J3& t) const = 0;
  virtual const std::string& description() const = 0;
};

namespace detail {

template <class F>
class GenericMetric final : public MetricField {
 public:
  GenericMetric(F f, std::string desc, DomainPredicate domain)
      : f_(std::move(f)), desc_(std::move(desc)), domain_(std::move(domain)) {}
  Mat4<double> eval(const Vec4<double>& x) const override { return f_(x); }
  Mat4<J1> eval(const Vec4<J1>& x) const override { return f_(x); }
  Mat4<J2> eval(const Vec4<J2>& x) const override { return f_(x); }
  Mat4<J3> eval(const Vec4<J3>& x) const override { return f_(x); }
  bool in_domain(const Point& x) const override { return !domain_ || domain_(x); }
  const std::string& description() const override { return desc_; }

 private:
  F f_;
  std::string desc_;
  DomainPredicate domain_;
};

template <class F>
class GenericOneForm final : public OneFormField {
 public:
  GenericOneForm(F f, std::string desc, DomainPredicate domain)
      : f_(std::move(f)), desc_(std::move(desc)), domain_(std::move(domain)) {}
  Vec4<double> eval(const Vec4<double>& x) const override { return f_(x); }
  Vec4<J1> eval(const Vec4<J1>& x) const override { return f_(x); }
  Vec4<J2> eval(const Vec4<J2>& x) const override { return f_(x); }
  Vec4<J3> eval(const Vec4<J3>& x) const override { return f_(x); }
  bool in_domain(const Point& x) const override { return !domain_ || domain_(x); }
  const std::string& description() const override { return desc_; }

 private:
  F f_;
  std::string desc_;
  DomainPredicate domain_;
};

template <class F>
class GenericScalarFunction final : public ScalarFunction {
 public:
  GenericScalarFunction(F f, std::string desc) : f_(std::move(f)), desc_(std::move(desc)) {}
  double eval(double t) const override { return f_(t); }
  J1 eval(const J1& t) const override { return f_(t); }
  J2 eval(const J2& t) const override { return f_(t); }
  J3 eval(const J3& t) const override { return f_(t); }
  const std::string& description() const override { return desc_; }

 private:
  F f_;
  std::string desc_;
};

}  // namespace detail

/// Wrap a generic callable `f(const Vec4<S>&) -> Mat4<S>` as a metric field.
template <class F>
std::shared_ptr<const MetricField> make_metric(F f, std::string description, DomainPredicate domain = {}) {
  return std::make_shared<detail::GenericMetric<F>>(std::move(f), std::move(description), std::move(domain));
}

/// Wrap a generic callable `f(const Vec4<S>&) -> Vec4<S>` as a one-form field.
template <class F>
std::shared_ptr<const OneFormField> make_oneform(F f, std::string description, DomainPredicate domain = {}) {
  return std::make_shared<detail::GenericOneForm<F>>(std::move(f), std::move(description), std::move(domain));
}

/// Wrap a generic callable `f(const S&) -> S` as a scalar function.
template <class F>
std::shared_ptr<const ScalarFunction> make_scalar_function(F f, std::string description) {
  return std::make_shared<detail::GenericScalarFunction<F>>(std::move(f), std::move(description));
}

/// Value, gradient and Hessian of a scalar with respect to four variables.
struct Scalar2Jet {
  double value = 0.0;
  Vec4d first{};
  Mat4d second{};
};

/// Metric value, inverse and first coordinate derivatives at a point.
struct MetricJet {
  Mat4d a{};
  Mat4d inv{};
  /// d[lambda][mu][nu] = partial_lambda a_{mu nu}
  Tensor3d d{};
  double det = 0.0;
};

/// Throws SingularMetric when |det a(x)| < 1e-12.
MetricJet metric_jet(const MetricField& a, const Point& x);

/// Levi-Civita Christoffel symbols, indexed [mu][nu][rho].
Tensor3d christoffel(const MetricField& a, const Point& x);

/// nabla_mu b_nu for the Levi-Civita connection of a, indexed [mu][nu].
Mat4d levi_civita_covariant_derivative_oneform(const MetricField& a, const OneFormField& b, const Point& x);

Vec4d raise_index(const MetricField& a, const Point& x, const Vec4d& covector);
Vec4d lower_index(const MetricField& a, const Point& x, const Vec4d& vector);

/// <b,b> = a^{mu nu} b_mu b_nu
double oneform_norm_squared(const MetricField& a, const OneFormField& b, const Point& x);

/// |b| = sqrt(|<b,b>|) with first and second coordinate derivatives.
Scalar2Jet oneform_norm_jet(const MetricField& a, const OneFormField& b, const Point& x);

/// Partial derivatives partial_mu b_nu, indexed [mu][nu].
Mat4d oneform_derivative(const OneFormField& b, const Point& x);

/// Symmetry (to 1e-12 relative) and nondegeneracy of a(x); throws on failure.
void check_metric(const MetricField& a, const Point& x);

/// Seed the chart coordinates (jet variables 0..3) with the given values.
template <class S>
Vec4<S> seed_coordinates(const Vec4d& x) {
  Vec4<S> r;
  for (std::size_t i = 0; i < kDim; ++i) r[i] = make_variable<S>(x[i], i);
  return r;
}

/// Seed the velocities (jet variables 4..7).
template <class S>
Vec4<S> seed_velocities(const Vec4d& v) {
  Vec4<S> r;
  for (std::size_t i = 0; i < kDim; ++i) r[i] = make_variable<S>(v[i], kDim + i);
  return r;
}

}  // namespace finsmet
