#pragma once
// Thin wrappers over Boost.Math quadrature used throughout the library.

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>

namespace fraclab::detail {

template <int N, class F>
double gauss(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, N>::integrate(f, a, b);
}

// Double-exponential rule; tolerates integrable endpoint singularities.
template <class F>
double tanh_sinh(F&& f, double a, double b, double tol = 1e-13, double* err = nullptr) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  if (a == b) {
    if (err) *err = 0.0;
    return 0.0;
  }
  if (std::fabs(b - a) < 1e-11 * std::max(std::fabs(a), std::fabs(b))) {
    // too narrow for the rule's abscissae to separate from the endpoints
    if (err) *err = 0.0;
    return gauss<7>(f, a, b);
  }
  double e = 0.0, l1 = 0.0;
  auto g = [&](double x) { return f(x); };
  double v = rule.integrate(g, a, b, tol, &e, &l1);
  if (err) *err = e * std::max(1.0, l1);
  return v;
}

// Same with complement distances, for integrands singular at a or b.
template <class F>
double tanh_sinh_c(F&& f, double a, double b, double tol = 1e-13, double* err = nullptr) {
  thread_local boost::math::quadrature::tanh_sinh<double> rule(15);
  if (a == b) {
    if (err) *err = 0.0;
    return 0.0;
  }
  double e = 0.0, l1 = 0.0;
  // g(x, xc): xc is the distance to the nearer endpoint, signed per boost convention.
  auto g = [&](double x, double xc) { return f(x, xc); };
  double v = rule.integrate(g, a, b, tol, &e, &l1);
  if (err) *err = e * std::max(1.0, l1);
  return v;
}

template <class F>
double gauss_kronrod(F&& f, double a, double b, double tol, double* err = nullptr) {
  double e = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 12, tol, &e);
  if (err) *err = e;
  return v;
}

}  // namespace fraclab::detail
