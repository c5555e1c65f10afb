#include "fraclab/specfun.hpp"

#include <cmath>
#include <numbers>

#include "quad.hpp"

namespace fraclab::specfun {

using std::numbers::pi;

double gamma(double x) {
  if (!std::isfinite(x)) throw DomainError("gamma: non-finite argument");
  if (x <= 0.0 && x == std::floor(x)) throw DomainError("gamma: pole at non-positive integer");
  return std::tgamma(x);
}

double beta(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw DomainError("beta: arguments must be positive");
  if (a + b < 150.0) return gamma(a) * gamma(b) / gamma(a + b);
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

double bessel_k(double s, double t) {
  if (!(t > 0.0)) throw DomainError("bessel_k: argument must be positive");
  if (!(s >= 0.0)) throw DomainError("bessel_k: order must be non-negative");
  if (t > 700.0) return 0.0;
  return std::cyl_bessel_k(s, t);
}

double sphere_measure(int n) {
  if (n < 1) throw DomainError("sphere_measure: n >= 1");
  return 2.0 * std::pow(pi, 0.5 * n) / gamma(0.5 * n);
}

double cns_closed(Dimension n, FracOrder s) {
  const double sv = s.value();
  const double nh = 0.5 * n.value();
  return std::pow(2.0, 2.0 * sv) * sv * gamma(nh + sv) / (std::pow(pi, nh) * gamma(1.0 - sv));
}

namespace {

// int_0^1 (1 - cos t) t^{-1-2s} dt = sum_k (-1)^{k+1} / ((2k)! (2k - 2s))
double inner_series(double s) {
  double term_fact = 1.0;  // 1/(2k)!
  double sum = 0.0;
  for (int k = 1; k < 40; ++k) {
    term_fact /= (2.0 * k - 1.0) * (2.0 * k);
    double t = term_fact / (2.0 * k - 2.0 * s);
    sum += (k % 2 == 1) ? t : -t;
    if (t < 1e-18) break;
  }
  return sum;
}

// Real part of int_T^inf e^{it} t^{-a} dt by the integration-by-parts series.
double cos_tail(double a, double T) {
  // I = i e^{iT} sum_k (-i)^k (a)_k T^{-a-k}
  double re = 0.0, im = 0.0;
  double poch = 1.0;
  double tk = std::pow(T, -a);
  double cr = 0.0, ci = 1.0;  // i * (-i)^k starting at k = 0
  for (int k = 0; k < 12; ++k) {
    re += cr * poch * tk;
    im += ci * poch * tk;
    poch *= a + k;
    tk /= T;
    // multiply (cr + i ci) by -i
    double nr = ci, ni = -cr;
    cr = nr;
    ci = ni;
  }
  // multiply by e^{iT}
  return re * std::cos(T) - im * std::sin(T);
}

// J1(s) = 2 int_0^inf (1 - cos t) t^{-1-2s} dt
double j1(double s, double tol, double& err_out) {
  const double a = 1.0 + 2.0 * s;
  double inner = inner_series(s);
  // int_1^inf cos t t^{-a} dt: Gauss-Kronrod on [1, 2 pi m], series beyond.
  const int periods = 64;
  const double T = 2.0 * pi * periods;
  double osc = 0.0, err = 0.0;
  double left = 1.0;
  for (int m = 1; m <= periods; ++m) {
    double right = 2.0 * pi * m;
    double e = 0.0;
    osc += detail::gauss_kronrod([a](double t) { return std::cos(t) * std::pow(t, -a); }, left, right,
                                 1e-15, &e);
    err += e;
    left = right;
  }
  osc += cos_tail(a, T);
  err_out = 2.0 * err;
  (void)tol;
  return 2.0 * (inner + 1.0 / (2.0 * s) - osc);
}

// A(n,s) = int_{R^{n-1}} (1+|eta|^2)^{-(n+2s)/2} d eta
double transverse_factor(int n, double s, double tol, double& err_out) {
  err_out = 0.0;
  if (n == 1) return 1.0;
  double e = 0.0;
  double ang = detail::tanh_sinh(
      [n, s](double th) { return std::pow(std::sin(th), n - 2) * std::pow(std::cos(th), 2.0 * s); }, 0.0,
      0.5 * pi, std::min(tol * 1e-2, 1e-10), &e);
  double sm = sphere_measure(n - 1);
  err_out = sm * e;
  return sm * ang;
}

}  // namespace

double cns_integral(Dimension n, FracOrder s, double tol) {
  if (!(tol > 0.0)) throw DomainError("cns_integral: tol must be positive");
  double ej = 0.0, ea = 0.0;
  double J = j1(s.value(), tol, ej);
  double A = transverse_factor(n.value(), s.value(), tol, ea);
  double integral = A * J;
  double rel_err = ej / std::fabs(J) + ea / std::fabs(A);
  if (!std::isfinite(integral) || rel_err > tol)
    throw ConvergenceError("cns_integral: quadrature could not reach the requested tolerance");
  return 1.0 / integral;
}

double zeta_tail(double p, double K) {
  // sum_{k>K} k^{-p} = int_K^inf - f(K)/2 - f'(K)/12 + f'''(K)/720 - ...
  double f = std::pow(K, -p);
  double integral = K * f / (p - 1.0);
  double d1 = -p * f / K;
  double d3 = -p * (p + 1.0) * (p + 2.0) * f / (K * K * K);
  double d5 = -p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) * f / std::pow(K, 5);
  return integral - 0.5 * f - d1 / 12.0 + d3 / 720.0 - d5 / 30240.0;
}

double zeta(double p) {
  if (!(p > 1.0)) throw DomainError("zeta: p > 1 required");
  const int K = 100000;
  KahanSum acc;
  for (int k = K; k >= 1; --k) acc.add(std::pow(static_cast<double>(k), -p));
  acc.add(zeta_tail(p, K));
  return acc.value();
}

double walk_normalizer(FracOrder s) { return 1.0 / zeta(1.0 + 2.0 * s.value()); }

}  // namespace fraclab::specfun
