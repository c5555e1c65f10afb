#pragma once

#include "fraclab/common.hpp"

namespace fraclab::specfun {

double gamma(double x);
double beta(double a, double b);
double bessel_k(double s, double t);

// C(n,s) = 2^{2s} s Gamma(n/2+s) / (pi^{n/2} Gamma(1-s))
double cns_closed(Dimension n, FracOrder s);

// Reciprocal of the Fourier integral of (1 - cos w1)/|w|^{n+2s}.
double cns_integral(Dimension n, FracOrder s, double tol);

// 1/zeta(1+2s)
double walk_normalizer(FracOrder s);

// Measure of the unit sphere in R^n (so 2 for n = 1).
double sphere_measure(int n);

// Tail sum_{k > K} k^{-p}, Euler-Maclaurin.
double zeta_tail(double p, double K);

double zeta(double p);

}  // namespace fraclab::specfun
