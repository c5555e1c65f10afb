#pragma once

#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/field.hpp"

namespace fraclab::reference {

struct HalfLineConstant {
  double s = 0.5;
  double c_s = 0.0;
};

// c_s = -(-Delta)^s x_+^s evaluated at x = -1 by quadrature.
HalfLineConstant halfline_constant(FracOrder s);

// 0 on x > 0, -c_s |x|^{-s} on x < 0.
double halfline_fraclap(double x, FracOrder s, const HalfLineConstant& c);

// Value of (-Delta)^s (1-|x|^2)^s_+ inside the unit ball: C(n,s) B(1-s,s) |dB_1| / 2.
double ball_constant(Dimension n, FracOrder s);

// int_0^1 ((1+t)^s + (1-t)^s - 2) t^{-1-2s} dt + int_1^inf (1+t)^s t^{-1-2s} dt
double lemma_l1_lhs(FracOrder s, double tol);

// Heat kernel of (-Delta)^s for s = 1 (Gaussian) and s = 1/2 (Poisson).
double heat_kernel(const std::vector<double>& x, double t, double s);

struct CoareaTerms {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Both sides of the generalized coarea formula with kernel |x-y|^{-(n+s)} on the grid window.
CoareaTerms coarea_terms(const SampledField& u, double s);
double coarea_gap(const SampledField& u, double s);

// ||u||_{L^{np/(n-sp)}} / [u]_{W^{s,p}}, u extended by zero outside the grid window.
double sobolev_ratio(const SampledField& u, double s, double p);

struct UncertaintyTerms {
  double lhs = 0.0;          // ||(-Delta)^{(s-1)/4} u||^2
  double x_norm = 0.0;       // || |x| u ||
  double grad_norm = 0.0;    // || grad (-Delta)^{(s-1)/2} u ||
  double rhs = 0.0;          // 2/(n+s-1) * x_norm * grad_norm
};

UncertaintyTerms uncertainty_terms(const SampledField& u, double s);
double uncertainty_gap(const SampledField& u, double s);

}  // namespace fraclab::reference
