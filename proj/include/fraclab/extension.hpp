#pragma once

#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/field.hpp"

namespace fraclab::extension {

// g(t) = t^s K_s(t) / (2^{s-1} Gamma(s)), the bounded decaying solution of g'' + (a/t) g' = g, g(0) = 1.
struct ExtensionProfile {
  double s = 0.5;
  double a = 0.0;              // 1 - 2s
  std::vector<double> t;       // log-spaced nodes
  std::vector<double> g;
  std::vector<double> dg;      // g'
  double c_sharp = 0.0;
  double residual = 0.0;       // max ODE residual on interior nodes

  double t_max() const { return t.back(); }
  double operator()(double t) const;  // direct evaluation, range checked
  double derivative(double t) const;
};

inline constexpr int profile_nodes_per_decade = 96;
inline constexpr double profile_t_min = 1e-8;

ExtensionProfile profile_g(FracOrder s, double t_max = 60.0, double tol = 1e-6);

// -lim_{t->0} t^a g'(t), Richardson over the three smallest nodes
double c_sharp(const ExtensionProfile& p);

// max over interior nodes of |D^2 g + (a-1) D g - t^2 g|, D = t d/dt, by 5-point differences
double ode_residual(const ExtensionProfile& p);
// Same for U(y) = g(kappa y) sampled on y = t/kappa: D^2 U + (a-1) D U - kappa^2 y^2 U.
double harmonicity_residual(const ExtensionProfile& p, double kappa);

// int_0^inf t^a (g^2 + g'^2) dt
double profile_energy(const ExtensionProfile& p);
// int_0^inf y^a (|d_y U|^2 + kappa^2 |U|^2) dy for U(y) = g(kappa y)
double mode_energy(const ExtensionProfile& p, double kappa);

// U(., y): multiplier g(2 pi |xi| y)
SampledField extend(const SampledField& u, const ExtensionProfile& p, double y);
SampledField extend(const SampledField& u, FracOrder s, double y);

// -y^a d_y U at y -> 0, from U(y/2), U(y), U(2y) fitted in the powers y^{2s}, y^2, y^{2+2s}
SampledField neumann_trace(const SampledField& u, const ExtensionProfile& p, double y_probe = 1e-3);
SampledField neumann_trace(const SampledField& u, FracOrder s, double y_probe = 1e-3);

}  // namespace fraclab::extension
