#pragma once

#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/evolution.hpp"
#include "fraclab/field.hpp"

namespace fraclab::variational {

// Allen-Cahn energy on B_R = (-R, R) with u frozen to `exterior` outside. The interior is cut into
// `cells` equal cells (a power of two); u is piecewise constant on them, and the exterior is sampled on cells of the
// same size out to R + margin, then held at its value there.
struct ACProblem {
  double R = 10.0;
  int cells = 64;
  Fn1 exterior;
  double s = 0.25;
  evolution::DoubleWell W = evolution::DoubleWell::allen_cahn();
  double margin = 0.0;  // 0: R

  void validate() const;
  double h() const { return 2.0 * R / cells; }
  PeriodicGrid grid() const;  // cell centres
};

struct ACEnergy {
  double potential = 0.0;
  double kinetic = 0.0;
  double total() const { return potential + kinetic; }
};

ACEnergy ac_energy(const SampledField& u, const ACProblem& prob);

struct ACResult {
  SampledField u;
  std::vector<double> energy;     // one entry per accepted iterate, starting with the initial guess
  std::vector<double> grad_norm;  // sup of the projected gradient divided by h
  int iterations = 0;
};

// Projected gradient descent with backtracking; u0 defaults to the clamped exterior data.
ACResult ac_minimize(const ACProblem& prob, double tol = 1e-8, int max_iter = 100000, const SampledField* u0 = nullptr);

// (-Delta)^s w + w = w^p on a periodic window, n = 1.
struct GroundStateProblem {
  double s = 0.5;
  double p = 2.0;
  double period = 400.0;
  int points = 16384;

  GroundStateProblem(double s, double p, double period = 400.0, int points = 16384);
  static double critical_exponent(double s);  // 2*_s in one dimension
};

struct GroundState {
  SampledField w;
  double residual = 0.0;
  double multiplier = 1.0;  // stabilizing factor at the last step, 1 at the fixed point
  int iterations = 0;
};

// One renormalized step, symmetrized about 0.
SampledField petviashvili_step(const SampledField& w, const GroundStateProblem& prob, double* multiplier = nullptr);
double ground_state_residual(const SampledField& w, const GroundStateProblem& prob);
GroundState ground_state(const GroundStateProblem& prob, double tol = 1e-10, int max_iter = 5000);

// Least-squares slope of log w against log x over grid points with lo <= x <= hi.
double decay_fit(const SampledField& w, double lo, double hi);

}  // namespace fraclab::variational
