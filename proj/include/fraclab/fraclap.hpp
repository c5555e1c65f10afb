#pragma once

#include <functional>
#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/field.hpp"

namespace fraclab::fraclap {

// ---- spectral ----

using Multiplier = std::function<double(const std::vector<double>& xi)>;

SampledField apply_multiplier(const SampledField& f, const Multiplier& m);
// Radial multipliers m(|xi|) avoid the vector allocation.
SampledField apply_radial_multiplier(const SampledField& f, const std::function<double(double)>& m);

// Multiplier (2 pi |xi|)^{2s}; s may equal 1 (classical -Laplacian).
SampledField fraclap_spectral(const SampledField& f, double s);

// Multiplier k tanh(k), k = 2 pi |xi|.
SampledField waterwave_apply(const SampledField& f);

// ---- singular integral ----

enum class TailModel {
  zero,      // u vanishes beyond R
  constant,  // u equals tail_value beyond R
  mapped     // integrate to infinity with y = R / v (u only needs to be bounded by a power < 2s)
};

struct QuadratureParams {
  double inner_radius = 1e-3;
  double outer_radius = 100.0;
  int points_per_decade = 4;
  TailModel tail = TailModel::mapped;
  double tail_value = 0.0;
  double tol = 1e-12;
  // Points of R^1 where u is not smooth; panels are split there.
  std::vector<double> kinks;
  // n >= 2: distances along the line x + t e where u is not smooth.
  std::function<std::vector<double>(const std::vector<double>& x, const std::vector<double>& e)> line_kinks;
  int angles = 64;  // angular nodes on the half circle (n = 2)

  void validate() const;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  bool tail_mismatch = false;
};

QuadratureResult fraclap_quadrature_ex(const Fn1& u, double x, FracOrder s, const QuadratureParams& q);
double fraclap_quadrature(const Fn1& u, double x, FracOrder s, const QuadratureParams& q);
// n = 2 by the angular reduction.
QuadratureResult fraclap_quadrature_nd(const FnN& u, const std::vector<double>& x, FracOrder s,
                                       const QuadratureParams& q);

// ---- heat semigroup ----

enum class SemigroupTail {
  bounded,  // U(x,t) tends to a constant
  decaying  // U(x,t) ~ M (4 pi t)^{-n/2}
};

struct TimeGrid {
  double t_min = 1e-8;
  double t_max = 1e8;
  int panels_per_decade = 2;
  SemigroupTail tail = SemigroupTail::decaying;
  double tol = 1e-6;
  std::vector<double> kinks;  // 1D non-smooth points of u
};

struct SemigroupResult {
  double value = 0.0;
  double error = 0.0;
};

SemigroupResult fraclap_semigroup_ex(const Fn1& u, double x, FracOrder s, const TimeGrid& tg);
double fraclap_semigroup(const Fn1& u, double x, FracOrder s, const TimeGrid& tg);
// U(x,t) = int G_t(x-y) u(y) dy in one dimension.
double heat_average(const Fn1& u, double x, double t, const std::vector<double>& kinks);

// ---- exterior Dirichlet problem on an interval ----

struct ExteriorProblem {
  double a = 0.0, b = 1.0;
  int cells = 256;  // h = (b - a) / cells; interior nodes 1..cells-1
  Fn1 exterior_data;
  Fn1 rhs;
  double s = 0.5;
  int margin_cells = -1;  // exterior nodes kept on the lattice each side; default = cells
};

struct DirichletSolution {
  std::vector<double> x;  // interior nodes
  std::vector<double> u;
};

// Discrete operator on the interior nodes: A u = b_ext + rhs.
struct DirichletSystem {
  std::vector<double> x;
  std::vector<double> matrix;  // dense row-major (m x m)
  std::vector<double> exterior_load;
  int m = 0;
};

DirichletSystem assemble_dirichlet(double a, double b, int cells, double s, const Fn1& exterior, int margin);
DirichletSolution dirichlet_solve(const ExteriorProblem& p);

// Weights w_k (k = 1..K) of the lattice operator L u_i = C sum_k w_k (2u_i - u_{i+k} - u_{i-k}) on
// spacing h; w_K covers only the half hat (K-1)h..Kh. total = sum of all weights on [0, inf).
std::vector<double> lattice_weights(double s, double h, int K);
double lattice_weight_total(double s, double h);

}  // namespace fraclab::fraclap
