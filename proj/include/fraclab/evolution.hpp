#pragma once

#include <functional>
#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/field.hpp"

namespace fraclab::evolution {

struct DoubleWell {
  Fn1 W;
  Fn1 dW;
  double W2_0 = 1.0;  // curvature at the wells

  // (1 - cos 2 pi u) / (4 pi^2): period one, W''(0) = 1
  static DoubleWell peierls_nabarro();
  // (u^2 - 1)^2 / 4: wells at -1 and 1, W''(+-1) = 2
  static DoubleWell allen_cahn();
  void validate_periodic() const;
  // W(1/2 + d) == W(1/2 - d) on samples
  bool symmetric() const;
  double max_curvature() const;  // sup |W''| over [0,1], by differences of W'
};

// e^{-(2 pi |xi|)^{2s} t} multiplier
SampledField heat_evolve(const SampledField& f, double s, double t);

struct LayerProfile {
  std::vector<double> x;  // uniform nodes, centered so u(0) = 1/2
  std::vector<double> u;
  double s = 0.5;
  double W2_0 = 1.0;
  double residual = 0.0;
  int iterations = 0;
  double tail_left = 0.0;   // u ~ tail_left |x|^{-2s} left of the window
  double tail_right = 0.0;  // 1 - u ~ tail_right x^{-2s} right of the window

  // Cubic interpolation inside the window, fitted tails outside.
  double operator()(double y) const;
  double tail_constant() const;  // leading asymptotics: 1 - u ~ tail_constant * x^{-2s}
};

LayerProfile layer_solution(FracOrder s, const DoubleWell& W, double half_width = 50.0, double tol = 1e-9,
                            int cells = 2000, int max_iter = 100000);

// 1 / int (u')^2
double gamma_const(const LayerProfile& layer);

struct DislocationState {
  std::vector<double> x;  // strictly increasing
  std::vector<int> xi;    // +-1
  double s = 0.5;
  double gamma = 1.0;
  std::function<double(double, double)> sigma;  // (t, x); empty means zero
  double interaction = 1.0;                      // multiplies the pair force
  void validate() const;
};

// Pair-force factor that makes the particle system the limit of the layer PDE under the
// C(1,s)-normalized operator.
double interaction_constant(FracOrder s);

struct CollisionEvent {
  int i = 0;
  int j = 0;
  double t = 0.0;
};

struct DislocationTrajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;
  std::vector<CollisionEvent> events;
  std::vector<double> sample_times;  // requested times reached before halting
  std::vector<std::vector<double>> samples;
  bool collided() const { return !events.empty(); }
};

inline constexpr double collision_threshold = 1e-8;

DislocationTrajectory dislocation_evolve(const DislocationState& state, double T, double tol = 1e-10,
                                         const std::vector<double>& sample_times = {});

struct PnSnapshot {
  double t = 0.0;
  SampledField v;
};

struct PnOptions {
  double dt = 0.0;  // 0: largest admissible step
  int jump = 0;     // v(x + P) - v(x); derived from v0 when zero
  bool derive_jump = true;
};

double pn_max_step(double eps, double s, const DoubleWell& W);

// d_t v = (1/eps) (-(-Delta)^s v - eps^{-2s} W'(v) + sigma), 1D, v - jump (x - o) / P periodic.
std::vector<PnSnapshot> pn_evolve(const SampledField& v0, double eps, FracOrder s,
                                  const std::function<double(double, double)>& sigma, const DoubleWell& W,
                                  const std::vector<double>& times, const PnOptions& opt = {});

// Points where a 1D field crosses level, by linear interpolation between nodes.
std::vector<double> level_crossings(const SampledField& v, double level);

}  // namespace fraclab::evolution
