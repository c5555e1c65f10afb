#include "fraclab/extension.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/fraclap.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::extension {

using std::numbers::pi;

namespace {

double norm_const(double s) { return 1.0 / (std::pow(2.0, s - 1.0) * specfun::gamma(s)); }

double g_exact(double s, double t) {
  if (t == 0.0) return 1.0;
  return norm_const(s) * std::pow(t, s) * specfun::bessel_k(s, t);
}

// (t^s K_s)' = -t^s K_{s-1} = -t^s K_{1-s}
double dg_exact(double s, double t) { return -norm_const(s) * std::pow(t, s) * specfun::bessel_k(1.0 - s, t); }

// Values on a uniform grid in ln t with spacing d; returns max |D^2 f + (a-1) D f - q_i f| on interior nodes.
double log_residual(const std::vector<double>& f, const std::vector<double>& q, double a, double d) {
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < f.size(); ++i) {
    double D1 = (-f[i + 2] + 8 * f[i + 1] - 8 * f[i - 1] + f[i - 2]) / (12 * d);
    double D2 = (-f[i + 2] + 16 * f[i + 1] - 30 * f[i] + 16 * f[i - 1] - f[i - 2]) / (12 * d * d);
    worst = std::max(worst, std::fabs(D2 + (a - 1.0) * D1 - q[i] * f[i]));
  }
  return worst;
}

// Simpson in ln t of f(t) t, plus the analytic piece on (0, t0)
double log_simpson(const std::vector<double>& t, const std::vector<double>& f, double d) {
  std::size_t n = t.size();
  if (n % 2 == 0) --n;  // odd node count
  KahanSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    double w = (i == 0 || i + 1 == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc.add(w * f[i] * t[i]);
  }
  return acc.value() * d / 3.0;
}

}  // namespace

double ExtensionProfile::operator()(double x) const {
  if (!(x >= 0.0) || x > t_max()) throw DomainError("extension profile: argument outside the profile range");
  return g_exact(s, x);
}

double ExtensionProfile::derivative(double x) const {
  if (!(x > 0.0) || x > t_max()) throw DomainError("extension profile: argument outside the profile range");
  return dg_exact(s, x);
}

ExtensionProfile profile_g(FracOrder s, double t_max, double tol) {
  if (!(t_max >= 50.0)) throw DomainError("profile_g: t_max must be at least 50");
  if (!(tol > 0.0)) throw DomainError("profile_g: tol must be positive");
  ExtensionProfile p;
  p.s = s.value();
  p.a = 1.0 - 2.0 * p.s;
  const double d = std::log(10.0) / profile_nodes_per_decade;
  const int n = static_cast<int>(std::ceil(std::log(t_max / profile_t_min) / d)) + 1;
  p.t.resize(n);
  p.g.resize(n);
  p.dg.resize(n);
  // uniform in ln t; the last node lands at or just past t_max
  for (int i = 0; i < n; ++i) {
    p.t[i] = profile_t_min * std::exp(i * d);
    p.g[i] = g_exact(p.s, p.t[i]);
    p.dg[i] = dg_exact(p.s, p.t[i]);
  }
  p.residual = ode_residual(p);
  if (p.residual > tol) throw ConvergenceError("profile_g: ODE residual above tolerance");
  for (int i = 0; i < n; ++i)
    if (p.g[i] < 0.0 || p.g[i] > 1.0 || p.dg[i] > 0.0) throw ConvergenceError("profile_g: profile outside [0,1] or increasing");
  p.c_sharp = c_sharp(p);
  // g(0) = 1 through the Holder bound at the first node, decay at the last
  const double t0 = p.t.front();
  if (1.0 - p.g.front() > 1.01 * p.c_sharp * std::pow(t0, 2.0 * p.s) / (2.0 * p.s) + 1e-14 || p.g.back() > 1e-12)
    throw ConvergenceError("profile_g: boundary values not met");
  return p;
}

namespace {

double richardson_limit(const ExtensionProfile& p, int first) {
  const double e = 2.0 - 2.0 * p.s;
  Eigen::Matrix3d M;
  Eigen::Vector3d rhs;
  for (int i = 0; i < 3; ++i) {
    double t = p.t[first + i];
    M(i, 0) = 1.0;
    M(i, 1) = std::pow(t, e);
    M(i, 2) = t * t;
    rhs[i] = -std::pow(t, p.a) * p.dg[first + i];
  }
  return M.fullPivLu().solve(rhs)[0];
}

}  // namespace

double c_sharp(const ExtensionProfile& p) {
  if (p.t.size() < 4) throw DomainError("c_sharp: profile too short");
  double v = richardson_limit(p, 0);
  // the same fit one node further out must agree
  double w = richardson_limit(p, 1);
  if (!std::isfinite(v) || v <= 0.0 || std::fabs(v - w) > 1e-8 * v) throw ConvergenceError("c_sharp: unstable extrapolation");
  return v;
}

double ode_residual(const ExtensionProfile& p) {
  const double d = std::log(p.t[1] / p.t[0]);
  std::vector<double> q(p.t.size());
  for (std::size_t i = 0; i < q.size(); ++i) q[i] = p.t[i] * p.t[i];
  return log_residual(p.g, q, p.a, d);
}

double harmonicity_residual(const ExtensionProfile& p, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("harmonicity_residual: kappa must be positive");
  const double d = std::log(p.t[1] / p.t[0]);
  std::vector<double> U(p.t.size()), q(p.t.size());
  for (std::size_t i = 0; i < U.size(); ++i) {
    double y = p.t[i] / kappa;
    U[i] = p(kappa * y);
    q[i] = kappa * kappa * y * y;
  }
  return log_residual(U, q, p.a, d);
}

double profile_energy(const ExtensionProfile& p) {
  const double d = std::log(p.t[1] / p.t[0]);
  std::vector<double> f(p.t.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::pow(p.t[i], p.a) * (p.g[i] * p.g[i] + p.dg[i] * p.dg[i]);
  const double t0 = p.t[0], C = p.c_sharp;
  // g ~ 1, t^a g' ~ -C below the first node
  double head = std::pow(t0, 1.0 + p.a) / (1.0 + p.a) + C * C * std::pow(t0, 1.0 - p.a) / (1.0 - p.a);
  return head + log_simpson(p.t, f, d);
}

double mode_energy(const ExtensionProfile& p, double kappa) {
  if (!(kappa > 0.0)) throw DomainError("mode_energy: kappa must be positive");
  const double d = std::log(p.t[1] / p.t[0]);
  std::vector<double> y(p.t.size()), f(p.t.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    y[i] = p.t[i] / kappa;
    double U = p.g[i], Uy = kappa * p.dg[i];
    f[i] = std::pow(y[i], p.a) * (Uy * Uy + kappa * kappa * U * U);
  }
  const double y0 = y[0], C = p.c_sharp;
  // U ~ 1, y^a U_y ~ -C kappa^{2s} near 0
  double k2s = std::pow(kappa, 2.0 * p.s);
  double head = kappa * kappa * std::pow(y0, 1.0 + p.a) / (1.0 + p.a) + C * C * k2s * k2s * std::pow(y0, 1.0 - p.a) / (1.0 - p.a);
  return head + log_simpson(y, f, d);
}

SampledField extend(const SampledField& u, const ExtensionProfile& p, double y) {
  if (!(y >= 0.0)) throw DomainError("extend: y must be nonnegative");
  if (y == 0.0) return u;
  double rmax = 0.0;
  for (std::size_t k = 0; k < u.grid.size(); ++k) rmax = std::max(rmax, u.grid.frequency_norm(k));
  if (2.0 * pi * rmax * y > p.t_max()) throw DomainError("extend: profile does not cover the highest frequency");
  return fraclap::apply_radial_multiplier(u, [&p, y](double r) { return p(2.0 * pi * r * y); });
}

namespace {

ExtensionProfile profile_for(const SampledField& u, FracOrder s, double y) {
  double rmax = 0.0;
  for (std::size_t k = 0; k < u.grid.size(); ++k) rmax = std::max(rmax, u.grid.frequency_norm(k));
  return profile_g(s, std::max(60.0, 2.0 * pi * rmax * y * 1.01));
}

}  // namespace

SampledField extend(const SampledField& u, FracOrder s, double y) { return extend(u, profile_for(u, s, y), y); }

SampledField neumann_trace(const SampledField& u, const ExtensionProfile& p, double y) {
  if (!(y > 0.0)) throw DomainError("neumann_trace: y_probe must be positive");
  const double s = p.s;
  const double ys[3] = {0.5 * y, y, 2.0 * y};
  Eigen::Matrix3d M;
  for (int i = 0; i < 3; ++i) {
    M(i, 0) = std::pow(ys[i], 2.0 * s);
    M(i, 1) = ys[i] * ys[i];
    M(i, 2) = std::pow(ys[i], 2.0 + 2.0 * s);
  }
  // first row of M^{-1}: A = sum_i w_i (U(y_i) - u)
  Eigen::Matrix3d Minv = M.inverse();
  // Work mode by mode so the difference U - u never cancels in physical space.
  return fraclap::apply_radial_multiplier(u, [&](double r) {
    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
      double t = 2.0 * pi * r * ys[i];
      if (t > p.t_max()) throw DomainError("neumann_trace: profile does not cover the highest frequency");
      double gm1 = (t == 0.0) ? 0.0 : p(t) - 1.0;
      acc += Minv(0, i) * gm1;
    }
    return -2.0 * s * acc;
  });
}

SampledField neumann_trace(const SampledField& u, FracOrder s, double y) {
  return neumann_trace(u, profile_for(u, s, 2.0 * y), y);
}

}  // namespace fraclab::extension
