#include "fraclab/evolution.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/fraclap.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::evolution {

using std::numbers::pi;

DoubleWell DoubleWell::peierls_nabarro() {
  DoubleWell w;
  w.W = [](double u) { return (1.0 - std::cos(2.0 * pi * u)) / (4.0 * pi * pi); };
  w.dW = [](double u) { return std::sin(2.0 * pi * u) / (2.0 * pi); };
  w.W2_0 = 1.0;
  return w;
}

DoubleWell DoubleWell::allen_cahn() {
  DoubleWell w;
  w.W = [](double u) { return 0.25 * (u * u - 1.0) * (u * u - 1.0); };
  w.dW = [](double u) { return u * u * u - u; };
  w.W2_0 = 2.0;
  return w;
}

void DoubleWell::validate_periodic() const {
  if (!W || !dW) throw DomainError("DoubleWell: W and W' required");
  if (!(W2_0 > 0.0)) throw DomainError("DoubleWell: W''(0) must be positive");
  if (std::fabs(W(0.0)) > 1e-12) throw DomainError("DoubleWell: W(0) must vanish");
  for (int k = 0; k <= 20; ++k) {
    double u = -1.0 + 0.1 * k + 0.0123;
    if (std::fabs(W(u + 1.0) - W(u)) > 1e-10 * std::max(1.0, std::fabs(W(u))))
      throw DomainError("DoubleWell: W is not 1-periodic");
  }
}

bool DoubleWell::symmetric() const {
  for (int k = 1; k <= 50; ++k) {
    double d = 0.01 * k;
    if (std::fabs(W(0.5 + d) - W(0.5 - d)) > 1e-12 * std::max(1.0, std::fabs(W(0.5 + d)))) return false;
  }
  return true;
}

double DoubleWell::max_curvature() const {
  const double d = 1e-5;
  double m = std::fabs(W2_0);
  for (int k = 0; k <= 1000; ++k) {
    double u = 1e-3 * k;
    m = std::max(m, std::fabs((dW(u + d) - dW(u - d)) / (2 * d)));
  }
  return m;
}

SampledField heat_evolve(const SampledField& f, double s, double t) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("heat_evolve: s in (0,1]");
  if (!(t >= 0.0)) throw DomainError("heat_evolve: t must be nonnegative");
  if (t == 0.0) return f;
  return fraclap::apply_radial_multiplier(f, [s, t](double r) { return std::exp(-t * std::pow(2.0 * pi * r, 2.0 * s)); });
}

// ---- layer ----

double LayerProfile::tail_constant() const {
  return specfun::cns_closed(Dimension(1), FracOrder(s)) / (2.0 * s * W2_0);
}

double LayerProfile::operator()(double y) const {
  const std::size_t m = x.size();
  const double h = x[1] - x[0];
  const double lo = x.front() - h, hi = x.back() + h;
  if (y <= lo) return tail_left * std::pow(-y, -2.0 * s);
  if (y >= hi) return 1.0 - tail_right * std::pow(y, -2.0 * s);
  // nodes extended by the exterior values
  auto val = [&](long i) {
    if (i < 0) return tail_left * std::pow(-(x.front() + h * i), -2.0 * s);
    if (i >= static_cast<long>(m)) return 1.0 - tail_right * std::pow(x.front() + h * i, -2.0 * s);
    return u[i];
  };
  double q = (y - x.front()) / h;
  long i = static_cast<long>(std::floor(q));
  double t = q - i;
  double p0 = val(i - 1), p1 = val(i), p2 = val(i + 1), p3 = val(i + 2);
  // Catmull-Rom
  double m1 = 0.5 * (p2 - p0), m2 = 0.5 * (p3 - p1);
  double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * p1 + (t3 - 2 * t2 + t) * m1 + (-2 * t3 + 3 * t2) * p2 + (t3 - t2) * m2;
}

LayerProfile layer_solution(FracOrder s, const DoubleWell& W, double half_width, double tol, int cells,
                            int max_iter) {
  if (!(half_width >= 50.0)) throw DomainError("layer_solution: window half-width must be at least 50");
  if (!(tol > 0.0)) throw DomainError("layer_solution: tol must be positive");
  if (cells < 8 || cells % 2) throw DomainError("layer_solution: cells must be even");
  if (!W.dW || !(W.W2_0 > 0.0)) throw DomainError("layer_solution: invalid potential");
  const double sv = s.value();
  LayerProfile prof;
  prof.s = sv;
  prof.W2_0 = W.W2_0;
  // Exterior data K_l |x|^{-2s} on the left and 1 - K_r x^{-2s} on the right; the amplitudes are
  // refitted so the exterior meets the interior solution at the window edges.
  Fn1 one = [](double x) { return x > 0 ? 1.0 : 0.0; };
  Fn1 left = [sv](double x) { return x < 0 ? std::pow(-x, -2.0 * sv) : 0.0; };
  Fn1 right = [sv](double x) { return x > 0 ? -std::pow(x, -2.0 * sv) : 0.0; };
  auto sys = fraclap::assemble_dirichlet(-half_width, half_width, cells, sv, one, -1);
  auto load_l = fraclap::assemble_dirichlet(-half_width, half_width, cells, sv, left, -1).exterior_load;
  auto load_r = fraclap::assemble_dirichlet(-half_width, half_width, cells, sv, right, -1).exterior_load;
  const int m = sys.m;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(sys.matrix.data(), m, m);
  Eigen::Map<Eigen::VectorXd> b1(sys.exterior_load.data(), m), bl(load_l.data(), m), br(load_r.data(), m);
  const double c = W.max_curvature();
  Eigen::MatrixXd M = A;
  M.diagonal().array() += c;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);

  const bool sym = W.symmetric();
  const double edge = std::pow(half_width, 2.0 * sv);
  double Kl = prof.tail_constant(), Kr = Kl;
  Eigen::VectorXd u(m), f(m), r(m), b(m);
  for (int i = 0; i < m; ++i) u[i] = 0.5 + std::atan(sys.x[i]) / pi;
  int it = 0;
  double res = 0.0;
  for (;; ++it) {
    b = b1 + Kl * bl + Kr * br;
    for (int i = 0; i < m; ++i) f[i] = W.dW(u[i]);
    r.noalias() = A * u;
    r += f - b;
    res = r.cwiseAbs().maxCoeff();
    if (!std::isfinite(res)) throw DivergenceError("layer_solution: iteration diverged");
    double Kl_new = std::max(0.0, 2.0 * u[0] - u[1]) * edge;
    double Kr_new = std::max(0.0, 1.0 - (2.0 * u[m - 1] - u[m - 2])) * edge;
    double dK = std::max(std::fabs(Kl_new - Kl), std::fabs(Kr_new - Kr)) / edge;
    if (res < tol && dK < tol) break;
    if (it >= max_iter) throw ConvergenceError("layer_solution: residual did not reach tol");
    Kl = Kl_new;
    Kr = Kr_new;
    if (sym) Kl = Kr = 0.5 * (Kl + Kr);
    b = b1 + Kl * bl + Kr * br;
    Eigen::VectorXd rhs = b + c * u - f;
    u = lu.solve(rhs);
    if (sym)
      for (int i = 0; i < m / 2; ++i) {
        double a = 0.5 * (u[i] + 1.0 - u[m - 1 - i]);
        u[i] = a;
        u[m - 1 - i] = 1.0 - a;
      }
  }
  prof.tail_left = Kl;
  prof.tail_right = Kr;
  prof.u.assign(u.data(), u.data() + m);
  prof.x = sys.x;
  prof.residual = res;
  prof.iterations = it;
  // recenter at the 1/2 crossing
  for (int i = 0; i + 1 < m; ++i)
    if (prof.u[i] <= 0.5 && prof.u[i + 1] >= 0.5) {
      double d = prof.u[i + 1] - prof.u[i];
      double xc = d > 0 ? prof.x[i] + (0.5 - prof.u[i]) / d * (prof.x[i + 1] - prof.x[i]) : prof.x[i];
      if (std::fabs(xc) > 1e-14)
        for (auto& x : prof.x) x -= xc;
      break;
    }
  return prof;
}

double gamma_const(const LayerProfile& layer) {
  const std::size_t m = layer.u.size();
  if (m < 3) throw DomainError("gamma_const: profile too short");
  const double h = layer.x[1] - layer.x[0];
  KahanSum acc;
  for (std::size_t i = 0; i < m; ++i) {
    double d;
    if (i == 0)
      d = (layer.u[1] - layer.u[0]) / h;
    else if (i + 1 == m)
      d = (layer.u[m - 1] - layer.u[m - 2]) / h;
    else
      d = (layer.u[i + 1] - layer.u[i - 1]) / (2 * h);
    double w = (i == 0 || i + 1 == m) ? 0.5 : 1.0;
    acc.add(w * d * d * h);
  }
  return 1.0 / acc.value();
}

// ---- particle system ----

void DislocationState::validate() const {
  if (x.empty()) throw DomainError("dislocations: empty state");
  if (xi.size() != x.size()) throw DomainError("dislocations: one orientation per position");
  for (int v : xi)
    if (v != 1 && v != -1) throw DomainError("dislocations: orientations are +-1");
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (!(x[i] < x[i + 1])) throw DomainError("dislocations: positions must be strictly increasing");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("dislocations: s in (0,1)");
  if (!(gamma > 0.0)) throw DomainError("dislocations: gamma must be positive");
}

double interaction_constant(FracOrder s) { return specfun::cns_closed(Dimension(1), s); }

namespace {

void velocity(const DislocationState& st, double t, const std::vector<double>& x, std::vector<double>& v) {
  const std::size_t N = x.size();
  const double e = 2.0 * st.s + 1.0;
  auto one = [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < N; ++j) {
      if (j == i) continue;
      double d = x[i] - x[j];
      acc += st.xi[i] * st.xi[j] * d / (2.0 * st.s * std::pow(std::fabs(d), e));
    }
    double sig = st.sigma ? st.sigma(t, x[i]) : 0.0;
    v[i] = st.gamma * (-st.xi[i] * sig + st.interaction * acc);
  };
  if (N >= 256)
    parallel_for(N, one);
  else
    for (std::size_t i = 0; i < N; ++i) one(i);
}

double min_gap(const std::vector<double>& x, std::size_t* at) {
  double g = INFINITY;
  for (std::size_t i = 0; i + 1 < x.size(); ++i)
    if (x[i + 1] - x[i] < g) {
      g = x[i + 1] - x[i];
      if (at) *at = i;
    }
  return g;
}

std::vector<double> hermite(const std::vector<double>& y0, const std::vector<double>& f0, const std::vector<double>& y1,
                            const std::vector<double>& f1, double h, double th) {
  std::vector<double> y(y0.size());
  double h00 = 2 * th * th * th - 3 * th * th + 1, h10 = th * th * th - 2 * th * th + th;
  double h01 = -2 * th * th * th + 3 * th * th, h11 = th * th * th - th * th;
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
  return y;
}

}  // namespace

DislocationTrajectory dislocation_evolve(const DislocationState& st, double T, double tol,
                                         const std::vector<double>& sample_times) {
  st.validate();
  if (!(T >= 0.0)) throw DomainError("dislocation_evolve: T must be nonnegative");
  if (!(tol > 0.0)) throw DomainError("dislocation_evolve: tol must be positive");
  for (std::size_t k = 0; k + 1 < sample_times.size(); ++k)
    if (sample_times[k] > sample_times[k + 1]) throw DomainError("dislocation_evolve: sample times must be sorted");
  static constexpr double c2 = 1. / 5, c3 = 3. / 10, c4 = 4. / 5, c5 = 8. / 9;
  static constexpr double a21 = 1. / 5, a31 = 3. / 40, a32 = 9. / 40, a41 = 44. / 45, a42 = -56. / 15, a43 = 32. / 9,
                          a51 = 19372. / 6561, a52 = -25360. / 2187, a53 = 64448. / 6561, a54 = -212. / 729,
                          a61 = 9017. / 3168, a62 = -355. / 33, a63 = 46732. / 5247, a64 = 49. / 176,
                          a65 = -5103. / 18656, b1 = 35. / 384, b3 = 500. / 1113, b4 = 125. / 192,
                          b5 = -2187. / 6784, b6 = 11. / 84;
  static constexpr double e1 = 71. / 57600, e3 = -71. / 16695, e4 = 71. / 1920, e5 = -17253. / 339200,
                          e6 = 22. / 525, e7 = -1. / 40;
  const std::size_t N = st.x.size();
  DislocationTrajectory out;
  std::vector<double> y = st.x, k1(N), k2(N), k3(N), k4(N), k5(N), k6(N), k7(N), yt(N), yn(N);
  double t = 0.0;
  out.t.push_back(t);
  out.x.push_back(y);
  std::size_t next_sample = 0;
  auto emit_samples = [&](double t0, double t1, const std::vector<double>& y0, const std::vector<double>& f0,
                          const std::vector<double>& y1, const std::vector<double>& f1) {
    while (next_sample < sample_times.size() && sample_times[next_sample] <= t1) {
      double ts = sample_times[next_sample];
      if (ts >= t0) {
        out.sample_times.push_back(ts);
        out.samples.push_back(t1 > t0 ? hermite(y0, f0, y1, f1, t1 - t0, (ts - t0) / (t1 - t0)) : y1);
      }
      ++next_sample;
    }
  };
  velocity(st, t, y, k1);
  emit_samples(0.0, 0.0, y, k1, y, k1);
  if (N == 1 && !st.sigma) {
    // nothing moves
    out.t.push_back(T);
    out.x.push_back(y);
    emit_samples(0.0, T, y, k1, y, k1);
    return out;
  }
  double h = std::min(T, 1e-3);
  if (h == 0.0) return out;
  // absolute control keeps the step sequence translation invariant
  auto err_norm = [&](const std::vector<double>& e) {
    double m = 0.0;
    for (std::size_t i = 0; i < N; ++i) m = std::max(m, std::fabs(e[i]) / tol);
    return m;
  };
  std::vector<double> err(N);
  while (t < T) {
    if (h < 1e-15 * std::max(1.0, t)) {
      std::size_t at = 0;
      min_gap(y, &at);
      out.events.push_back({static_cast<int>(at), static_cast<int>(at + 1), t});
      return out;
    }
    if (t + h > T) h = T - t;
    auto stage = [&](std::vector<double>& dst, std::initializer_list<std::pair<double, const std::vector<double>*>> terms) {
      for (std::size_t i = 0; i < N; ++i) {
        double v = y[i];
        for (auto& [c, k] : terms) v += h * c * (*k)[i];
        dst[i] = v;
      }
    };
    stage(yt, {{a21, &k1}});
    velocity(st, t + c2 * h, yt, k2);
    stage(yt, {{a31, &k1}, {a32, &k2}});
    velocity(st, t + c3 * h, yt, k3);
    stage(yt, {{a41, &k1}, {a42, &k2}, {a43, &k3}});
    velocity(st, t + c4 * h, yt, k4);
    stage(yt, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}});
    velocity(st, t + c5 * h, yt, k5);
    stage(yt, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}});
    velocity(st, t + h, yt, k6);
    stage(yn, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    bool ordered = true, finite = true;
    for (std::size_t i = 0; i < N; ++i) finite = finite && std::isfinite(yn[i]);
    for (std::size_t i = 0; i + 1 < N; ++i) ordered = ordered && yn[i] < yn[i + 1];
    if (!finite || !ordered) {
      h *= 0.25;
      continue;
    }
    velocity(st, t + h, yn, k7);
    bool kfinite = true;
    for (double v : k7) kfinite = kfinite && std::isfinite(v);
    if (!kfinite) {
      h *= 0.25;
      continue;
    }
    for (std::size_t i = 0; i < N; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double en = err_norm(err);
    if (en > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      continue;
    }
    const double t1 = t + h;
    std::size_t at = 0;
    double g = min_gap(yn, &at);
    if (g < collision_threshold) {
      // time where the Hermite interpolant of the closing pair reaches the threshold
      double lo = 0.0, hi = 1.0;
      for (int b = 0; b < 100; ++b) {
        double mid = 0.5 * (lo + hi);
        auto ym = hermite(y, k1, yn, k7, h, mid);
        (ym[at + 1] - ym[at] < collision_threshold ? hi : lo) = mid;
      }
      double tc = t + hi * h;
      emit_samples(t, tc, y, k1, yn, k7);
      out.events.push_back({static_cast<int>(at), static_cast<int>(at + 1), tc});
      return out;
    }
    emit_samples(t, t1, y, k1, yn, k7);
    t = t1;
    y = yn;
    k1 = k7;
    out.t.push_back(t);
    out.x.push_back(y);
    h *= std::min(5.0, 0.9 * std::pow(std::max(en, 1e-10), -0.2));
  }
  return out;
}

// ---- Peierls-Nabarro flow ----

double pn_max_step(double eps, double s, const DoubleWell& W) {
  return 0.2 * std::pow(eps, 1.0 + 2.0 * s) * std::min(1.0, 1.0 / W.W2_0);
}

std::vector<PnSnapshot> pn_evolve(const SampledField& v0, double eps, FracOrder s,
                                  const std::function<double(double, double)>& sigma, const DoubleWell& W,
                                  const std::vector<double>& times, const PnOptions& opt) {
  const auto& g = v0.grid;
  if (g.dim() != 1) throw DomainError("pn_evolve: one-dimensional fields only");
  if (!(eps > 0.0 && eps <= 1.0)) throw DomainError("pn_evolve: eps in (0,1]");
  if (!W.dW || !(W.W2_0 > 0.0)) throw DomainError("pn_evolve: invalid potential");
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] < 0.0 || (k && times[k] < times[k - 1])) throw DomainError("pn_evolve: times must be sorted and >= 0");
  const double sv = s.value();
  const double dt_max = pn_max_step(eps, sv, W);
  const double dt_req = opt.dt > 0.0 ? opt.dt : dt_max;
  if (dt_req > dt_max * (1 + 1e-12)) throw DomainError("pn_evolve: time step above the stability bound");

  const std::size_t N = g.size();
  const double P = g.period(0), o = g.origin(0);
  const int J = opt.derive_jump ? static_cast<int>(std::lround(v0.values.back() - v0.values.front())) : opt.jump;
  std::vector<double> ramp(N), x(N);
  for (std::size_t j = 0; j < N; ++j) {
    x[j] = g.coord(0, j);
    ramp[j] = J * (x[j] - o) / P;
  }
  std::vector<cplx> w(N);
  for (std::size_t j = 0; j < N; ++j) w[j] = v0.values[j] - ramp[j];
  double vmin = *std::min_element(v0.values.begin(), v0.values.end());
  double vmax = *std::max_element(v0.values.begin(), v0.values.end());
  const double guard = 10.0 * std::max(vmax - vmin, 1.0);
  const double center = 0.5 * (vmin + vmax);

  std::vector<double> L(N);
  for (std::size_t k = 0; k < N; ++k) L[k] = std::pow(2.0 * pi * g.frequency_norm(k), 2.0 * sv) / eps;
  const double well = std::pow(eps, -2.0 * sv);

  std::vector<PnSnapshot> out;
  double t = 0.0;
  auto snapshot = [&]() {
    std::vector<double> v(N);
    for (std::size_t j = 0; j < N; ++j) v[j] = w[j].real() + ramp[j];
    out.push_back({t, SampledField(g, std::move(v))});
  };
  std::vector<cplx> nl(N);
  for (double target : times) {
    const double span = target - t;
    const long steps = span > 0 ? static_cast<long>(std::ceil(span / dt_req - 1e-9)) : 0;
    if (steps > 0) {
      const double dt = span / steps;
      std::vector<double> E(N), phi(N);
      for (std::size_t k = 0; k < N; ++k) {
        E[k] = std::exp(-L[k] * dt);
        phi[k] = L[k] > 0.0 ? -std::expm1(-L[k] * dt) / L[k] : dt;
      }
      for (long n = 0; n < steps; ++n) {
        const double tn = t + n * dt;
        for (std::size_t j = 0; j < N; ++j) {
          double v = w[j].real() + ramp[j];
          nl[j] = (-well * W.dW(v) + (sigma ? sigma(tn, x[j]) : 0.0)) / eps;
        }
        auto W_hat = to_spectral(g, w);
        auto N_hat = to_spectral(g, nl);
        for (std::size_t k = 0; k < N; ++k)
          W_hat.coefficients[k] = E[k] * W_hat.coefficients[k] + phi[k] * N_hat.coefficients[k];
        w = to_physical_complex(W_hat);
        double worst = 0.0;
        for (std::size_t j = 0; j < N; ++j) {
          w[j] = cplx(w[j].real(), 0.0);
          worst = std::max(worst, std::fabs(w[j].real() + ramp[j] - center));
        }
        if (!(worst <= guard)) throw DivergenceError("pn_evolve: solution left the admissible range");
      }
    }
    t = target;
    snapshot();
  }
  return out;
}

std::vector<double> level_crossings(const SampledField& v, double level) {
  if (v.grid.dim() != 1) throw DomainError("level_crossings: one-dimensional fields only");
  std::vector<double> out;
  const auto& g = v.grid;
  for (std::size_t j = 0; j + 1 < g.size(); ++j) {
    double a = v.values[j] - level, b = v.values[j + 1] - level;
    if (a == 0.0) {
      out.push_back(g.coord(0, j));
    } else if (a * b < 0.0) {
      out.push_back(g.coord(0, j) + a / (a - b) * g.spacing(0));
    }
  }
  return out;
}

}  // namespace fraclab::evolution
