#include "fraclab/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/fraclap.hpp"
#include "fraclab/geometry.hpp"

namespace fraclab::variational {

using std::numbers::pi;

// ---------------------------------------------------------------- Allen-Cahn

void ACProblem::validate() const {
  if (!(R > 0.0) || cells < 2 || (cells & (cells - 1))) throw DomainError("ACProblem: need R > 0 and a power-of-two cell count");
  if (!exterior) throw DomainError("ACProblem: exterior data required");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("ACProblem: s in (0,1)");
  if (!W.W || !W.dW) throw DomainError("ACProblem: potential required");
  if (margin < 0.0) throw DomainError("ACProblem: negative margin");
  for (double x : {-R - 1.0, -2 * R, R + 1.0, 2 * R, -1e6, 1e6}) {
    double e = exterior(x);
    if (!(e >= -1.0 && e <= 1.0)) throw DomainError("ACProblem: exterior data must lie in [-1,1]");
  }
}

PeriodicGrid ACProblem::grid() const {
  return PeriodicGrid(std::vector<int>{cells}, std::vector<double>{2.0 * R}, std::vector<double>{-R + 0.5 * h()});
}

namespace {

struct ACModel {
  int N = 0, M = 0;
  double h = 0.0, s = 0.0;
  std::vector<double> k;         // k[d]: interaction of two cells d apart
  std::vector<double> ext;       // exterior cells: M left (outermost first), then M right
  std::vector<double> ray_l, ray_r;  // interior cell against the far rays
  double u_l = 0.0, u_r = 0.0;   // far values
  std::vector<double> S;         // row sums
  const evolution::DoubleWell* W = nullptr;

  explicit ACModel(const ACProblem& p) {
    p.validate();
    N = p.cells;
    h = p.h();
    s = p.s;
    W = &p.W;
    double margin = p.margin > 0.0 ? p.margin : p.R;
    M = std::max(1, static_cast<int>(std::ceil(margin / h)));
    const double L = p.R + M * h;
    const int T = N + 2 * M;
    k.assign(T, 0.0);
    const double scale = std::pow(h, 1.0 - 2.0 * s);
    geometry::IntervalSet unit({{0.0, 1.0}});
    for (int d = 1; d < T; ++d) {
      // piecewise-constant cells interact exactly below 1/2; above, adjacent cells would not
      k[d] = s < 0.5 ? geometry::interaction(unit, geometry::IntervalSet({{double(d), d + 1.0}}), FracOrder(s))
                     : std::pow(double(d), -1.0 - 2.0 * s);
      k[d] *= scale;
    }
    ext.resize(2 * M);
    for (int m = 0; m < M; ++m) {
      ext[m] = p.exterior(-L + (m + 0.5) * h);
      ext[M + m] = p.exterior(p.R + (m + 0.5) * h);
    }
    u_l = p.exterior(-L - 0.5 * h);
    u_r = p.exterior(L + 0.5 * h);
    const double inf = std::numeric_limits<double>::infinity();
    ray_l.resize(N);
    ray_r.resize(N);
    S.assign(N, 0.0);
    for (int i = 0; i < N; ++i) {
      geometry::IntervalSet c({{-p.R + i * h, -p.R + (i + 1) * h}});
      ray_l[i] = geometry::interaction(c, geometry::IntervalSet({{-inf, -L}}), FracOrder(s));
      ray_r[i] = geometry::interaction(c, geometry::IntervalSet({{L, inf}}), FracOrder(s));
      double acc = ray_l[i] + ray_r[i];
      for (int j = 0; j < T; ++j)
        if (j != i + M) acc += k[std::abs(j - (i + M))];
      S[i] = acc;
    }
  }

  // value of full-array cell t given interior values u
  double v(const std::vector<double>& u, int t) const {
    if (t < M) return ext[t];
    if (t >= M + N) return ext[M + (t - M - N)];
    return u[t - M];
  }

  ACEnergy energy(const std::vector<double>& u) const {
    ACEnergy e;
    const int T = N + 2 * M;
    double pot = 0.0, kin = 0.0;
    for (int i = 0; i < N; ++i) {
      pot += W->W(u[i]);
      const int t = i + M;
      double a = 0.0;
      for (int j = 0; j < T; ++j) {
        if (j == t) continue;
        double d = u[i] - v(u, j);
        // interior pairs are visited twice
        a += (j >= M && j < M + N ? 0.5 : 1.0) * k[std::abs(j - t)] * d * d;
      }
      kin += a + ray_l[i] * (u[i] - u_l) * (u[i] - u_l) + ray_r[i] * (u[i] - u_r) * (u[i] - u_r);
    }
    e.potential = h * pot;
    e.kinetic = kin;
    return e;
  }

  // kinetic gradient
  std::vector<double> grad_kinetic(const std::vector<double>& u) const {
    const int T = N + 2 * M;
    std::vector<double> g(N);
    for (int i = 0; i < N; ++i) {
      const int t = i + M;
      double a = 0.0;
      for (int j = 0; j < T; ++j)
        if (j != t) a += k[std::abs(j - t)] * (u[i] - v(u, j));
      g[i] = 2.0 * (a + ray_l[i] * (u[i] - u_l) + ray_r[i] * (u[i] - u_r));
    }
    return g;
  }

  // K(u + d) - K(u) = gK . d + sum S d^2 - sum_{i != j} k d_i d_j
  double kinetic_change(const std::vector<double>& gK, const std::vector<double>& d) const {
    double lin = 0.0, quad = 0.0;
    for (int i = 0; i < N; ++i) {
      if (d[i] == 0.0) continue;
      lin += gK[i] * d[i];
      double cross = 0.0;
      for (int j = 0; j < N; ++j)
        if (j != i) cross += k[std::abs(j - i)] * d[j];
      quad += d[i] * (S[i] * d[i] - cross);
    }
    return lin + quad;
  }

  // W(u + d) - W(u) by Simpson on W', exact for quartic W
  double potential_change(const std::vector<double>& u, const std::vector<double>& d) const {
    double acc = 0.0;
    for (int i = 0; i < N; ++i)
      if (d[i] != 0.0) acc += d[i] / 6.0 * (W->dW(u[i]) + 4.0 * W->dW(u[i] + 0.5 * d[i]) + W->dW(u[i] + d[i]));
    return h * acc;
  }

  double curvature() const {
    double m = 0.0;
    const double e = 1e-5;
    for (int q = 0; q <= 2000; ++q) {
      double x = -1.0 + 1e-3 * q;
      m = std::max(m, std::fabs((W->dW(x + e) - W->dW(x - e)) / (2 * e)));
    }
    return m;
  }
};

}  // namespace

ACEnergy ac_energy(const SampledField& u, const ACProblem& prob) {
  ACModel m(prob);
  if (!(u.grid == prob.grid())) throw DomainError("ac_energy: field is not on the problem grid");
  return m.energy(u.values);
}

ACResult ac_minimize(const ACProblem& prob, double tol, int max_iter, const SampledField* u0) {
  if (!(tol > 0.0)) throw DomainError("ac_minimize: tol must be positive");
  ACModel m(prob);
  PeriodicGrid g = prob.grid();
  std::vector<double> u(m.N);
  if (u0) {
    if (!(u0->grid == g)) throw DomainError("ac_minimize: initial guess is not on the problem grid");
    u = u0->values;
  } else {
    for (int i = 0; i < m.N; ++i) u[i] = prob.exterior(g.coord(0, i));
  }
  for (double& x : u) x = std::clamp(x, -1.0, 1.0);

  const double Lip = 4.0 * *std::max_element(m.S.begin(), m.S.end()) + m.h * m.curvature();
  ACResult res;
  double E = m.energy(u).total();
  res.energy.push_back(E);
  std::vector<double> d(m.N), trial(m.N);
  for (int it = 0;; ++it) {
    auto gK = m.grad_kinetic(u);
    std::vector<double> gr(m.N);
    double pg = 0.0;
    for (int i = 0; i < m.N; ++i) {
      gr[i] = gK[i] + m.h * m.W->dW(u[i]);
      bool blocked = (u[i] <= -1.0 && gr[i] > 0.0) || (u[i] >= 1.0 && gr[i] < 0.0);
      if (!blocked) pg = std::max(pg, std::fabs(gr[i]) / m.h);
    }
    res.grad_norm.push_back(pg);
    if (pg < tol) {
      res.iterations = it;
      break;
    }
    if (it >= max_iter) throw ConvergenceError("ac_minimize: iteration limit reached");
    double tau = 1.0 / Lip, dE = 0.0;
    bool accepted = false;
    for (int bt = 0; bt < 60 && !accepted; ++bt, tau *= 0.5) {
      for (int i = 0; i < m.N; ++i) {
        trial[i] = std::clamp(u[i] - tau * gr[i], -1.0, 1.0);
        d[i] = trial[i] - u[i];
      }
      dE = m.kinetic_change(gK, d) + m.potential_change(u, d);
      accepted = dE <= 0.0;
    }
    if (!accepted) throw ConvergenceError("ac_minimize: no descent step found");
    u = trial;
    E += dE;
    res.energy.push_back(E);
  }
  res.u = SampledField(g, u);
  return res;
}

// ---------------------------------------------------------------- ground states

GroundStateProblem::GroundStateProblem(double s_, double p_, double period_, int points_)
    : s(s_), p(p_), period(period_), points(points_) {
  FracOrder check(s);
  (void)check;
  if (!(p > 1.0 && p < critical_exponent(s) - 1.0)) throw DomainError("GroundStateProblem: p must be subcritical");
  if (!(period > 0.0) || points < 16 || points % 2) throw DomainError("GroundStateProblem: bad window");
}

double GroundStateProblem::critical_exponent(double s) {
  // 2n/(n - 2s) while n > 2s, unbounded otherwise
  return s < 0.5 ? 2.0 / (1.0 - 2.0 * s) : std::numeric_limits<double>::infinity();
}

namespace {

double signed_pow(double w, double p) { return std::copysign(std::pow(std::fabs(w), p), w); }

void symmetrize(std::vector<double>& v) {
  // point j mirrors to N - j about the origin -period/2 grid
  const std::size_t N = v.size();
  std::vector<double> out(N);
  out[0] = v[0];
  for (std::size_t j = 1; j < N; ++j) out[j] = 0.5 * (v[j] + v[N - j]);
  v.swap(out);
}

void check_window(const SampledField& w, const GroundStateProblem& prob) {
  const auto& g = w.grid;
  if (g.dim() != 1 || static_cast<int>(g.size()) != prob.points || std::fabs(g.origin(0) + 0.5 * prob.period) > 1e-12 * prob.period)
    throw DomainError("ground state: field is not on the problem window");
}

}  // namespace

SampledField petviashvili_step(const SampledField& w, const GroundStateProblem& prob, double* multiplier) {
  check_window(w, prob);
  SampledField np = w;
  for (double& x : np.values) x = signed_pow(x, prob.p);
  auto Lw = fraclap::fraclap_spectral(w, prob.s);
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    num += w.values[j] * (Lw.values[j] + w.values[j]);
    den += w.values[j] * np.values[j];
  }
  double M = num / den;
  if (!std::isfinite(M) || !(M > 0.0)) throw DivergenceError("ground_state: renormalization factor lost positivity");
  const double sv = prob.s;
  auto v = fraclap::apply_radial_multiplier(np, [sv](double r) { return 1.0 / (1.0 + std::pow(2.0 * pi * r, 2.0 * sv)); });
  const double f = std::pow(M, prob.p / (prob.p - 1.0));
  for (double& x : v.values) x *= f;
  symmetrize(v.values);
  if (multiplier) *multiplier = M;
  return v;
}

double ground_state_residual(const SampledField& w, const GroundStateProblem& prob) {
  check_window(w, prob);
  auto Lw = fraclap::fraclap_spectral(w, prob.s);
  double r = 0.0;
  for (std::size_t j = 0; j < w.values.size(); ++j)
    r = std::max(r, std::fabs(Lw.values[j] + w.values[j] - signed_pow(w.values[j], prob.p)));
  return r;
}

GroundState ground_state(const GroundStateProblem& prob, double tol, int max_iter) {
  if (!(tol > 0.0)) throw DomainError("ground_state: tol must be positive");
  PeriodicGrid g(1, prob.points, prob.period);
  auto w = SampledField::from_function_1d(g, [](double x) { return 1.5 * std::exp(-0.25 * x * x); });
  GroundState gs;
  for (int it = 0; it < max_iter; ++it) {
    double M = 1.0;
    w = petviashvili_step(w, prob, &M);
    double peak = *std::max_element(w.values.begin(), w.values.end());
    if (!(peak > 1e-12 && peak < 1e12)) throw DivergenceError("ground_state: iterate collapsed or blew up");
    double r = ground_state_residual(w, prob);
    gs.iterations = it + 1;
    gs.multiplier = M;
    gs.residual = r;
    if (r < tol) {
      gs.w = w;
      return gs;
    }
  }
  throw ConvergenceError("ground_state: iteration limit reached");
}

double decay_fit(const SampledField& w, double lo, double hi) {
  if (w.grid.dim() != 1 || !(0.0 < lo && lo < hi)) throw DomainError("decay_fit: need a 1D field and 0 < lo < hi");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 0; j < w.values.size(); ++j) {
    double x = w.grid.coord(0, static_cast<int>(j));
    if (x < lo || x > hi) continue;
    if (!(w.values[j] > 0.0)) throw DomainError("decay_fit: nonpositive value in range");
    double X = std::log(x), Y = std::log(w.values[j]);
    sx += X, sy += Y, sxx += X * X, sxy += X * Y, ++n;
  }
  if (n < 2) throw DomainError("decay_fit: fewer than two points in range");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace fraclab::variational
