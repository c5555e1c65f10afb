#include "fraclab/fraclap.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/specfun.hpp"
#include "quad.hpp"

namespace fraclab::fraclap {

using std::numbers::pi;

SampledField apply_multiplier(const SampledField& f, const Multiplier& m) {
  auto F = to_spectral(f);
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) F.coefficients[k] *= m(F.grid.frequency_vector(k));
  return to_physical(F);
}

SampledField apply_radial_multiplier(const SampledField& f, const std::function<double(double)>& m) {
  auto F = to_spectral(f);
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) F.coefficients[k] *= m(F.grid.frequency_norm(k));
  return to_physical(F);
}

SampledField fraclap_spectral(const SampledField& f, double s) {
  if (!(s > 0.0 && s <= 1.0)) throw DomainError("fraclap_spectral: s must lie in (0,1]");
  return apply_radial_multiplier(f, [s](double r) { return r == 0.0 ? 0.0 : std::pow(2.0 * pi * r, 2.0 * s); });
}

SampledField waterwave_apply(const SampledField& f) {
  return apply_radial_multiplier(f, [](double r) {
    double k = 2.0 * pi * r;
    return k * std::tanh(k);
  });
}

// ---------------------------------------------------------------------------

void QuadratureParams::validate() const {
  if (!(inner_radius > 0.0 && inner_radius < 1.0)) throw DomainError("QuadratureParams: need 0 < delta < 1");
  if (!(outer_radius > 10.0)) throw DomainError("QuadratureParams: need R > 10");
  if (points_per_decade < 1) throw DomainError("QuadratureParams: points_per_decade >= 1");
  if (!(tol > 0.0)) throw DomainError("QuadratureParams: tol > 0");
  if (angles < 4) throw DomainError("QuadratureParams: angles >= 4");
}

namespace {

double bounded_eval(const Fn1& f, double x) {
  double v = f(x);
  return std::isfinite(v) ? v : 0.0;
}

// int_0^inf (2 f(0) - f(t) - f(-t)) t^{-1-2s} dt for a function of one variable.
// kinks are signed positions of non-smooth points of f.
double second_difference_integral(const Fn1& f, double s, const QuadratureParams& q,
                                  const std::vector<double>& kinks, double& err, bool& mismatch) {
  const double delta = q.inner_radius, R = q.outer_radius;
  const double f0 = f(0.0);
  auto D = [&](double y) { return 2.0 * f0 - f(y) - f(-y); };
  err = 0.0;

  // |y| < delta: D(y) ~ D(delta) (y/delta)^2
  double Dd = D(delta), Dh = D(0.5 * delta);
  double total = Dd * std::pow(delta, -2.0 * s) / (2.0 - 2.0 * s);
  err += std::fabs(Dd - 4.0 * Dh) * std::pow(delta, -2.0 * s) / (2.0 - 2.0 * s);

  // geometric panels with kink distances inserted
  std::vector<double> edges;
  const double ratio = std::pow(10.0, 1.0 / q.points_per_decade);
  for (double e = delta; e < R; e *= ratio) edges.push_back(e);
  edges.push_back(R);
  std::vector<double> far_kinks;
  for (double k : kinks) {
    double d = std::fabs(k);
    if (d > delta && d < R)
      edges.push_back(d);
    else if (d >= R)
      far_kinks.push_back(d);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [](double a, double b) { return std::fabs(a - b) <= 1e-14 * std::max(a, b); }),
              edges.end());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double e = 0.0;
    total += detail::tanh_sinh([&](double y) { return D(y) * std::pow(y, -1.0 - 2.0 * s); }, edges[i], edges[i + 1],
                               q.tol, &e);
    err += e;
  }

  // beyond R
  switch (q.tail) {
    case TailModel::zero: {
      if (std::fabs(f(R)) > 1e-6 || std::fabs(f(-R)) > 1e-6) mismatch = true;
      total += 2.0 * f0 * std::pow(R, -2.0 * s) / (2.0 * s);
      break;
    }
    case TailModel::constant: {
      if (std::fabs(f(R) - q.tail_value) > 1e-6 || std::fabs(f(-R) - q.tail_value) > 1e-6) mismatch = true;
      total += 2.0 * (f0 - q.tail_value) * std::pow(R, -2.0 * s) / (2.0 * s);
      break;
    }
    case TailModel::mapped: {
      // y = R / v, dy y^{-1-2s} = R^{-2s} v^{2s-1} dv
      std::vector<double> vedges{0.0, 1.0};
      for (double d : far_kinks) vedges.push_back(R / d);
      std::sort(vedges.begin(), vedges.end());
      double acc = 0.0;
      for (std::size_t i = 0; i + 1 < vedges.size(); ++i) {
        double e = 0.0;
        acc += detail::tanh_sinh(
            [&](double v) {
              if (v <= 0.0) return 0.0;
              double y = R / v;
              double val = 2.0 * f0 - bounded_eval(f, y) - bounded_eval(f, -y);
              double r = val * std::pow(v, 2.0 * s - 1.0);
              return std::isfinite(r) ? r : 0.0;
            },
            vedges[i], vedges[i + 1], q.tol, &e);
        err += e * std::pow(R, -2.0 * s);
      }
      total += acc * std::pow(R, -2.0 * s);
      break;
    }
  }
  return total;
}

}  // namespace

QuadratureResult fraclap_quadrature_ex(const Fn1& u, double x, FracOrder s, const QuadratureParams& q) {
  q.validate();
  std::vector<double> kinks;
  for (double k : q.kinks) kinks.push_back(k - x);
  QuadratureResult r;
  double err = 0.0;
  Fn1 f = [&](double t) { return u(x + t); };
  double I = second_difference_integral(f, s, q, kinks, err, r.tail_mismatch);
  double C = specfun::cns_closed(Dimension(1), s);
  r.value = C * I;
  r.error = C * err;
  return r;
}

double fraclap_quadrature(const Fn1& u, double x, FracOrder s, const QuadratureParams& q) {
  return fraclap_quadrature_ex(u, x, s, q).value;
}

QuadratureResult fraclap_quadrature_nd(const FnN& u, const std::vector<double>& x, FracOrder s,
                                       const QuadratureParams& q) {
  q.validate();
  const int n = static_cast<int>(x.size());
  if (n == 1) {
    Fn1 u1 = [&](double t) { return u(std::vector<double>{t}); };
    return fraclap_quadrature_ex(u1, x[0], s, q);
  }
  if (n != 2) throw DomainError("fraclap_quadrature_nd: only n = 1, 2 are supported");
  const int M = q.angles;
  std::vector<double> vals(M), errs(M);
  std::vector<char> flags(M, 0);
  parallel_for(static_cast<std::size_t>(M), [&](std::size_t j) {
    double th = pi * static_cast<double>(j) / M;
    std::vector<double> e{std::cos(th), std::sin(th)};
    std::vector<double> kinks;
    if (q.line_kinks) kinks = q.line_kinks(x, e);
    Fn1 f = [&](double t) { return u(std::vector<double>{x[0] + t * e[0], x[1] + t * e[1]}); };
    bool mm = false;
    double err = 0.0;
    vals[j] = second_difference_integral(f, s, q, kinks, err, mm);
    errs[j] = err;
    flags[j] = mm;
  });
  // (C/2) * integral over the unit circle = C * integral over a half circle
  double C = specfun::cns_closed(Dimension(2), s);
  QuadratureResult r;
  KahanSum acc, eacc;
  for (int j = 0; j < M; ++j) {
    acc.add(vals[j]);
    eacc.add(errs[j]);
    if (flags[j]) r.tail_mismatch = true;
  }
  r.value = C * acc.value() * pi / M;
  r.error = C * eacc.value() * pi / M;
  return r;
}

// ---------------------------------------------------------------------------

double heat_average(const Fn1& u, double x, double t, const std::vector<double>& kinks) {
  if (!(t > 0.0)) throw DomainError("heat_average: t must be positive");
  const double zmax = 9.0;
  const double w = 2.0 * std::sqrt(t);
  std::vector<double> edges{-zmax, 0.0, zmax};
  auto add_y = [&](double y) {
    double z = (y - x) / w;
    if (std::fabs(z) < zmax) edges.push_back(z);
  };
  for (double k : kinks) add_y(k);
  for (int j = -4; j <= 8; ++j) {
    double d = std::ldexp(1.0, j);
    add_y(x + d);
    add_y(x - d);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  KahanSum acc;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (edges[i + 1] - edges[i] < 1e-15) continue;
    acc.add(detail::tanh_sinh([&](double z) { return std::exp(-z * z) * u(x + w * z); }, edges[i], edges[i + 1],
                              1e-12));
  }
  return acc.value() / std::sqrt(pi);
}

SemigroupResult fraclap_semigroup_ex(const Fn1& u, double x, FracOrder s, const TimeGrid& tg) {
  if (!(tg.t_min > 0.0 && tg.t_max > 100.0 * tg.t_min) || tg.panels_per_decade < 1)
    throw DomainError("fraclap_semigroup: invalid time grid");
  const double sv = s.value();
  const double ux = u(x);
  const double lo = std::log10(tg.t_min), hi = std::log10(tg.t_max);
  const int panels = static_cast<int>(std::ceil((hi - lo) * tg.panels_per_decade - 1e-9));
  const double dl = (hi - lo) / panels;
  const int per_decade = static_cast<int>(std::lround(1.0 / dl));

  // tau = ln t; integrand t^{-s} (U - u)
  std::vector<double> panel_vals(panels);
  parallel_for(static_cast<std::size_t>(panels), [&](std::size_t p) {
    double a = (lo + dl * p) * std::log(10.0), b = (lo + dl * (p + 1)) * std::log(10.0);
    panel_vals[p] = detail::gauss<10>(
        [&](double tau) {
          double t = std::exp(tau);
          return std::exp(-sv * tau) * (heat_average(u, x, t, tg.kinks) - ux);
        },
        a, b);
  });

  auto small_corr = [&](double t0) { return (heat_average(u, x, t0, tg.kinks) - ux) * std::pow(t0, -sv) / (1.0 - sv); };
  auto large_corr = [&](double T) {
    double UT = heat_average(u, x, T, tg.kinks);
    if (tg.tail == SemigroupTail::bounded) return (UT - ux) * std::pow(T, -sv) / sv;
    return -ux * std::pow(T, -sv) / sv + UT * std::pow(T, -sv) / (sv + 0.5);
  };

  KahanSum full;
  for (double v : panel_vals) full.add(v);
  double full_val = full.value() + small_corr(tg.t_min) + large_corr(tg.t_max);

  // same quadrature with one decade trimmed at each end
  double trimmed_val = full_val;
  if (per_decade >= 1 && panels > 2 * per_decade) {
    KahanSum tr;
    for (int p = per_decade; p < panels - per_decade; ++p) tr.add(panel_vals[p]);
    trimmed_val = tr.value() + small_corr(tg.t_min * std::pow(10.0, dl * per_decade)) +
                  large_corr(tg.t_max / std::pow(10.0, dl * per_decade));
  }
  const double g = -specfun::gamma(1.0 - sv) / sv;  // Gamma(-s)
  SemigroupResult r;
  r.value = full_val / g;
  r.error = std::fabs(full_val - trimmed_val) / std::fabs(g);
  if (!std::isfinite(r.value) || r.error > tg.tol)
    throw ConvergenceError("fraclap_semigroup: t-integral truncation error exceeds tolerance");
  return r;
}

double fraclap_semigroup(const Fn1& u, double x, FracOrder s, const TimeGrid& tg) {
  return fraclap_semigroup_ex(u, x, s, tg).value;
}

// ---------------------------------------------------------------------------

namespace {

// sum_{k>=1} int_k^{k+1} (t-k)(k+1-t) t^{-1-2s} dt: the bias of linear interpolation of y^2.
double interpolation_bias(double s) {
  const int K = 4000;
  KahanSum acc;
  for (int k = K - 1; k >= 1; --k)
    acc.add(detail::gauss<8>([&](double t) { return (t - k) * (k + 1 - t) * std::pow(t, -1.0 - 2.0 * s); }, k,
                             k + 1.0));
  acc.add(std::pow(static_cast<double>(K), -2.0 * s) / (12.0 * s));
  return acc.value();
}

double raw_first_weight(double s) {
  return 1.0 / (2.0 - 2.0 * s) +
         detail::gauss<10>([&](double t) { return (2.0 - t) * std::pow(t, -1.0 - 2.0 * s); }, 1.0, 2.0);
}

// Correction that removes the leading interpolation error; dropped when it would
// make the first weight small (s near 0), keeping the stencil monotone.
double first_weight_correction(double s) {
  double bias = interpolation_bias(s);
  double w1 = raw_first_weight(s);
  return (w1 - bias > 0.25 * w1) ? bias : 0.0;
}

}  // namespace

std::vector<double> lattice_weights(double s, double h, int K) {
  if (K < 2) throw DomainError("lattice_weights: K >= 2");
  std::vector<double> w(K + 1, 0.0);
  const double scale = std::pow(h, -2.0 * s);
  auto left_half = [&](int k) {
    return detail::gauss<8>([&](double t) { return (t - (k - 1)) * std::pow(t, -1.0 - 2.0 * s); }, k - 1.0, k);
  };
  auto right_half = [&](int k) {
    return detail::gauss<8>([&](double t) { return (k + 1 - t) * std::pow(t, -1.0 - 2.0 * s); }, k, k + 1.0);
  };
  w[1] = (raw_first_weight(s) - first_weight_correction(s)) * scale;
  for (int k = 2; k < K; ++k) w[k] = (left_half(k) + right_half(k)) * scale;
  w[K] = left_half(K) * scale;
  return w;
}

double lattice_weight_total(double s, double h) {
  return std::pow(h, -2.0 * s) * (1.0 / (2.0 - 2.0 * s) + 1.0 / (2.0 * s) - first_weight_correction(s));
}

namespace {

// Y^{-2s} int_0^1 g(x0 + dir Y / v) v^{2s-1} dv = int_Y^inf g(x0 + dir y) y^{-1-2s} dy
double far_field(const Fn1& g, double x0, double dir, double Y, double s) {
  double v = detail::tanh_sinh(
      [&](double t) {
        if (t <= 0.0) return 0.0;
        double r = bounded_eval(g, x0 + dir * Y / t) * std::pow(t, 2.0 * s - 1.0);
        return std::isfinite(r) ? r : 0.0;
      },
      0.0, 1.0, 1e-12);
  return v * std::pow(Y, -2.0 * s);
}

}  // namespace

DirichletSystem assemble_dirichlet(double a, double b, int cells, double s, const Fn1& exterior, int margin) {
  if (!(b > a)) throw DomainError("dirichlet: need b > a");
  if (cells < 2) throw DomainError("dirichlet: need at least two cells");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("dirichlet: s in (0,1)");
  if (margin < 1) margin = cells;
  const double h = (b - a) / cells;
  const int m = cells - 1;
  const int K = cells + margin;  // farthest lattice offset reachable from any interior row
  const double C = specfun::cns_closed(Dimension(1), FracOrder(s));
  auto w = lattice_weights(s, h, K + 1);
  // full-hat and half-hat weights at each reach
  std::vector<double> half(K + 2, 0.0);
  {
    const double scale = std::pow(h, -2.0 * s);
    for (int k = 2; k <= K + 1; ++k)
      half[k] = scale * detail::gauss<8>([&](double t) { return (t - (k - 1)) * std::pow(t, -1.0 - 2.0 * s); },
                                         k - 1.0, k);
  }
  // exterior lattice values: node index j in [-margin, cells + margin]
  std::vector<double> ext(cells + 2 * margin + 1, 0.0);
  for (int j = -margin; j <= cells + margin; ++j)
    if (j <= 0 || j >= cells) ext[j + margin] = exterior(a + j * h);

  DirichletSystem sys;
  sys.m = m;
  sys.x.resize(m);
  sys.matrix.assign(static_cast<std::size_t>(m) * m, 0.0);
  sys.exterior_load.assign(m, 0.0);
  parallel_for(static_cast<std::size_t>(m), [&](std::size_t r) {
    const int i = static_cast<int>(r) + 1;
    sys.x[r] = a + i * h;
    double diag = 0.0;
    KahanSum load;
    // right side reaches node cells + margin, left side reaches node -margin
    const int KR = cells + margin - i, KL = i + margin;
    for (int side = 0; side < 2; ++side) {
      const int Ks = side == 0 ? KR : KL;
      const int dir = side == 0 ? 1 : -1;
      for (int k = 1; k <= Ks; ++k) {
        double wk = (k == Ks) ? (Ks == 1 ? w[1] : half[k]) : w[k];
        diag += wk;
        int j = i + dir * k;
        if (j >= 1 && j <= m)
          sys.matrix[r * m + (j - 1)] -= C * wk;
        else
          load.add(C * wk * ext[j + margin]);
      }
      const double Y = Ks * h;
      diag += std::pow(Y, -2.0 * s) / (2.0 * s);
      load.add(C * far_field(exterior, sys.x[r], dir, Y, s));
    }
    sys.matrix[r * m + r] += C * diag;
    sys.exterior_load[r] = load.value();
  });
  return sys;
}

DirichletSolution dirichlet_solve(const ExteriorProblem& p) {
  if (!p.exterior_data) throw DomainError("dirichlet_solve: exterior data missing");
  auto sys = assemble_dirichlet(p.a, p.b, p.cells, p.s, p.exterior_data, p.margin_cells);
  const int m = sys.m;
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> A(sys.matrix.data(), m, m);
  Eigen::VectorXd rhs(m);
  for (int i = 0; i < m; ++i) rhs[i] = sys.exterior_load[i] + (p.rhs ? p.rhs(sys.x[i]) : 0.0);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  Eigen::VectorXd u = lu.solve(rhs);
  if (!u.allFinite()) throw SingularSystemError("dirichlet_solve: singular system");
  DirichletSolution sol;
  sol.x = sys.x;
  sol.u.assign(u.data(), u.data() + m);
  return sol;
}

}  // namespace fraclab::fraclap
