#include "fraclab/reference.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fraclab/fraclap.hpp"
#include "fraclab/specfun.hpp"
#include "quad.hpp"

#include <boost/math/special_functions/zeta.hpp>

namespace fraclab::reference {

using std::numbers::pi;

HalfLineConstant halfline_constant(FracOrder s) {
  const double sv = s.value();
  fraclap::QuadratureParams q;
  q.kinks = {0.0};
  q.tail = fraclap::TailModel::mapped;
  Fn1 u = [sv](double x) { return x > 0.0 ? std::pow(x, sv) : 0.0; };
  return HalfLineConstant{sv, -fraclap::fraclap_quadrature(u, -1.0, s, q)};
}

double halfline_fraclap(double x, FracOrder s, const HalfLineConstant& c) {
  if (x == 0.0) throw DomainError("halfline_fraclap: not defined at the origin");
  if (std::fabs(c.s - s.value()) > 1e-15) throw DomainError("halfline_fraclap: constant computed for another s");
  if (x > 0.0) return 0.0;
  return -c.c_s * std::pow(-x, -s.value());
}

double ball_constant(Dimension n, FracOrder s) {
  return specfun::cns_closed(n, s) * specfun::beta(1.0 - s.value(), s.value()) * specfun::sphere_measure(n) / 2.0;
}

double lemma_l1_lhs(FracOrder s, double tol) {
  if (!(tol > 0.0)) throw DomainError("lemma_l1_lhs: tol must be positive");
  const double sv = s.value();
  const double t0 = 0.5;
  // (1+t)^s + (1-t)^s - 2 = 2 sum_{k>=1} binom(s,2k) t^{2k}, integrated termwise on [0, t0]
  double series = 0.0;
  double binom = 1.0;  // binom(s, j)
  double last = 0.0;
  for (int j = 1; j <= 200; ++j) {
    binom *= (sv - (j - 1)) / j;
    if (j % 2 == 1) continue;
    last = 2.0 * binom * std::pow(t0, j - 2.0 * sv) / (j - 2.0 * sv);
    series += last;
    if (std::fabs(last) < 1e-18) break;
  }
  double e1 = 0.0, e2 = 0.0;
  double mid = detail::tanh_sinh(
      [sv](double t) { return (std::pow(1.0 + t, sv) + std::pow(1.0 - t, sv) - 2.0) * std::pow(t, -1.0 - 2.0 * sv); },
      t0, 1.0, 1e-14, &e1);
  // t = 1/v, v = w^{1/s}: int_1^inf (1+t)^s t^{-1-2s} dt = (1/s) int_0^1 (1 + w^{1/s})^s dw
  double outer = detail::tanh_sinh([sv](double w) { return std::pow(1.0 + std::pow(w, 1.0 / sv), sv); }, 0.0, 1.0,
                                   1e-14, &e2) /
                 sv;
  double err = e1 + e2 / sv + std::fabs(last);
  if (err > tol) throw ConvergenceError("lemma_l1_lhs: quadrature did not reach the tolerance");
  return series + mid + outer;
}

double heat_kernel(const std::vector<double>& x, double t, double s) {
  if (!(t > 0.0)) throw DomainError("heat_kernel: t must be positive");
  const int n = static_cast<int>(x.size());
  if (n < 1) throw DomainError("heat_kernel: empty point");
  double r2 = 0.0;
  for (double v : x) r2 += v * v;
  if (s == 1.0) return std::pow(4.0 * pi * t, -0.5 * n) * std::exp(-r2 / (4.0 * t));
  if (s == 0.5) {
    // transform of exp(-2 pi t |xi|)
    double c = specfun::gamma(0.5 * (n + 1)) / std::pow(pi, 0.5 * (n + 1));
    return c * t / std::pow(t * t + r2, 0.5 * (n + 1));
  }
  throw DomainError("heat_kernel: only s = 1/2 and s = 1 have closed forms");
}

namespace {

double distance(const PeriodicGrid& g, std::size_t i, std::size_t j) {
  auto a = g.point(i), b = g.point(j);
  double r = 0.0;
  for (std::size_t d = 0; d < a.size(); ++d) r += (a[d] - b[d]) * (a[d] - b[d]);
  return std::sqrt(r);
}

// Pair kernel h^{2n} |x_i - x_j|^{-alpha}; pairs are (i, j) with i < j stored row by row.
std::vector<std::vector<double>> pair_kernel(const PeriodicGrid& g, double alpha) {
  const std::size_t N = g.size();
  const double w = g.cell_volume() * g.cell_volume();
  std::vector<std::vector<double>> K(N);
  parallel_for(N, [&](std::size_t i) {
    K[i].resize(N - i - 1);
    for (std::size_t j = i + 1; j < N; ++j) K[i][j - i - 1] = w * std::pow(distance(g, i, j), -alpha);
  });
  return K;
}

}  // namespace

CoareaTerms coarea_terms(const SampledField& u, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("coarea: s in (0,1)");
  for (double v : u.values)
    if (v < 0.0 || v > 1.0) throw DomainError("coarea: field must take values in [0,1]");
  const auto& g = u.grid;
  const std::size_t N = g.size();
  const int n = g.dim();
  auto K = pair_kernel(g, n + s);

  CoareaTerms r;
  {
    std::vector<double> rows(N, 0.0);
    parallel_for(N, [&](std::size_t i) {
      KahanSum acc;
      for (std::size_t j = i + 1; j < N; ++j) acc.add(std::fabs(u.values[i] - u.values[j]) * K[i][j - i - 1]);
      rows[i] = acc.value();
    });
    KahanSum tot;
    for (double v : rows) tot.add(v);
    r.lhs = tot.value();  // (1/2) sum over ordered pairs
  }
  std::vector<double> levels(u.values);
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  KahanSum rhs;
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    // I({u >= v_{l+1}}, {u <= v_l})
    const double lo = levels[l], hi = levels[l + 1];
    std::vector<double> rows(N, 0.0);
    parallel_for(N, [&](std::size_t i) {
      KahanSum acc;
      const bool ai = u.values[i] >= hi, bi = u.values[i] <= lo;
      for (std::size_t j = i + 1; j < N; ++j) {
        const bool aj = u.values[j] >= hi, bj = u.values[j] <= lo;
        if ((ai && bj) || (bi && aj)) acc.add(K[i][j - i - 1]);
      }
      rows[i] = acc.value();
    });
    KahanSum I;
    for (double v : rows) I.add(v);
    rhs.add((hi - lo) * I.value());
  }
  r.rhs = rhs.value();
  return r;
}

double coarea_gap(const SampledField& u, double s) {
  auto t = coarea_terms(u, s);
  return std::fabs(t.lhs - t.rhs);
}

namespace {

// int over the complement of the window of |x - y|^{-(n + alpha)} dy
double exterior_kernel(const PeriodicGrid& g, const std::vector<double>& x, double alpha) {
  const int n = g.dim();
  if (n == 1) {
    double a = g.origin(0), b = g.origin(0) + g.period(0);
    return (std::pow(x[0] - a, -alpha) + std::pow(b - x[0], -alpha)) / alpha;
  }
  if (n != 2) throw DomainError("sobolev_ratio: n = 1 or 2");
  const double x0 = g.origin(0), x1 = g.origin(0) + g.period(0);
  const double y0 = g.origin(1), y1 = g.origin(1) + g.period(1);
  auto rho = [&](double th) {
    double c = std::cos(th), sn = std::sin(th);
    double tx = c > 0 ? (x1 - x[0]) / c : (c < 0 ? (x0 - x[0]) / c : 1e300);
    double ty = sn > 0 ? (y1 - x[1]) / sn : (sn < 0 ? (y0 - x[1]) / sn : 1e300);
    return std::min(tx, ty);
  };
  std::vector<double> cuts{std::atan2(y0 - x[1], x0 - x[0]), std::atan2(y0 - x[1], x1 - x[0]),
                           std::atan2(y1 - x[1], x1 - x[0]), std::atan2(y1 - x[1], x0 - x[0])};
  for (auto& c : cuts)
    if (c < 0) c += 2 * pi;
  std::sort(cuts.begin(), cuts.end());
  cuts.push_back(cuts.front() + 2 * pi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
    total += detail::gauss<20>([&](double th) { return std::pow(rho(th), -alpha); }, cuts[k], cuts[k + 1]);
  return total / alpha;
}

}  // namespace

double sobolev_ratio(const SampledField& u, double s, double p) {
  const auto& g = u.grid;
  const int n = g.dim();
  if (!(s > 0.0 && s < 1.0)) throw DomainError("sobolev_ratio: s in (0,1)");
  if (!(p > 1.0 && p < n / s)) throw DomainError("sobolev_ratio: need 1 < p < n/s");
  bool nonzero = false;
  for (double v : u.values) nonzero = nonzero || v != 0.0;
  if (!nonzero) throw DomainError("sobolev_ratio: zero function");
  const double pstar = n * p / (n - s * p);
  const std::size_t N = g.size();
  const double h = g.cell_volume();

  KahanSum lp;
  for (double v : u.values) lp.add(std::pow(std::fabs(v), pstar));
  const double num = std::pow(lp.value() * h, 1.0 / pstar);

  const double alpha = n + s * p;
  std::vector<double> rows(N, 0.0);
  parallel_for(N, [&](std::size_t i) {
    KahanSum acc;
    for (std::size_t j = i + 1; j < N; ++j) {
      double d = std::fabs(u.values[i] - u.values[j]);
      if (d != 0.0) acc.add(std::pow(d, p) * std::pow(distance(g, i, j), -alpha));
    }
    double semi = 2.0 * acc.value() * h * h;  // ordered pairs inside the window
    if (u.values[i] != 0.0)
      semi += 2.0 * std::pow(std::fabs(u.values[i]), p) * h * exterior_kernel(g, g.point(i), s * p);
    rows[i] = semi;
  });
  KahanSum tot;
  for (double v : rows) tot.add(v);
  return num / std::pow(tot.value(), 1.0 / p);
}

namespace {

// Weight given to the zero mode when integrating (2 pi |xi|)^e |u^|^2 with the midpoint sum elsewhere.
// 1D: generalized Euler-Maclaurin for x^e g(x) with g even; 2D: exact integral over the zero cell.
double zero_cell_weight(const PeriodicGrid& g, double e) {
  const int n = g.dim();
  if (n == 1) {
    double d = 1.0 / g.period(0);
    return -2.0 * boost::math::zeta(-e) * std::pow(2.0 * pi, e) * std::pow(d, e + 1.0);
  }
  if (n != 2) throw DomainError("uncertainty: n = 1 or 2");
  const double a = 0.5 / g.period(0), b = 0.5 / g.period(1);
  const double tc = std::atan2(b, a);
  double q = detail::gauss<30>([&](double th) { return std::pow(a / std::cos(th), e + 2.0); }, 0.0, tc) +
             detail::gauss<30>([&](double th) { return std::pow(b / std::sin(th), e + 2.0); }, tc, 0.5 * pi);
  return 4.0 * std::pow(2.0 * pi, e) * q / (e + 2.0);
}

}  // namespace

UncertaintyTerms uncertainty_terms(const SampledField& u, double s) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("uncertainty: s in (0,1)");
  const auto& g = u.grid;
  const int n = g.dim();
  auto F = to_spectral(u);
  const double dxi = g.frequency_cell_volume();
  const double e = s - 1.0;
  KahanSum lhs, grad, xn;
  for (std::size_t k = 0; k < F.coefficients.size(); ++k) {
    double r = g.frequency_norm(k);
    double a2 = std::norm(F.coefficients[k]);
    if (r == 0.0) {
      lhs.add(a2 * zero_cell_weight(g, e));
      continue;
    }
    double kap = 2.0 * pi * r;
    lhs.add(a2 * std::pow(kap, e) * dxi);
    grad.add(a2 * std::pow(kap, 2.0 * s) * dxi);
  }
  if (n == 1 && g.size() > 2) {
    // next Euler-Maclaurin term, g''(0) from the first mode
    const double d = 1.0 / g.period(0);
    double g2 = 2.0 * (std::norm(F.coefficients[1]) - std::norm(F.coefficients[0])) / (d * d);
    lhs.add(-boost::math::zeta(-e - 2.0) * g2 * std::pow(d, e + 3.0) * std::pow(2.0 * pi, e));
  }
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    auto x = g.point(i);
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    xn.add(r2 * u.values[i] * u.values[i]);
  }
  UncertaintyTerms t;
  t.lhs = lhs.value();
  t.x_norm = std::sqrt(xn.value() * g.cell_volume());
  t.grad_norm = std::sqrt(grad.value());
  t.rhs = 2.0 / (n + s - 1.0) * t.x_norm * t.grad_norm;
  return t;
}

double uncertainty_gap(const SampledField& u, double s) {
  auto t = uncertainty_terms(u, s);
  return t.rhs - t.lhs;
}

}  // namespace fraclab::reference
