#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include "cli.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/reference.hpp"
#include "fraclab/specfun.hpp"

namespace fraclab::cli {

using std::numbers::pi;
namespace sf = fraclab::specfun;
namespace ref = fraclab::reference;
namespace geo = fraclab::geometry;

namespace {

std::string tag(const std::string& base, double s) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s[s=%g]", base.c_str(), s);
  return buf;
}

std::string tag(const std::string& base, double s, double x) {
  char buf[80];
  std::snprintf(buf, sizeof buf, "%s[s=%g;x=%g]", base.c_str(), s, x);
  return buf;
}

std::vector<CheckRow> suite_constants() {
  std::vector<CheckRow> rows;
  for (int n : {1, 2, 3})
    for (double s : {0.25, 0.5, 0.75}) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "cns_integral[n=%d;s=%g]", n, s);
      double c = sf::cns_closed(Dimension(n), FracOrder(s));
      rows.push_back(check_rel(buf, sf::cns_integral(Dimension(n), FracOrder(s), 1e-10), c, 1e-6));
    }
  rows.push_back(check_abs("C[n=1;s=0.5]", sf::cns_integral(Dimension(1), FracOrder(0.5), 1e-10), 1.0 / pi, 1e-8));
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9})
    rows.push_back(check_abs(tag("lemma_l1", s), ref::lemma_l1_lhs(FracOrder(s), 1e-12), 1.0 / s, 1e-8));
  return rows;
}

std::vector<CheckRow> suite_halfline() {
  std::vector<CheckRow> rows;
  for (double s : {0.25, 0.5, 0.75}) {
    fraclap::QuadratureParams q;
    q.kinks = {0.0};
    Fn1 u = [s](double x) { return x > 0 ? std::pow(x, s) : 0.0; };
    for (double x : {0.5, 1.0, 2.0})
      rows.push_back(check_abs(tag("harmonic", s, x), fraclap::fraclap_quadrature(u, x, FracOrder(s), q), 0.0, 1e-4));
    double v1 = fraclap::fraclap_quadrature(u, -1.0, FracOrder(s), q);
    for (double lam : {2.0, 4.0, 8.0}) {
      double v = fraclap::fraclap_quadrature(u, -lam, FracOrder(s), q);
      rows.push_back(check_rel(tag("scaling", s, -lam), v / v1, std::pow(lam, -s), 1e-6));
    }
    auto c = ref::halfline_constant(FracOrder(s));
    rows.push_back(check_rel(tag("c_s", s), ref::halfline_fraclap(-3.0, FracOrder(s), c),
                             fraclap::fraclap_quadrature(u, -3.0, FracOrder(s), q), 1e-6));
  }
  return rows;
}

std::vector<CheckRow> suite_ball() {
  std::vector<CheckRow> rows;
  for (double s : {0.25, 0.5, 0.75}) {
    double closed = sf::cns_closed(Dimension(1), FracOrder(s)) * sf::beta(1 - s, s);
    rows.push_back(check_rel(tag("ball_constant", s), ref::ball_constant(Dimension(1), FracOrder(s)), closed, 1e-12));
    fraclap::QuadratureParams q;
    q.kinks = {-1.0, 1.0};
    q.tail = fraclap::TailModel::zero;
    Fn1 ball = [s](double x) { return std::fabs(x) < 1 ? std::pow(1 - x * x, s) : 0.0; };
    for (double x : {-0.5, 0.0, 0.5})
      rows.push_back(check_abs(tag("ball", s, x), fraclap::fraclap_quadrature(ball, x, FracOrder(s), q), closed, 1e-4));
  }
  rows.push_back(check_abs("ball[s=0.5;value]", ref::ball_constant(Dimension(1), FracOrder(0.5)), 1.0, 1e-4));
  return rows;
}

std::vector<CheckRow> suite_coarea() {
  std::vector<CheckRow> rows;
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  auto levels = [&](int dim, int N) {
    PeriodicGrid g(dim, N, 4.0);
    std::vector<double> vals(5);
    for (auto& v : vals) v = U(rng);
    std::uniform_int_distribution<int> pick(0, 4);
    std::vector<double> u(g.size());
    for (auto& x : u) x = vals[pick(rng)];
    return SampledField(g, u);
  };
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    auto u = t % 4 == 3 ? levels(2, 8) : levels(1, 64);
    worst = std::max(worst, ref::coarea_gap(u, 0.1 + 0.8 * (t % 10) / 9.0));
  }
  rows.push_back(check_abs("coarea_max_gap[100 fields]", worst, 0.0, 1e-10));

  std::uniform_real_distribution<double> S(-1.0, 1.0);
  PeriodicGrid g1(1, 2048, 64.0);
  double low = std::numeric_limits<double>::infinity();
  for (int f = 0; f < 20; ++f) {
    double c1 = S(rng), c2 = S(rng), m = S(rng), w = 0.5 + 0.5 * (S(rng) + 1.0);
    auto u = SampledField::from_function_1d(g1, [&](double x) {
      return std::exp(-pi * x * x) + c1 * std::exp(-pi * (x - m) * (x - m) / w) + c2 * x * std::exp(-x * x);
    });
    low = std::min(low, ref::uncertainty_gap(u, 0.2 + 0.03 * f));
  }
  rows.push_back(check_ge("uncertainty_min_gap[20 functions]", low, 0.0, 1e-10));
  return rows;
}

std::vector<CheckRow> suite_extension() {
  std::vector<CheckRow> rows;
  auto half = extension::profile_g(FracOrder(0.5));
  double worst = 0.0;
  for (std::size_t i = 0; i < half.t.size(); ++i) worst = std::max(worst, std::fabs(half.g[i] - std::exp(-half.t[i])));
  rows.push_back(check_abs("profile_exp[s=0.5]", worst, 0.0, 1e-8));
  rows.push_back(check_abs("c_sharp[s=0.5]", half.c_sharp, 1.0, 1e-8));
  PeriodicGrid g(1, 1024, 40.0);
  auto gu = SampledField::from_function_1d(g, [](double x) { return std::exp(-x * x); });
  for (double s : {0.25, 0.5, 0.75}) {
    auto p = extension::profile_g(FracOrder(s));
    double closed = std::pow(2.0, 1 - 2 * s) * std::tgamma(1 - s) / std::tgamma(s);
    rows.push_back(check_rel(tag("c_sharp", s), p.c_sharp, closed, 1e-4));
    for (double k : {2 * pi, 20 * pi})
      rows.push_back(check_rel(tag("mode_energy", s, k), extension::mode_energy(p, k), p.c_sharp * std::pow(k, 2 * s), 1e-3));
    auto tr = extension::neumann_trace(gu, p, 1e-3);
    auto L = fraclap::fraclap_spectral(gu, s);
    double err = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      err = std::max(err, std::fabs(tr.values[j] - p.c_sharp * L.values[j]));
      scale = std::max(scale, std::fabs(p.c_sharp * L.values[j]));
    }
    rows.push_back(check_abs(tag("neumann_trace_rel", s), err / scale, 0.0, 1e-2));
  }
  return rows;
}

std::vector<CheckRow> suite_perimeter() {
  std::vector<CheckRow> rows;
  geo::Window O({-3}, {3});
  geo::IntervalSet E1({{0, 1}}), E2({{0, 1}, {1.5, 2.5}});
  double ratio = geo::per_s(E2, O, FracOrder(0.49)) / geo::per_s(E1, O, FracOrder(0.49));
  rows.push_back(check_rel("per_ratio[s=0.49]", ratio, geo::classical_per(E2, O) / geo::classical_per(E1, O), 0.05));
  for (const auto* E : {&E1, &E2}) {
    double v = 2 * 0.01 * geo::per_s(*E, O, FracOrder(0.01));
    rows.push_back(check_rel(E == &E1 ? "small_s_limit[E1]" : "small_s_limit[E2]", v,
                             2 * E->intersect(O.interval()).measure(), 0.05));
  }
  auto cone = [](const std::vector<double>& y) { return y[1] * y[1] > y[0] * y[0]; };
  auto h = geo::nmc(cone, 2, {0.0, 0.0}, FracOrder(0.3), 1e-8);
  rows.push_back(check_abs("cone_nmc[s=0.3]", h.value, 0.0, 1e-4));
  auto b = geo::beta_e(cone, 2, {0.08, 0.04, 0.02, 0.01, 0.005});
  rows.push_back(check_abs("cone_beta", b.limit, 0.5 * 2 * pi, 1e-6));
  return rows;
}

const std::map<std::string, std::function<std::vector<CheckRow>()>>& suites() {
  static const std::map<std::string, std::function<std::vector<CheckRow>()>> m{
      {"constants", suite_constants}, {"halfline", suite_halfline}, {"ball", suite_ball},
      {"coarea", suite_coarea},       {"extension", suite_extension}, {"perimeter", suite_perimeter}};
  return m;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> n{"constants", "halfline", "ball", "coarea", "extension", "perimeter"};
  return n;
}

std::vector<CheckRow> run_suite(const std::string& suite, double tol_override) {
  std::vector<CheckRow> rows;
  if (suite == "all") {
    for (const auto& n : suite_names()) {
      auto r = suites().at(n)();
      rows.insert(rows.end(), r.begin(), r.end());
    }
  } else {
    auto it = suites().find(suite);
    if (it == suites().end()) throw UsageError("unknown suite \"" + suite + "\"");
    rows = it->second();
  }
  if (tol_override > 0.0)
    for (auto& r : rows) {
      r.tol = tol_override;
      r.pass = r.abs_err <= (r.relative ? r.tol * std::fabs(r.expected) : r.tol);
    }
  return rows;
}

}  // namespace fraclab::cli
