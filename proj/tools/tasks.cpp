#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "cli.hpp"
#include "fraclab/evolution.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/stochastic.hpp"
#include "fraclab/variational.hpp"

namespace fraclab::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Out {
  const Config& cfg;
  TaskOutput res;

  std::string path(const std::string& name) {
    fs::create_directories(cfg.out_dir);
    res.files.push_back(name);
    return (fs::path(cfg.out_dir) / name).string();
  }
  void field(const std::string& name, const SampledField& f) { write_csv(f, path(name)); }
  void table(const std::string& name, const std::vector<std::string>& header, const std::vector<std::vector<double>>& rows) {
    std::ofstream o(path(name));
    for (std::size_t k = 0; k < header.size(); ++k) o << (k ? "," : "") << header[k];
    o << "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < r.size(); ++k) o << (k ? "," : "") << format_double(r[k]);
      o << "\n";
    }
  }
  void summary(const std::string& name, const json& j) { std::ofstream(path(name)) << j.dump(2) << "\n"; }
};

double order(const Params& p, const std::string& key, double fallback) {
  double s = p.number(key, fallback);
  if (!(s > 0.0 && s < 1.0)) p.fail(key, "must lie in (0,1)");
  return s;
}

double positive(const Params& p, const std::string& key, double fallback) {
  double v = p.number(key, fallback);
  if (!(v > 0.0)) p.fail(key, "must be positive");
  return v;
}

int pow2(const Params& p, const std::string& key, long fallback) {
  long v = p.integer(key, fallback);
  if (v < 2 || v > (1L << 24) || (v & (v - 1))) p.fail(key, "must be a power of two");
  return static_cast<int>(v);
}

// Exterior data: a number, or {"power": p, "at": x0} for (x - x0)_+^p.
Fn1 exterior_data(const Params& P, const std::string& key) {
  if (!P.has(key)) return [](double) { return 0.0; };
  const auto& v = P.raw(key);
  if (v.is_number()) {
    double c = v.get<double>();
    return [c](double) { return c; };
  }
  if (v.is_object() && v.contains("power") && v["power"].is_number()) {
    double pw = v["power"].get<double>(), x0 = v.value("at", 0.0);
    if (!(pw >= 0.0)) P.fail(key, "power must be non-negative");
    return [pw, x0](double x) { return x > x0 ? std::pow(x - x0, pw) : 0.0; };
  }
  P.fail(key, "must be a number or {\"power\": p, \"at\": x0}");
}

void task_walk(const Params& P, Out& out) {
  P.only({"s", "n", "h", "steps", "walkers", "points", "period"});
  stochastic::WalkParams w;
  w.s = FracOrder(order(P, "s", 0.5));
  long n = P.integer("n", 1);
  if (n != 1 && n != 2) P.fail("n", "must be 1 or 2");
  w.n = Dimension(static_cast<int>(n));
  w.h = positive(P, "h", 0.05);
  w.steps = P.integer("steps", 0);
  if (w.steps < 0) P.fail("steps", "must be non-negative");
  w.seed = out.cfg.seed;
  long walkers = P.integer("walkers", 10000);
  if (walkers < 1) P.fail("walkers", "must be positive");
  PeriodicGrid bins(static_cast<int>(n), pow2(P, "points", 256), positive(P, "period", 16.0));
  auto rho = stochastic::simulate_density(w, walkers, bins);
  std::vector<std::string> head;
  for (int d = 0; d < bins.dim(); ++d) head.push_back(n == 1 ? "bin_center" : "bin_center" + std::to_string(d + 1));
  head.push_back("mass");
  std::vector<std::vector<double>> rows;
  double mean = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    rows.push_back(bins.point(i));
    rows.back().push_back(rho.values[i] * bins.cell_volume());
    mean += rows.back()[0] * rows.back().back();
  }
  out.table("histogram.csv", head, rows);
  out.summary("walk.json", {{"walkers", walkers}, {"steps", w.steps}, {"T", w.steps * w.tau()}, {"mean_x1", mean}});
  out.res.checks.push_back(check_abs("mass", integrate(rho), 1.0, 1e-9));
}

void task_heat(const Params& P, Out& out) {
  P.only({"s", "t", "points", "period", "width"});
  double s = order(P, "s", 0.5), t = P.number("t", 0.1), width = positive(P, "width", 1.0);
  if (!(t >= 0.0)) P.fail("t", "must be non-negative");
  PeriodicGrid g(1, pow2(P, "points", 1024), positive(P, "period", 64.0));
  auto u0 = SampledField::from_function_1d(g, [width](double x) { return std::exp(-x * x / (width * width)); });
  auto u = evolution::heat_evolve(u0, s, t);
  out.field("heat.csv", u);
  out.res.checks.push_back(check_rel("mass", integrate(u), integrate(u0), 1e-10));
  double lo = *std::min_element(u.values.begin(), u.values.end());
  out.res.checks.push_back(check_ge("min", lo, 0.0, 1e-8));
}

void task_dislocation(const Params& P, Out& out) {
  P.only({"x", "xi", "s", "gamma", "T", "sigma", "tol", "samples"});
  evolution::DislocationState st;
  st.x = P.numbers("x");
  for (double v : P.numbers("xi")) {
    if (v != 1.0 && v != -1.0) P.fail("xi", "entries must be +1 or -1");
    st.xi.push_back(static_cast<int>(v));
  }
  if (st.xi.size() != st.x.size()) P.fail("xi", "needs one orientation per position");
  for (std::size_t i = 0; i + 1 < st.x.size(); ++i)
    if (!(st.x[i] < st.x[i + 1])) P.fail("x", "positions must be strictly increasing");
  st.s = order(P, "s", 0.5);
  st.gamma = positive(P, "gamma", 1.0);
  double sigma = P.number("sigma", 0.0);
  if (sigma != 0.0) st.sigma = [sigma](double, double) { return sigma; };
  double T = positive(P, "T", 1.0), tol = positive(P, "tol", 1e-10);
  auto tr = evolution::dislocation_evolve(st, T, tol, P.numbers("samples", {}));
  std::vector<std::string> head{"t"};
  for (std::size_t i = 0; i < st.x.size(); ++i) head.push_back("x" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  for (std::size_t k = 0; k < tr.t.size(); ++k) {
    rows.push_back({tr.t[k]});
    rows.back().insert(rows.back().end(), tr.x[k].begin(), tr.x[k].end());
  }
  out.table("trajectory.csv", head, rows);
  std::vector<std::vector<double>> ev;
  for (const auto& e : tr.events) ev.push_back({double(e.i), double(e.j), e.t});
  out.table("events.csv", {"i", "j", "t"}, ev);
  if (st.x.size() == 2 && st.xi[0] != st.xi[1] && sigma == 0.0) {
    double theta = st.x[1] - st.x[0];
    double bound = st.s * std::pow(theta, 1 + 2 * st.s) / ((2 * st.s + 1) * st.gamma * st.interaction);
    if (bound <= T)
      out.res.checks.push_back(check_abs("collision_time", tr.collided() ? tr.events[0].t : INFINITY, bound, 1e-6));
  }
}

void task_pn(const Params& P, Out& out) {
  P.only({"eps", "s", "centers", "times", "points", "period", "sigma"});
  const double eps = positive(P, "eps", 0.05), s = order(P, "s", 0.5), sigma = P.number("sigma", 0.0);
  auto centers = P.numbers("centers");
  if (centers.empty()) P.fail("centers", "needs at least one layer");
  for (std::size_t i = 0; i + 1 < centers.size(); ++i)
    if (!(centers[i] < centers[i + 1])) P.fail("centers", "must be strictly increasing");
  auto times = P.numbers("times", {0.0, 0.1, 0.2, 0.3, 0.4, 0.5});
  for (std::size_t i = 0; i < times.size(); ++i)
    if (!(times[i] >= 0.0) || (i && !(times[i] > times[i - 1]))) P.fail("times", "must be non-negative and increasing");
  PeriodicGrid g(1, pow2(P, "points", 4096), positive(P, "period", 8.0));
  auto W = evolution::DoubleWell::peierls_nabarro();
  auto layer = evolution::layer_solution(FracOrder(s), W);
  auto v0 = SampledField::from_function_1d(g, [&](double x) {
    double v = 0.0;
    for (double c : centers) v += layer((x - c) / eps);
    return v;
  });
  std::function<double(double, double)> sig;
  if (sigma != 0.0) sig = [sigma](double, double) { return sigma; };
  auto snaps = evolution::pn_evolve(v0, eps, FracOrder(s), sig, W, times);

  evolution::DislocationState st;
  st.x = centers;
  st.xi.assign(centers.size(), 1);
  st.s = s;
  st.gamma = evolution::gamma_const(layer);
  st.interaction = evolution::interaction_constant(FracOrder(s));
  st.sigma = sig;
  auto ode = evolution::dislocation_evolve(st, times.back(), 1e-10, times);

  std::vector<std::string> head{"t"};
  for (std::size_t i = 0; i < centers.size(); ++i) head.push_back("pde" + std::to_string(i));
  for (std::size_t i = 0; i < centers.size(); ++i) head.push_back("ode" + std::to_string(i));
  std::vector<std::vector<double>> rows;
  double worst = 0.0;
  for (std::size_t k = 0; k < snaps.size(); ++k) {
    std::vector<double> r{snaps[k].t};
    for (std::size_t i = 0; i < centers.size(); ++i) {
      auto c = evolution::level_crossings(snaps[k].v, i + 0.5);
      r.push_back(c.size() == 1 ? c[0] : std::numeric_limits<double>::quiet_NaN());
    }
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double o = k < ode.samples.size() ? ode.samples[k][i] : std::numeric_limits<double>::quiet_NaN();
      r.push_back(o);
      double d = std::fabs(r[1 + i] - o) / std::max(std::fabs(o), eps);
      worst = std::isnan(d) ? INFINITY : std::max(worst, d);
    }
    rows.push_back(r);
  }
  out.table("crossings.csv", head, rows);
  out.res.checks.push_back(check_abs("pde_vs_ode_rel", worst, 0.0, 0.1));
}

void task_dirichlet(const Params& P, Out& out) {
  P.only({"a", "b", "cells", "s", "rhs", "exterior", "margin_cells"});
  fraclap::ExteriorProblem ep;
  ep.a = P.number("a", -1.0);
  ep.b = P.number("b", 1.0);
  if (!(ep.a < ep.b)) P.fail("b", "must exceed a");
  long cells = P.integer("cells", 256);
  if (cells < 4) P.fail("cells", "must be at least 4");
  ep.cells = static_cast<int>(cells);
  ep.s = order(P, "s", 0.5);
  double rhs = P.number("rhs", 0.0);
  ep.rhs = [rhs](double) { return rhs; };
  ep.exterior_data = exterior_data(P, "exterior");
  ep.margin_cells = static_cast<int>(P.integer("margin_cells", -1));
  auto sol = fraclap::dirichlet_solve(ep);
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < sol.x.size(); ++i) rows.push_back({sol.x[i], sol.u[i]});
  out.table("solution.csv", {"x", "u"}, rows);
  // weak maximum principle with a non-negative source
  if (rhs >= 0.0) {
    double lo = INFINITY, ext = INFINITY;
    for (double u : sol.u) lo = std::min(lo, u);
    const double span = ep.b - ep.a;
    for (int k = 0; k <= 400; ++k) {
      double x = ep.a - span + 3.0 * span * k / 400.0;
      if (x <= ep.a || x >= ep.b) ext = std::min(ext, ep.exterior_data(x));
    }
    out.res.checks.push_back(check_ge("min_principle", lo, std::min(ext, 0.0), 1e-10));
  }
}

void task_groundstate(const Params& P, Out& out) {
  P.only({"s", "p", "period", "points", "tol", "max_iter", "decay_window"});
  const double s = order(P, "s", 0.5), p = P.number("p", 2.0);
  std::unique_ptr<variational::GroundStateProblem> prob;
  try {
    prob = std::make_unique<variational::GroundStateProblem>(s, p, positive(P, "period", 400.0),
                                                             pow2(P, "points", 16384));
  } catch (const DomainError& e) {
    P.fail("p", e.what());
  }
  const double tol = positive(P, "tol", 1e-10);
  auto gs = variational::ground_state(*prob, tol, static_cast<int>(P.integer("max_iter", 5000)));
  out.field("profile.csv", gs.w);
  auto win = P.numbers("decay_window", {20.0, 60.0});
  if (win.size() != 2) P.fail("decay_window", "needs two numbers");
  double k = variational::decay_fit(gs.w, win[0], win[1]);
  out.summary("groundstate.json", {{"residual", gs.residual}, {"iterations", gs.iterations}, {"decay_exponent", k}});
  out.res.checks.push_back(check_abs("residual", gs.residual, 0.0, tol));
  out.res.checks.push_back(check_abs("decay_exponent", k, -(1 + 2 * s), 0.3));
}

void task_perimeter(const Params& P, Out& out) {
  P.only({"s", "intervals", "window"});
  const double s = P.number("s", 0.25);
  if (!(s > 0.0 && s < 0.5)) P.fail("s", "must lie in (0,1/2)");
  const auto& iv = P.raw("intervals");
  std::vector<std::pair<double, double>> v;
  if (!iv.is_array()) P.fail("intervals", "must be an array of [a, b] pairs");
  for (const auto& e : iv) {
    auto num = [&](const json& x) -> double {
      if (x.is_number()) return x.get<double>();
      if (x == "-inf") return -INFINITY;
      if (x == "inf") return INFINITY;
      P.fail("intervals", "endpoints are numbers, \"inf\" or \"-inf\"");
    };
    if (!e.is_array() || e.size() != 2) P.fail("intervals", "must be an array of [a, b] pairs");
    v.emplace_back(num(e[0]), num(e[1]));
  }
  auto w = P.numbers("window", {-3.0, 3.0});
  if (w.size() != 2 || !(w[0] < w[1])) P.fail("window", "must be [lo, hi] with lo < hi");
  geometry::IntervalSet E;
  try {
    E = geometry::IntervalSet(v);
  } catch (const DomainError& e) {
    P.fail("intervals", e.what());
  }
  geometry::Window O({w[0]}, {w[1]});
  double per = geometry::per_s(E, O, FracOrder(s)), cl = geometry::classical_per(E, O);
  json curv = json::array();
  for (double x : E.boundary()) curv.push_back({{"x", x}, {"nmc", geometry::nmc(E, x, FracOrder(s)).value}});
  out.summary("perimeter.json", {{"s", s}, {"per_s", per}, {"classical", cl}, {"scaled", (1 - 2 * s) * per}, {"nmc", curv}});
  out.res.checks.push_back(check_ge("per_s_nonnegative", per, 0.0, 0.0));
}

void task_extend(const Params& P, Out& out) {
  P.only({"s", "y", "points", "period", "width", "y_probe"});
  const double s = order(P, "s", 0.5), y = P.number("y", 0.5), width = positive(P, "width", 1.0);
  if (!(y >= 0.0)) P.fail("y", "must be non-negative");
  PeriodicGrid g(1, pow2(P, "points", 1024), positive(P, "period", 40.0));
  auto u = SampledField::from_function_1d(g, [width](double x) { return std::exp(-x * x / (width * width)); });
  auto prof = extension::profile_g(FracOrder(s));
  out.field("extension.csv", extension::extend(u, FracOrder(s), y));
  auto tr = extension::neumann_trace(u, prof, positive(P, "y_probe", 1e-3));
  out.field("neumann.csv", tr);
  auto L = fraclap::fraclap_spectral(u, s);
  double err = 0.0, scale = 0.0;
  for (std::size_t j = 0; j < g.size(); ++j) {
    err = std::max(err, std::fabs(tr.values[j] - prof.c_sharp * L.values[j]));
    scale = std::max(scale, std::fabs(prof.c_sharp * L.values[j]));
  }
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < prof.t.size(); ++i) rows.push_back({prof.t[i], prof.g[i], prof.dg[i]});
  out.table("profile.csv", {"t", "g", "dg"}, rows);
  out.summary("extension.json", {{"s", s}, {"c_sharp", prof.c_sharp}, {"ode_residual", prof.residual}});
  out.res.checks.push_back(check_abs("neumann_trace_rel", err / scale, 0.0, 1e-2));
}

}  // namespace

TaskOutput run_task(const Config& cfg) {
  static const std::map<std::string, void (*)(const Params&, Out&)> tasks{
      {"walk", task_walk},           {"heat", task_heat},         {"dislocation", task_dislocation},
      {"pn", task_pn},               {"dirichlet", task_dirichlet}, {"groundstate", task_groundstate},
      {"perimeter", task_perimeter}, {"extend", task_extend}};
  auto it = tasks.find(cfg.task);
  if (it == tasks.end()) throw UsageError("unknown task " + cfg.task);
  Params P(cfg);
  Out out{cfg, {}};
  it->second(P, out);
  return out.res;
}

}  // namespace fraclab::cli
