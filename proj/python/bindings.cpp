#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fraclab/evolution.hpp"
#include "fraclab/extension.hpp"
#include "fraclab/fraclap.hpp"
#include "fraclab/geometry.hpp"
#include "fraclab/reference.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/stochastic.hpp"
#include "fraclab/variational.hpp"

namespace py = pybind11;
using namespace fraclab;
using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

namespace {

std::vector<double> vec(const Array& a) { return {a.data(), a.data() + a.size()}; }
Array arr(const std::vector<double>& v) { return Array(static_cast<py::ssize_t>(v.size()), v.data()); }

// Library workers may call back into Python; each call takes the GIL.
Fn1 wrap(py::function f) {
  auto keep = std::make_shared<py::function>(std::move(f));
  return [keep](double x) {
    py::gil_scoped_acquire g;
    return (*keep)(x).cast<double>();
  };
}

SampledField field1d(const Array& values, double period) {
  PeriodicGrid g(1, static_cast<int>(values.size()), period);
  return SampledField(g, vec(values));
}

std::vector<double> coords(const PeriodicGrid& g) {
  std::vector<double> x(g.points(0));
  for (int j = 0; j < g.points(0); ++j) x[j] = g.coord(0, j);
  return x;
}

geometry::IntervalSet intervals(const std::vector<std::pair<double, double>>& v) { return geometry::IntervalSet(v); }

}  // namespace

PYBIND11_MODULE(_fraclab, m) {
  m.doc() = "Fractional Laplacian numerics";
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
  py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

  m.def("set_threads", &set_threads, py::arg("n"));

  m.def("gamma", &specfun::gamma);
  m.def("beta", &specfun::beta);
  m.def("bessel_k", &specfun::bessel_k, py::arg("s"), py::arg("t"));
  m.def("cns_closed", [](int n, double s) { return specfun::cns_closed(Dimension(n), FracOrder(s)); }, py::arg("n"), py::arg("s"));
  m.def("cns_integral", [](int n, double s, double tol) { return specfun::cns_integral(Dimension(n), FracOrder(s), tol); },
        py::arg("n"), py::arg("s"), py::arg("tol") = 1e-10);

  m.def("fraclap_spectral",
        [](const Array& values, double period, double s) {
          return arr(fraclap::fraclap_spectral(field1d(values, period), s).values);
        },
        py::arg("values"), py::arg("period"), py::arg("s"),
        "Values on the grid -period/2 + j period/N, N a power of two.");
  m.def("fraclap_quadrature",
        [](py::function u, double x, double s, std::vector<double> kinks, std::string tail, double tail_value) {
          fraclap::QuadratureParams q;
          q.kinks = std::move(kinks);
          q.tail = tail == "zero" ? fraclap::TailModel::zero
                   : tail == "constant" ? fraclap::TailModel::constant
                   : tail == "mapped" ? fraclap::TailModel::mapped
                   : throw DomainError("tail must be zero, constant or mapped");
          q.tail_value = tail_value;
          auto f = wrap(std::move(u));
          py::gil_scoped_release r;
          return fraclap::fraclap_quadrature(f, x, FracOrder(s), q);
        },
        py::arg("u"), py::arg("x"), py::arg("s"), py::arg("kinks") = std::vector<double>{}, py::arg("tail") = "mapped",
        py::arg("tail_value") = 0.0);
  m.def("dirichlet_solve",
        [](double a, double b, int cells, double s, py::function exterior, double rhs) {
          fraclap::ExteriorProblem p;
          p.a = a, p.b = b, p.cells = cells, p.s = s;
          p.exterior_data = wrap(std::move(exterior));
          p.rhs = [rhs](double) { return rhs; };
          fraclap::DirichletSolution sol;
          {
            py::gil_scoped_release r;
            sol = fraclap::dirichlet_solve(p);
          }
          return py::make_tuple(arr(sol.x), arr(sol.u));
        },
        py::arg("a"), py::arg("b"), py::arg("cells"), py::arg("s"), py::arg("exterior"), py::arg("rhs") = 0.0);

  m.def("ball_constant", [](int n, double s) { return reference::ball_constant(Dimension(n), FracOrder(s)); });
  m.def("halfline_constant", [](double s) { return reference::halfline_constant(FracOrder(s)).c_s; });
  m.def("lemma_l1_lhs", [](double s) { return reference::lemma_l1_lhs(FracOrder(s), 1e-12); });

  m.def("simulate_density",
        [](double s, double h, long steps, long walkers, int points, double period, std::uint64_t seed) {
          stochastic::WalkParams p;
          p.s = FracOrder(s);
          p.h = h;
          p.steps = steps;
          p.seed = seed;
          PeriodicGrid g(1, points, period);
          SampledField rho;
          {
            py::gil_scoped_release r;
            rho = stochastic::simulate_density(p, walkers, g);
          }
          return py::make_tuple(arr(coords(g)), arr(rho.values));
        },
        py::arg("s"), py::arg("h"), py::arg("steps"), py::arg("walkers"), py::arg("points") = 256, py::arg("period") = 16.0,
        py::arg("seed") = 0);

  m.def("heat_evolve",
        [](const Array& values, double period, double s, double t) {
          return arr(evolution::heat_evolve(field1d(values, period), s, t).values);
        },
        py::arg("values"), py::arg("period"), py::arg("s"), py::arg("t"));
  m.def("dislocation_evolve",
        [](std::vector<double> x, std::vector<int> xi, double s, double gamma, double T, std::vector<double> samples) {
          evolution::DislocationState st;
          st.x = std::move(x);
          st.xi = std::move(xi);
          st.s = s;
          st.gamma = gamma;
          auto tr = evolution::dislocation_evolve(st, T, 1e-10, samples);
          py::list ev;
          for (const auto& e : tr.events) ev.append(py::make_tuple(e.i, e.j, e.t));
          py::dict d;
          d["t"] = tr.t;
          d["x"] = tr.x;
          d["events"] = ev;
          d["sample_times"] = tr.sample_times;
          d["samples"] = tr.samples;
          return d;
        },
        py::arg("x"), py::arg("xi"), py::arg("s") = 0.5, py::arg("gamma") = 1.0, py::arg("T") = 1.0,
        py::arg("samples") = std::vector<double>{});

  m.def("extension_profile",
        [](double s) {
          auto p = extension::profile_g(FracOrder(s));
          py::dict d;
          d["t"] = arr(p.t);
          d["g"] = arr(p.g);
          d["dg"] = arr(p.dg);
          d["c_sharp"] = p.c_sharp;
          d["residual"] = p.residual;
          return d;
        },
        py::arg("s"));
  m.def("neumann_trace",
        [](const Array& values, double period, double s, double y) {
          return arr(extension::neumann_trace(field1d(values, period), FracOrder(s), y).values);
        },
        py::arg("values"), py::arg("period"), py::arg("s"), py::arg("y_probe") = 1e-3);

  m.def("interaction",
        [](std::vector<std::pair<double, double>> A, std::vector<std::pair<double, double>> B, double s) {
          return geometry::interaction(intervals(A), intervals(B), FracOrder(s));
        },
        py::arg("A"), py::arg("B"), py::arg("s"));
  m.def("per_s",
        [](std::vector<std::pair<double, double>> E, double lo, double hi, double s) {
          return geometry::per_s(intervals(E), geometry::Window({lo}, {hi}), FracOrder(s));
        },
        py::arg("E"), py::arg("lo"), py::arg("hi"), py::arg("s"));
  m.def("nmc",
        [](std::vector<std::pair<double, double>> E, double x0, double s) {
          return geometry::nmc(intervals(E), x0, FracOrder(s)).value;
        },
        py::arg("E"), py::arg("x0"), py::arg("s"));

  m.def("ground_state",
        [](double s, double p, double period, int points, double tol) {
          variational::GroundStateProblem prob(s, p, period, points);
          variational::GroundState gs;
          {
            py::gil_scoped_release r;
            gs = variational::ground_state(prob, tol);
          }
          return py::make_tuple(arr(coords(gs.w.grid)), arr(gs.w.values), gs.residual);
        },
        py::arg("s"), py::arg("p"), py::arg("period") = 400.0, py::arg("points") = 16384, py::arg("tol") = 1e-10);
  m.def("decay_fit",
        [](const Array& values, double period, double lo, double hi) {
          return variational::decay_fit(field1d(values, period), lo, hi);
        },
        py::arg("values"), py::arg("period"), py::arg("lo"), py::arg("hi"));
  m.def("ac_minimize",
        [](double R, int cells, double s, py::function exterior, double tol) {
          variational::ACProblem p;
          p.R = R;
          p.cells = cells;
          p.s = s;
          p.exterior = wrap(std::move(exterior));
          variational::ACResult r;
          {
            py::gil_scoped_release rel;
            r = variational::ac_minimize(p, tol);
          }
          return py::make_tuple(arr(coords(r.u.grid)), arr(r.u.values), arr(r.energy));
        },
        py::arg("R"), py::arg("cells"), py::arg("s"), py::arg("exterior"), py::arg("tol") = 1e-8);
}
