#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fraclab/fraclap.hpp"
#include "fraclab/specfun.hpp"
#include "fraclab/stochastic.hpp"

using namespace fraclab;
using namespace fraclab::stochastic;
using std::numbers::pi;

TEST_CASE("stream generator") {
  StreamRng a(1, 5), b(1, 5), c(2, 5), d(1, 6);
  bool differ_seed = false, differ_stream = false;
  for (int i = 0; i < 100; ++i) {
    auto x = a(), y = b(), z = c(), w = d();
    CHECK(x == y);
    differ_seed = differ_seed || x != z;
    differ_stream = differ_stream || x != w;
  }
  CHECK(differ_seed);
  CHECK(differ_stream);
  StreamRng u(3, 0);
  double mean = 0.0;
  for (int i = 0; i < 100000; ++i) {
    double v = u.uniform();
    CHECK_FALSE((v < 0.0 || v >= 1.0));
    mean += v / 100000;
  }
  CHECK(std::fabs(mean - 0.5) < 0.005);
}

TEST_CASE("jump law") {
  for (double s : {0.1, 0.5, 0.9}) CHECK(std::fabs(JumpSampler(FracOrder(s)).total_mass() - 1.0) < 1e-12);

  JumpSampler js(FracOrder(0.5));
  const long M = 1000000;
  long c1 = 0, c2 = 0;
  StreamRng rng(42, 0);
  for (long i = 0; i < M; ++i) {
    double k = sample_jump(js, rng);
    CHECK_FALSE((k < 1.0 || k != std::floor(k)));
    c1 += k == 1.0;
    c2 += k == 2.0;
  }
  CHECK(std::fabs(double(c1) / M - 6.0 / (pi * pi)) < 0.003);
  CHECK(std::fabs(double(c2) / c1 - 0.25) < 0.01);

  // s = 0.9 has a finite mean zeta(1.8)/zeta(2.8)
  JumpSampler j9(FracOrder(0.9));
  StreamRng r9(9, 0);
  double mean = 0.0;
  for (long i = 0; i < M; ++i) mean += sample_jump(j9, r9);
  mean /= M;
  double oracle = specfun::zeta(1.8) / specfun::zeta(2.8);
  CHECK(std::fabs(mean / oracle - 1.0) < 0.02);
}

TEST_CASE("tail sampler matches the discrete law beyond the table") {
  // conditional law of k > K: P(k > 2K | k > K) = tail(2K) / tail(K)
  JumpSampler js(FracOrder(0.25));
  StreamRng rng(5, 0);
  const double K = JumpSampler::table_size;
  long beyond = 0, far = 0;
  for (long i = 0; i < 4000000; ++i) {
    double k = js.sample(rng);
    if (k > K) {
      ++beyond;
      far += k > 2 * K;
    }
  }
  double oracle = specfun::zeta_tail(1.5, 2 * K) / specfun::zeta_tail(1.5, K);
  double p = double(far) / beyond;
  double sd = std::sqrt(oracle * (1 - oracle) / beyond);
  CHECK(beyond > 1000);
  CHECK(std::fabs(p - oracle) < 4 * sd);
}

TEST_CASE("walk density") {
  PeriodicGrid bins(1, 1024, 51.2);
  WalkParams p;
  p.s = FracOrder(0.5);
  p.h = 0.05;
  p.seed = 3;
  auto rho0 = simulate_density(p, 10000, 0.0, bins);
  CHECK(rho0.values[512] * bins.cell_volume() == doctest::Approx(1.0));
  CHECK(integrate(rho0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(simulate_density(p, 10000, 0.123, bins), DomainError);

  auto rho = simulate_density(p, 200000, 0.5, bins);
  double mass = 0.0, mean = 0.0, second = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    CHECK(rho.values[i] >= 0.0);
    double x = bins.point(i)[0], w = rho.values[i] * bins.cell_volume();
    mass += w;
    mean += x * w;
    second += x * x * w;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::fabs(mean) < 3 * std::sqrt(second / 200000));

  // periodized fractional heat kernel at time rate * T, through the Fourier multiplier
  auto delta = SampledField(bins, rho0.values);
  double kt = walk_rate(Dimension(1), FracOrder(0.5)) * 0.5;
  CHECK(walk_rate(Dimension(1), FracOrder(0.5)) == doctest::Approx(3.0 / pi));
  auto heat = fraclap::apply_radial_multiplier(delta, [kt](double r) { return std::exp(-kt * 2 * pi * r); });
  double l1 = 0.0;
  for (std::size_t i = 0; i < bins.size(); ++i) l1 += std::fabs(heat.values[i] - rho.values[i]) * bins.cell_volume();
  CHECK(l1 < 0.05);

  // reproducible
  auto again = simulate_density(p, 200000, 0.5, bins);
  CHECK(again.values == rho.values);
  p.seed = 4;
  CHECK(simulate_density(p, 200000, 0.5, bins).values != rho.values);
}

TEST_CASE("walk density in the plane") {
  PeriodicGrid bins(2, 64, 6.4);
  WalkParams p;
  p.s = FracOrder(0.75);
  p.n = Dimension(2);
  p.h = 0.1;
  p.steps = 5;
  auto rho = simulate_density(p, 50000, bins);
  CHECK(integrate(rho) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(simulate_density(p, 100, PeriodicGrid(1, 64, 6.4)), DomainError);
}

TEST_CASE("payoff") {
  WalkParams p;
  p.s = FracOrder(0.5);
  p.h = 0.01;
  p.seed = 1;
  Interval omega{0.0, 1.0};
  auto one = payoff_mc(omega, [](double) { return 1.0; }, 0.5, p, 20000);
  CHECK(one.mean == 1.0);
  CHECK(one.failures == 0);
  auto outside = payoff_mc(omega, [](double x) { return x * x; }, 1.5, p, 100);
  CHECK(outside.mean == 2.25);
  CHECK(outside.std_error == 0.0);
  auto sq = [](double x) { return x > 0 ? std::sqrt(x) : 0.0; };
  auto r = payoff_mc(omega, sq, 0.25, p, 100000);
  CHECK(std::fabs(r.mean - 0.5) < 0.02);
  CHECK(r.std_error > 0.0);
  // reproducible by seed
  auto r2 = payoff_mc(omega, sq, 0.25, p, 100000);
  CHECK(r2.mean == r.mean);
  // guard
  auto g = payoff_mc(omega, sq, 0.5, p, 10000, 1);
  CHECK(g.failures > 0);
  CHECK(g.failures < 10000);
  CHECK_THROWS_AS(payoff_mc(omega, sq, 0.5, p, 100, 0), ConvergenceError);
}

TEST_CASE("payoff against the Dirichlet solver") {
  WalkParams p;
  p.s = FracOrder(0.5);
  p.h = 0.01;
  p.seed = 17;
  std::vector<Fn1> data{[](double x) { return x > 0 ? std::sqrt(x) : 0.0; },
                        [](double x) { return x >= 1 ? 1.0 : 0.0; }};
  for (const auto& u0 : data) {
    fraclap::ExteriorProblem ep;
    ep.a = 0.0;
    ep.b = 1.0;
    ep.s = 0.5;
    ep.exterior_data = u0;
    ep.cells = 256;
    auto fine = fraclap::dirichlet_solve(ep);
    ep.cells = 128;
    auto coarse = fraclap::dirichlet_solve(ep);
    for (double x0 : {0.25, 0.5, 0.75}) {
      auto at = [x0](const fraclap::DirichletSolution& d) {
        for (std::size_t i = 0; i < d.x.size(); ++i)
          if (std::fabs(d.x[i] - x0) < 1e-12) return d.u[i];
        return std::numeric_limits<double>::quiet_NaN();
      };
      double uf = at(fine), uc = at(coarse);
      auto mc = payoff_mc(Interval{0.0, 1.0}, u0, x0, p, 100000);
      double se = std::hypot(mc.std_error, std::fabs(uf - uc));
      CHECK(std::fabs(mc.mean - uf) < 3 * se);
    }
  }
}
