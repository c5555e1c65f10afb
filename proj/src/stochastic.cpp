#include "fraclab/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fraclab/specfun.hpp"

namespace fraclab::stochastic {

namespace {

std::uint64_t splitmix(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr long kBlock = 4096;

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::uint64_t stream)
    : key_(splitmix(seed) ^ splitmix(stream * 0xD1B54A32D192ED03ULL + 0x632BE59BD9B4E019ULL)) {}

StreamRng::result_type StreamRng::operator()() { return splitmix(key_ + 0x9E3779B97F4A7C15ULL * ++counter_); }

double StreamRng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double WalkParams::tau() const { return std::pow(h, 2.0 * s.value()); }

void WalkParams::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw DomainError("walk: h must be positive");
  if (steps < 0) throw DomainError("walk: steps must be nonnegative");
}

JumpSampler::JumpSampler(FracOrder s) : s_(s.value()), cs_(specfun::walk_normalizer(s)) {
  const double p = 1.0 + 2.0 * s_;
  cdf_.resize(table_size);
  KahanSum acc;
  for (long k = 1; k <= table_size; ++k) {
    acc.add(cs_ * std::pow(static_cast<double>(k), -p));
    cdf_[k - 1] = acc.value();
  }
  tail_mass_ = cs_ * specfun::zeta_tail(p, static_cast<double>(table_size));
}

double JumpSampler::probability(double k) const {
  if (k < 1.0 || k != std::floor(k)) return 0.0;
  return cs_ * std::pow(k, -1.0 - 2.0 * s_);
}

double JumpSampler::total_mass() const { return cdf_.back() + tail_mass_; }

double JumpSampler::sample(StreamRng& rng) const {
  const double u = rng.uniform() * total_mass();
  if (u < cdf_.back()) {
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    return static_cast<double>(it - cdf_.begin() + 1);
  }
  // Pareto proposal on x >= K + 1/2 rounded to k; accept k^{-p} / int_{k-1/2}^{k+1/2} x^{-p}
  const double two_s = 2.0 * s_;
  const double x0 = table_size + 0.5;
  for (;;) {
    double v = 1.0 - rng.uniform();
    double x = x0 * std::pow(v, -1.0 / two_s);
    double k = std::floor(x + 0.5);
    double a = -two_s * std::log1p(-0.5 / k), b = -two_s * std::log1p(0.5 / k);
    double accept = two_s / (k * std::exp(b) * std::expm1(a - b));
    if (rng.uniform() < accept) return k;
  }
}

double sample_jump(const JumpSampler& sampler, StreamRng& rng) { return sampler.sample(rng); }

double walk_rate(Dimension n, FracOrder s) {
  return specfun::walk_normalizer(s) / (specfun::sphere_measure(n) * specfun::cns_closed(n, s));
}

namespace {

void direction(StreamRng& rng, int n, std::vector<double>& v) {
  if (n == 1) {
    v[0] = (rng() >> 63) ? 1.0 : -1.0;
    return;
  }
  std::normal_distribution<double> N01;
  double r = 0.0;
  do {
    r = 0.0;
    for (int d = 0; d < n; ++d) {
      v[d] = N01(rng);
      r += v[d] * v[d];
    }
  } while (r == 0.0);
  r = std::sqrt(r);
  for (int d = 0; d < n; ++d) v[d] /= r;
}

double wrap(double x, double o, double L) {
  double y = std::fmod(x - o, L);
  if (y < 0) y += L;
  return o + y;
}

}  // namespace

SampledField simulate_density(const WalkParams& p, long walkers, const PeriodicGrid& bins) {
  p.validate();
  const int n = p.n;
  if (bins.dim() != n) throw DomainError("simulate_density: bin grid dimension differs from the walk");
  if (walkers < 1) throw DomainError("simulate_density: need walkers");
  JumpSampler sampler(p.s);
  const long blocks = (walkers + kBlock - 1) / kBlock;
  const std::size_t nb = bins.size();
  std::vector<std::vector<std::uint32_t>> counts(blocks);
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    auto& c = counts[blk];
    c.assign(nb, 0);
    std::vector<double> x(n), v(n);
    const long lo = static_cast<long>(blk) * kBlock, hi = std::min(walkers, lo + kBlock);
    for (long w = lo; w < hi; ++w) {
      StreamRng rng(p.seed, static_cast<std::uint64_t>(w));
      std::fill(x.begin(), x.end(), 0.0);
      for (long t = 0; t < p.steps; ++t) {
        double k = sampler.sample(rng);
        direction(rng, n, v);
        for (int d = 0; d < n; ++d) {
          double L = bins.period(d);
          x[d] = wrap(x[d] + v[d] * std::fmod(k * p.h, L), bins.origin(d), L);
        }
      }
      std::size_t flat = 0;
      for (int d = 0; d < n; ++d) {
        double j = std::floor((wrap(x[d], bins.origin(d), bins.period(d)) - bins.origin(d)) / bins.spacing(d) + 0.5);
        long N = bins.points(d);
        long jj = static_cast<long>(j) % N;
        flat = flat * N + static_cast<std::size_t>(jj);
      }
      ++c[flat];
    }
  });
  std::vector<std::uint64_t> total(nb, 0);
  for (const auto& c : counts)
    for (std::size_t i = 0; i < nb; ++i) total[i] += c[i];
  std::vector<double> rho(nb);
  const double norm = 1.0 / (static_cast<double>(walkers) * bins.cell_volume());
  for (std::size_t i = 0; i < nb; ++i) rho[i] = static_cast<double>(total[i]) * norm;
  return SampledField(bins, std::move(rho));
}

SampledField simulate_density(const WalkParams& p, long walkers, double T, const PeriodicGrid& bins) {
  if (!(T >= 0.0)) throw DomainError("simulate_density: T must be nonnegative");
  double steps = T / p.tau();
  double r = std::round(steps);
  if (std::fabs(steps - r) > 1e-9 * std::max(1.0, r)) throw DomainError("simulate_density: T is not a multiple of tau");
  WalkParams q = p;
  q.steps = static_cast<long>(r);
  return simulate_density(q, walkers, bins);
}

PayoffResult payoff_mc(const Interval& omega, const Fn1& u0, double x0, const WalkParams& p, long walkers,
                       long max_steps) {
  p.validate();
  if (p.n != 1) throw DomainError("payoff_mc: one-dimensional walks only");
  if (!(omega.a < omega.b)) throw DomainError("payoff_mc: empty interval");
  if (walkers < 2) throw DomainError("payoff_mc: need at least two walkers");
  PayoffResult res;
  res.walkers = walkers;
  if (!omega.contains(x0)) {
    res.mean = u0(x0);
    return res;
  }
  JumpSampler sampler(p.s);
  // bounds in lattice units; lattice points on the boundary count as outside
  auto snap = [](double v) {
    double r = std::round(v);
    return std::fabs(v - r) < 1e-9 * std::max(1.0, std::fabs(r)) ? r : v;
  };
  const double ma = snap((omega.a - x0) / p.h), mb = snap((omega.b - x0) / p.h);
  std::vector<double> value(walkers, 0.0);
  std::vector<long> used(walkers, 0);
  std::vector<char> failed(walkers, 0);
  const long blocks = (walkers + kBlock - 1) / kBlock;
  parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t blk) {
    const long lo = static_cast<long>(blk) * kBlock, hi = std::min(walkers, lo + kBlock);
    for (long w = lo; w < hi; ++w) {
      StreamRng rng(p.seed, static_cast<std::uint64_t>(w));
      // position x0 + h m; m stays small while the walker is inside
      long long m = 0;
      long t = 0;
      for (;; ++t) {
        if (t >= max_steps) {
          failed[w] = 1;
          break;
        }
        double k = sampler.sample(rng);
        double sign = (rng() >> 63) ? 1.0 : -1.0;
        double next = static_cast<double>(m) + sign * k;
        if (!(next > ma && next < mb)) {
          value[w] = u0(x0 + p.h * next);
          break;
        }
        m += static_cast<long long>(sign * k);
      }
      used[w] = t + 1;
    }
  });
  KahanSum sum, sq, steps;
  long ok = 0;
  for (long w = 0; w < walkers; ++w) {
    steps.add(static_cast<double>(used[w]));
    if (failed[w]) {
      ++res.failures;
      continue;
    }
    ++ok;
    sum.add(value[w]);
  }
  if (ok < 2) throw ConvergenceError("payoff_mc: too few walkers exited");
  res.mean = sum.value() / ok;
  for (long w = 0; w < walkers; ++w)
    if (!failed[w]) sq.add((value[w] - res.mean) * (value[w] - res.mean));
  res.std_error = std::sqrt(sq.value() / (ok - 1) / ok);
  res.mean_steps = steps.value() / walkers;
  return res;
}

}  // namespace fraclab::stochastic
