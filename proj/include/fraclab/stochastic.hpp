#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "fraclab/common.hpp"
#include "fraclab/field.hpp"

namespace fraclab::stochastic {

// Counter-based generator: the stream for (seed, walker) does not depend on scheduling.
class StreamRng {
 public:
  using result_type = std::uint64_t;
  StreamRng(std::uint64_t seed, std::uint64_t stream);
  result_type operator()();
  double uniform();  // [0, 1)
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

struct WalkParams {
  FracOrder s{0.5};
  Dimension n{1};
  double h = 0.01;
  long steps = 0;
  std::uint64_t seed = 0;

  double tau() const;  // h^{2s}
  void validate() const;
};

class JumpSampler {
 public:
  static constexpr long table_size = 10000;

  explicit JumpSampler(FracOrder s);
  double s() const { return s_; }
  double probability(double k) const;  // c_s k^{-1-2s}
  double total_mass() const;           // table mass + analytic tail
  // Positive integer, returned as a double since the tail is unbounded.
  double sample(StreamRng& rng) const;

 private:
  double s_;
  double cs_;
  std::vector<double> cdf_;  // cdf_[k-1] = P(1..k)
  double tail_mass_;
};

double sample_jump(const JumpSampler& sampler, StreamRng& rng);

// Rate at which the walk density follows d_t rho = -rate (-Delta)^s rho, per unit of walk time.
double walk_rate(Dimension n, FracOrder s);

// Histogram of walker positions after p.steps steps from the origin, wrapped onto the bins' period.
SampledField simulate_density(const WalkParams& p, long walkers, const PeriodicGrid& bins);
// Same with T = steps * tau, which must hold up to rounding.
SampledField simulate_density(const WalkParams& p, long walkers, double T, const PeriodicGrid& bins);

struct Interval {
  double a = 0.0;
  double b = 1.0;
  bool contains(double x) const { return x > a && x < b; }
};

struct PayoffResult {
  double mean = 0.0;
  double std_error = 0.0;
  long walkers = 0;
  long failures = 0;  // walkers stopped by the step guard, excluded from the mean
  double mean_steps = 0.0;
};

// Expected exterior payoff u0(first exit position) of the 1D walk started at x0.
PayoffResult payoff_mc(const Interval& omega, const Fn1& u0, double x0, const WalkParams& p, long walkers,
                       long max_steps = 10000000);

}  // namespace fraclab::stochastic
