#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fraclab {

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fractional order, 0 < s < 1.
class FracOrder {
 public:
  explicit FracOrder(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0)) throw DomainError("fractional order must lie in (0,1)");
  }
  double value() const { return s_; }
  operator double() const { return s_; }

 private:
  double s_;
};

class Dimension {
 public:
  explicit Dimension(int n) : n_(n) {
    if (n < 1) throw DomainError("dimension must be >= 1");
  }
  int value() const { return n_; }
  operator int() const { return n_; }

 private:
  int n_;
};

using Fn1 = std::function<double(double)>;
using FnN = std::function<double(const std::vector<double>&)>;

// Worker count used by the parallel loops; 0 means hardware concurrency.
void set_threads(int n);
int threads();

// Runs body(i) for i in [0, count). Each index is visited exactly once, so results
// written per index are independent of the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

// Neumaier-compensated accumulator.
struct KahanSum {
  double sum = 0.0;
  double c = 0.0;
  void add(double x);
  double value() const { return sum + c; }
};

}  // namespace fraclab
