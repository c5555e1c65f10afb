#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fraclab/common.hpp"

namespace fraclab::geometry {

// Closed intervals, sorted and disjoint; the first and last ends may be infinite.
struct IntervalSet {
  std::vector<std::pair<double, double>> iv;

  IntervalSet() = default;
  explicit IntervalSet(std::vector<std::pair<double, double>> intervals);
  static IntervalSet line();

  void validate() const;
  bool contains(double x) const;
  double measure() const;
  IntervalSet complement() const;
  IntervalSet intersect(const IntervalSet& o) const;
  IntervalSet minus(const IntervalSet& o) const;
  std::vector<double> boundary() const;  // finite endpoints
};

// Box with positive volume, 1D or 2D.
struct Window {
  std::vector<double> lo, hi;
  Window(std::vector<double> lo, std::vector<double> hi);
  int dim() const { return static_cast<int>(lo.size()); }
  bool contains(const std::vector<double>& x) const;  // open box
  IntervalSet interval() const;                       // 1D only
};

// Binary mask on cells of size h; cell (i, j) covers [x0 + i h, x0 + (i+1) h] x [y0 + j h, ...].
// Points outside the mask box belong to the set iff exterior_inside.
struct PixelSet {
  int nx = 0, ny = 0;
  double h = 1.0;
  double x0 = 0.0, y0 = 0.0;
  std::vector<unsigned char> mask;  // index j * nx + i
  bool exterior_inside = false;

  static PixelSet from_predicate(int nx, int ny, double h, double x0, double y0,
                                 const std::function<bool(double, double)>& inside, bool exterior_inside = false);
  void validate() const;
  bool at(int i, int j) const;  // any integer index, exterior fill outside
  bool contains(double x, double y) const;
  double cx(int i) const { return x0 + (i + 0.5) * h; }
  double cy(int j) const { return y0 + (j + 0.5) * h; }
};

using Membership = std::function<bool(const std::vector<double>&)>;

struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

// I(A, B) = int_A int_B |x - y|^{-n-2s}
double interaction(const IntervalSet& A, const IntervalSet& B, FracOrder s);
Estimate interaction(const PixelSet& A, const PixelSet& B, FracOrder s, double tol = 1e-8);

// I over two unit squares whose lower-left corners differ by (dx, dy) cells.
double unit_square_interaction(int dx, int dy, FracOrder s);

// I(E n Omega, E^c) + I(E \ Omega, Omega \ E), s < 1/2
double per_s(const IntervalSet& E, const Window& omega, FracOrder s);
Estimate per_s(const PixelSet& E, const Window& omega, FracOrder s, double tol = 1e-8);

struct NmcResult {
  double value = 0.0;
  bool converged = true;  // false when the innermost shell sums still move by more than tol
  int shells = 0;
};

inline constexpr double shell_ratio = 1.2;

// PV int (chi_E - chi_{E^c})(y) |y - x0|^{-n-2s} dy for n in {1, 2}
NmcResult nmc(const Membership& E, int n, const std::vector<double>& x0, FracOrder s, double tol = 1e-8,
              double r_min = 1e-6, double r_max = 1e6);
NmcResult nmc(const IntervalSet& E, double x0, FracOrder s, double tol = 1e-8);

struct BetaResult {
  std::vector<double> s;
  std::vector<double> values;  // 2s int_{E \ B_1} |y|^{-n-2s} dy
  double limit = 0.0;          // polynomial extrapolation to s = 0
};

BetaResult beta_e(const Membership& E, int n, const std::vector<double>& s_list, double r_max = 1e6);

double classical_per(const IntervalSet& E, const Window& omega);
// Length of the level-1/2 contour of the lightly smoothed mask, inside omega.
double classical_per(const PixelSet& E, const Window& omega);

}  // namespace fraclab::geometry
