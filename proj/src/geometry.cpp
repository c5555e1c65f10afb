#include "fraclab/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "fraclab/specfun.hpp"
#include "quad.hpp"

namespace fraclab::geometry {

using std::numbers::pi;
namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

// ---------------------------------------------------------------- sets

IntervalSet::IntervalSet(std::vector<std::pair<double, double>> intervals) : iv(std::move(intervals)) { validate(); }

IntervalSet IntervalSet::line() { return IntervalSet({{-inf, inf}}); }

void IntervalSet::validate() const {
  for (std::size_t k = 0; k < iv.size(); ++k) {
    auto [a, b] = iv[k];
    if (std::isnan(a) || std::isnan(b) || !(a < b)) throw DomainError("IntervalSet: need a < b");
    if (k + 1 < iv.size() && !(b < iv[k + 1].first)) throw DomainError("IntervalSet: intervals must be sorted and disjoint");
    if ((std::isinf(a) && a > 0) || (std::isinf(b) && b < 0)) throw DomainError("IntervalSet: bad infinite end");
  }
}

bool IntervalSet::contains(double x) const {
  for (auto [a, b] : iv)
    if (a <= x && x <= b) return true;
  return false;
}

double IntervalSet::measure() const {
  double m = 0.0;
  for (auto [a, b] : iv) m += b - a;
  return m;
}

IntervalSet IntervalSet::complement() const {
  IntervalSet c;
  double start = -inf;
  for (auto [a, b] : iv) {
    if (a > start) c.iv.emplace_back(start, a);
    start = b;
  }
  if (start < inf) c.iv.emplace_back(start, inf);
  return c;
}

IntervalSet IntervalSet::intersect(const IntervalSet& o) const {
  IntervalSet r;
  std::size_t i = 0, j = 0;
  while (i < iv.size() && j < o.iv.size()) {
    double a = std::max(iv[i].first, o.iv[j].first), b = std::min(iv[i].second, o.iv[j].second);
    if (a < b) r.iv.emplace_back(a, b);
    if (iv[i].second < o.iv[j].second) ++i;
    else ++j;
  }
  return r;
}

IntervalSet IntervalSet::minus(const IntervalSet& o) const { return intersect(o.complement()); }

std::vector<double> IntervalSet::boundary() const {
  std::vector<double> b;
  for (auto [lo, hi] : iv) {
    if (std::isfinite(lo)) b.push_back(lo);
    if (std::isfinite(hi)) b.push_back(hi);
  }
  return b;
}

Window::Window(std::vector<double> l, std::vector<double> h) : lo(std::move(l)), hi(std::move(h)) {
  if (lo.empty() || lo.size() != hi.size() || lo.size() > 2) throw DomainError("Window: need matching 1D or 2D bounds");
  for (std::size_t d = 0; d < lo.size(); ++d)
    if (!(lo[d] < hi[d]) || !std::isfinite(lo[d]) || !std::isfinite(hi[d])) throw DomainError("Window: empty or unbounded box");
}

bool Window::contains(const std::vector<double>& x) const {
  for (std::size_t d = 0; d < lo.size(); ++d)
    if (!(lo[d] < x[d] && x[d] < hi[d])) return false;
  return true;
}

IntervalSet Window::interval() const {
  if (dim() != 1) throw DomainError("Window: not one-dimensional");
  return IntervalSet({{lo[0], hi[0]}});
}

PixelSet PixelSet::from_predicate(int nx, int ny, double h, double x0, double y0,
                                  const std::function<bool(double, double)>& inside, bool exterior_inside) {
  PixelSet p;
  p.nx = nx, p.ny = ny, p.h = h, p.x0 = x0, p.y0 = y0, p.exterior_inside = exterior_inside;
  p.mask.assign(static_cast<std::size_t>(nx) * ny, 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) p.mask[static_cast<std::size_t>(j) * nx + i] = inside(p.cx(i), p.cy(j)) ? 1 : 0;
  p.validate();
  return p;
}

void PixelSet::validate() const {
  if (nx < 1 || ny < 1 || !(h > 0.0) || !std::isfinite(x0) || !std::isfinite(y0))
    throw DomainError("PixelSet: bad grid");
  if (mask.size() != static_cast<std::size_t>(nx) * ny) throw DomainError("PixelSet: mask size mismatch");
}

bool PixelSet::at(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx || j >= ny) return exterior_inside;
  return mask[static_cast<std::size_t>(j) * nx + i] != 0;
}

bool PixelSet::contains(double x, double y) const {
  double fi = std::floor((x - x0) / h), fj = std::floor((y - y0) / h);
  if (fi < 0 || fj < 0 || fi >= nx || fj >= ny) return exterior_inside;
  return at(static_cast<int>(fi), static_cast<int>(fj));
}

// ---------------------------------------------------------------- 1D interaction

namespace {

// expm1(p L) / p, continuous at p = 0
double em1p(double p, double L) { return p == 0.0 ? L : std::expm1(p * L) / p; }

// Phi(r2) - Phi(r1) with Phi'' = r^{-1-2s}, Phi' = -r^{-2s}/(2s); r1 may be 0 when s < 1/2
double phi_diff(double r1, double r2, double s) {
  const double p = 1.0 - 2.0 * s;
  if (r1 == r2) return 0.0;
  if (r1 == 0.0) return -std::pow(r2, p) / (2.0 * s * p);
  return -std::pow(r1, p) * em1p(p, std::log(r2 / r1)) / (2.0 * s);
}

// Phi(r) itself, only where it is finite and the constant matters (s > 1/2, Phi(inf) = 0)
double phi_abs(double r, double s) { return -std::pow(r, 1.0 - 2.0 * s) / (2.0 * s * (1.0 - 2.0 * s)); }

// A = [a1, a2] left of B = [b1, b2]
double pair_interaction(double a1, double a2, double b1, double b2, double s) {
  const double gap = b1 - a2;
  if (gap == 0.0 && s >= 0.5) throw DivergenceError("interaction: touching sets need s < 1/2");
  const bool ainf = std::isinf(a1), binf = std::isinf(b2);
  if (ainf && binf) {
    if (s <= 0.5) throw DivergenceError("interaction: two rays interact infinitely for s <= 1/2");
    return phi_abs(gap, s);
  }
  // I = [Phi(b2 - a1) - Phi(b1 - a1)] - [Phi(b2 - a2) - Phi(b1 - a2)]
  if (ainf) return -phi_diff(gap, b2 - a2, s);
  if (binf) return phi_diff(b1 - a1, gap, s);
  return phi_diff(b1 - a1, b2 - a1, s) - phi_diff(gap, b2 - a2, s);
}

}  // namespace

double interaction(const IntervalSet& A, const IntervalSet& B, FracOrder s) {
  A.validate();
  B.validate();
  KahanSum acc;
  for (auto [a1, a2] : A.iv)
    for (auto [b1, b2] : B.iv) {
      if (std::max(a1, b1) < std::min(a2, b2)) throw DivergenceError("interaction: sets overlap");
      acc.add(a2 <= b1 ? pair_interaction(a1, a2, b1, b2, s) : pair_interaction(b1, b2, a1, a2, s));
    }
  return acc.value();
}

double per_s(const IntervalSet& E, const Window& omega, FracOrder s) {
  if (!(s.value() < 0.5)) throw DomainError("per_s: need s < 1/2");
  IntervalSet O = omega.interval();
  IntervalSet Ec = E.complement();
  return interaction(E.intersect(O), Ec, s) + interaction(E.minus(O), O.minus(E), s);
}

// ---------------------------------------------------------------- 2D interaction

namespace {

// Pair integrals of unit squares, memoized by offset.
class SquareKernel {
 public:
  explicit SquareKernel(double s) : s_(s), alpha_(2.0 + 2.0 * s), c_(std::pow(2.0, 2.0 * s - 2.0)) {}

  double operator()(int dx, int dy) {
    int a = std::abs(dx), b = std::abs(dy);
    if (a < b) std::swap(a, b);
    if (a == 0) throw DivergenceError("interaction: sets overlap");
    auto key = std::make_pair(a, b);
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    double v;
    if (a >= 8) v = tent(a, b);
    else if (a >= 2) v = split(a, b);
    else v = touching(b);
    memo_[key] = v;
    return v;
  }

  // midpoint value with its second-order correction, and the size of the next term
  std::pair<double, double> distant(int dx, int dy) const {
    double r2 = double(dx) * dx + double(dy) * dy, r = std::sqrt(r2);
    double base = std::pow(r, -alpha_);
    double a2 = alpha_ * alpha_;
    return {base * (1.0 + a2 / (12.0 * r2)), base * a2 * (alpha_ + 2) * (alpha_ + 2) / (288.0 * r2 * r2)};
  }

 private:
  // int_{[-1,1]^2} (1-|u|)(1-|v|) |d + (u,v)|^{-alpha}
  double tent(int a, int b) const {
    double acc = 0.0;
    for (int sx : {-1, 1})
      for (int sy : {-1, 1})
        acc += detail::gauss<10>(
            [&](double u) {
              return detail::gauss<10>(
                  [&](double v) {
                    double X = a + sx * u, Y = b + sy * v;
                    return (1 - u) * (1 - v) * std::pow(X * X + Y * Y, -0.5 * alpha_);
                  },
                  0.0, 1.0);
            },
            0.0, 1.0);
    return acc;
  }

  // each square as four half squares; I scales by 2^{2s-2} under halving
  template <class F>
  void children(int a, int b, F&& f) {
    for (int dx = -1; dx <= 1; ++dx)
      for (int dy = -1; dy <= 1; ++dy) f(2 * a + dx, 2 * b + dy, (2 - std::abs(dx)) * (2 - std::abs(dy)));
  }

  double split(int a, int b) {
    double acc = 0.0;
    children(a, b, [&](int x, int y, int m) { acc += m * (*this)(x, y); });
    return c_ * acc;
  }

  // Self-similarity closes the touching cases: P = c (m_e E + m_k K + separated).
  double touching(int b) {
    if (b == 0 && s_ >= 0.5) throw DivergenceError("interaction: edge-adjacent cells need s < 1/2");
    double sep = 0.0;
    int me = 0, mk = 0;
    children(1, b, [&](int x, int y, int m) {
      int p = std::abs(x), q = std::abs(y);
      if (std::max(p, q) >= 2) sep += m * (*this)(x, y);
      else if (std::min(p, q) == 0) me += m;
      else mk += m;
    });
    if (b == 1) return c_ * sep / (1.0 - c_ * mk);  // no edge children
    double K = (*this)(1, 1);
    return c_ * (mk * K + sep) / (1.0 - c_ * me);
  }

  double s_, alpha_, c_;
  std::map<std::pair<int, int>, double> memo_;
};

using Cell = std::pair<int, int>;

Estimate cell_interaction(const std::vector<Cell>& A, const std::vector<Cell>& B, double s, double h, double tol) {
  if (A.empty() || B.empty()) return {};
  int ax0 = A[0].first, ax1 = ax0, ay0 = A[0].second, ay1 = ay0;
  for (auto [i, j] : A) ax0 = std::min(ax0, i), ax1 = std::max(ax1, i), ay0 = std::min(ay0, j), ay1 = std::max(ay1, j);
  int bx0 = B[0].first, bx1 = bx0, by0 = B[0].second, by1 = by0;
  for (auto [i, j] : B) bx0 = std::min(bx0, i), bx1 = std::max(bx1, i), by0 = std::min(by0, j), by1 = std::max(by1, j);
  const int ox = bx0 - ax1, oy = by0 - ay1;  // smallest offsets
  const int wx = bx1 - ax0 - ox + 1, wy = by1 - ay0 - oy + 1;
  std::vector<double> count(static_cast<std::size_t>(wx) * wy, 0.0);
  for (auto [ia, ja] : A)
    for (auto [ib, jb] : B) count[static_cast<std::size_t>(jb - ja - oy) * wx + (ib - ia - ox)] += 1.0;

  SquareKernel P(s);
  const double scale = std::pow(h, 2.0 - 2.0 * s);
  auto far_error = [&](int R) {
    double e = 0.0;
    for (int y = 0; y < wy; ++y)
      for (int x = 0; x < wx; ++x) {
        double c = count[static_cast<std::size_t>(y) * wx + x];
        int dx = x + ox, dy = y + oy;
        if (c == 0.0 || std::max(std::abs(dx), std::abs(dy)) <= R) continue;
        e += c * P.distant(dx, dy).second;
      }
    return e * scale;
  };
  int R = 4;
  while (R < 64 && far_error(R) > tol) R *= 2;
  KahanSum acc;
  double err = 0.0;
  for (int y = 0; y < wy; ++y)
    for (int x = 0; x < wx; ++x) {
      double c = count[static_cast<std::size_t>(y) * wx + x];
      if (c == 0.0) continue;
      int dx = x + ox, dy = y + oy;
      if (std::max(std::abs(dx), std::abs(dy)) <= R) {
        acc.add(c * P(dx, dy));
      } else {
        auto [v, e] = P.distant(dx, dy);
        acc.add(c * v);
        err += c * e;
      }
    }
  return {acc.value() * scale, err * scale};
}

// int over cell (i, j) of int_{outside box} |x - y|^{-2-2s} dy
double box_exterior(double X0, double X1, double Y0, double Y1, double cx, double cy, double h, double s) {
  auto ray = [s](double p, double t0, double t1) {
    // int over the side seen at normal distance p, tangential span [t0, t1]
    double f0 = std::atan(t0 / p), f1 = std::atan(t1 / p);
    return detail::gauss<20>([&](double f) { return std::pow(std::cos(f) / p, 2.0 * s); }, f0, f1);
  };
  const double g = 0.5 / std::sqrt(3.0);
  double acc = 0.0;
  for (double u : {-g, g})
    for (double v : {-g, g}) {
      double x = cx + u * h, y = cy + v * h;
      acc += ray(X1 - x, Y0 - y, Y1 - y) + ray(x - X0, Y0 - y, Y1 - y) + ray(Y1 - y, X0 - x, X1 - x) +
             ray(y - Y0, X0 - x, X1 - x);
    }
  return acc * 0.25 * h * h / (2.0 * s);
}

void same_grid(const PixelSet& A, const PixelSet& B) {
  if (A.nx != B.nx || A.ny != B.ny || A.h != B.h || A.x0 != B.x0 || A.y0 != B.y0)
    throw DomainError("interaction: pixel sets must share a grid");
}

}  // namespace

double unit_square_interaction(int dx, int dy, FracOrder s) { return SquareKernel(s.value())(dx, dy); }

Estimate interaction(const PixelSet& A, const PixelSet& B, FracOrder s, double tol) {
  A.validate();
  B.validate();
  same_grid(A, B);
  if (A.exterior_inside || B.exterior_inside) throw DomainError("interaction: pixel sets must be bounded");
  std::vector<Cell> ca, cb;
  for (int j = 0; j < A.ny; ++j)
    for (int i = 0; i < A.nx; ++i) {
      if (A.at(i, j) && B.at(i, j)) throw DivergenceError("interaction: sets overlap");
      if (A.at(i, j)) ca.emplace_back(i, j);
      if (B.at(i, j)) cb.emplace_back(i, j);
    }
  return cell_interaction(ca, cb, s.value(), A.h, tol);
}

Estimate per_s(const PixelSet& E, const Window& omega, FracOrder s, double tol) {
  E.validate();
  if (!(s.value() < 0.5)) throw DomainError("per_s: need s < 1/2");
  if (omega.dim() != 2) throw DomainError("per_s: window must be 2D");
  if (omega.lo[0] < E.x0 || omega.lo[1] < E.y0 || omega.hi[0] > E.x0 + E.nx * E.h || omega.hi[1] > E.y0 + E.ny * E.h)
    throw DomainError("per_s: window must lie inside the mask box");
  // a ring of exterior cells is resolved exactly, the rest by the exterior integral
  const int pad = 8;
  std::vector<Cell> in_o, out_o_e, out_o_c, ec_all;
  for (int j = -pad; j < E.ny + pad; ++j)
    for (int i = -pad; i < E.nx + pad; ++i) {
      bool e = E.at(i, j), o = omega.contains({E.cx(i), E.cy(j)});
      if (e && o) in_o.emplace_back(i, j);
      if (e && !o) out_o_e.emplace_back(i, j);
      if (!e && o) out_o_c.emplace_back(i, j);
      if (!e) ec_all.emplace_back(i, j);
    }
  const double X0 = E.x0 - pad * E.h, X1 = E.x0 + (E.nx + pad) * E.h;
  const double Y0 = E.y0 - pad * E.h, Y1 = E.y0 + (E.ny + pad) * E.h;
  auto tail = [&](const std::vector<Cell>& cells) {
    double acc = 0.0;
    for (auto [i, j] : cells) acc += box_exterior(X0, X1, Y0, Y1, E.cx(i), E.cy(j), E.h, s.value());
    return acc;
  };
  Estimate a = cell_interaction(in_o, ec_all, s.value(), E.h, 0.5 * tol);
  Estimate b = cell_interaction(out_o_e, out_o_c, s.value(), E.h, 0.5 * tol);
  Estimate r{a.value + b.value, a.error + b.error};
  if (E.exterior_inside) r.value += tail(out_o_c);
  else r.value += tail(in_o);
  return r;
}

// ---------------------------------------------------------------- shells

namespace {

// int_a^b r^{-1-2s} dr
double shell_weight(double a, double b, double s) {
  return std::pow(a, -2.0 * s) * -std::expm1(-2.0 * s * std::log(b / a)) / (2.0 * s);
}

// int_a^b v(r) r^{-1-2s} dr for piecewise-constant v, jumps located by bisection
double radial_piece(const std::function<double(double)>& v, double a, double b, double s) {
  constexpr int m = 6;
  double acc = 0.0, lo = a, prev_r = a, cur = v(a);
  for (int i = 1; i <= m; ++i) {
    double r = i == m ? b : a * std::pow(b / a, double(i) / m);
    double vr = v(r);
    if (vr != cur) {
      double L = prev_r, R = r;
      for (int it = 0; it < 60 && R - L > 1e-15 * R; ++it) {
        double mid = 0.5 * (L + R);
        (v(mid) == cur ? L : R) = mid;
      }
      if (cur != 0.0) acc += cur * shell_weight(lo, R, s);
      lo = R;
      cur = vr;
    }
    prev_r = r;
  }
  if (cur != 0.0) acc += cur * shell_weight(lo, b, s);
  return acc;
}

// Adaptive Simpson with a fixed absolute tolerance per panel so jumps refine locally.
double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb, double whole,
                   double eps, int depth) {
  double m = 0.5 * (a + b), lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm), right = (b - m) / 6 * (fm + 4 * frm + fb);
  if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps) return left + right + (left + right - whole) / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, eps, depth - 1) + simpson_rec(f, m, b, fm, frm, fb, right, eps, depth - 1);
}

double adaptive(const std::function<double(double)>& f, double a, double b, double eps, int panels = 32) {
  double acc = 0.0, w = (b - a) / panels;
  for (int k = 0; k < panels; ++k) {
    double x0 = a + k * w, x1 = x0 + w, xm = 0.5 * (x0 + x1);
    double f0 = f(x0), fm = f(xm), f1 = f(x1);
    acc += simpson_rec(f, x0, x1, f0, fm, f1, w / 6 * (f0 + 4 * fm + f1), eps / panels, 60);
  }
  return acc;
}

void check_dim(int n) {
  if (n != 1 && n != 2) throw DomainError("geometry: dimension must be 1 or 2");
}

}  // namespace

NmcResult nmc(const Membership& E, int n, const std::vector<double>& x0, FracOrder s, double tol, double r_min,
              double r_max) {
  check_dim(n);
  if (static_cast<int>(x0.size()) != n) throw DomainError("nmc: point dimension mismatch");
  if (!(0.0 < r_min && r_min < r_max) || !(tol > 0.0)) throw DomainError("nmc: bad shell range or tolerance");
  const double sv = s.value();
  auto sigma = [&](double theta, double r) {
    std::vector<double> y = x0;
    if (n == 1) y[0] += theta * r;
    else y[0] += r * std::cos(theta), y[1] += r * std::sin(theta);
    return E(y) ? 1.0 : -1.0;
  };
  // paired directions theta and theta + pi
  auto paired = [&](double theta, double a, double b) {
    double back = n == 1 ? -theta : theta + pi;
    return radial_piece([&](double r) { return sigma(theta, r); }, a, b, sv) +
           radial_piece([&](double r) { return sigma(back, r); }, a, b, sv);
  };
  auto over_angles = [&](const std::function<double(double)>& g, double eps) {
    return n == 1 ? g(1.0) : adaptive(g, 0.0, pi, eps);
  };
  std::vector<double> radii{r_min};
  while (radii.back() < r_max) radii.push_back(std::min(r_max, radii.back() * shell_ratio));
  const int shells = static_cast<int>(radii.size()) - 1;
  const double eps = 0.1 * tol / shells;

  double total = over_angles(
      [&](double th) {
        double back = n == 1 ? -th : th + pi;
        return (sigma(th, r_max) + sigma(back, r_max)) * std::pow(r_max, -2.0 * sv) / (2.0 * sv);
      },
      eps);
  std::vector<double> partial;
  for (int k = shells - 1; k >= 0; --k) {
    total += over_angles([&](double th) { return paired(th, radii[k], radii[k + 1]); }, eps);
    partial.push_back(total);
  }
  NmcResult res;
  res.value = total;
  res.shells = shells;
  std::size_t m = partial.size();
  if (m >= 4) {
    double spread = 0.0;
    for (std::size_t i = m - 3; i < m; ++i) spread = std::max(spread, std::fabs(partial[i] - partial[m - 4]));
    res.converged = spread <= tol;
  }
  return res;
}

NmcResult nmc(const IntervalSet& E, double x0, FracOrder s, double tol) {
  E.validate();
  bool on_boundary = false;
  for (double b : E.boundary()) on_boundary = on_boundary || b == x0;
  if (!on_boundary) throw DomainError("nmc: x0 must be a boundary point");
  return nmc([&E](const std::vector<double>& y) { return E.contains(y[0]); }, 1, {x0}, s, tol);
}

BetaResult beta_e(const Membership& E, int n, const std::vector<double>& s_list, double r_max) {
  check_dim(n);
  if (s_list.empty()) throw DomainError("beta_e: empty s list");
  if (!(r_max > 1.0)) throw DomainError("beta_e: r_max must exceed 1");
  BetaResult res;
  for (double s : s_list) {
    FracOrder so(s);
    auto chi = [&](double theta, double r) {
      std::vector<double> y(n);
      if (n == 1) y[0] = theta * r;
      else y[0] = r * std::cos(theta), y[1] = r * std::sin(theta);
      return E(y) ? 1.0 : 0.0;
    };
    auto dir = [&](double theta) {
      double acc = chi(theta, r_max) * std::pow(r_max, -2.0 * s) / (2.0 * s);
      for (double r = 1.0; r < r_max; r *= shell_ratio)
        acc += radial_piece([&](double q) { return chi(theta, q); }, r, std::min(r * shell_ratio, r_max), s);
      return 2.0 * s * acc;
    };
    double v = n == 1 ? dir(1.0) + dir(-1.0) : adaptive(dir, 0.0, 2.0 * pi, 1e-9);
    res.s.push_back(so.value());
    res.values.push_back(v);
  }
  // Neville at s = 0
  std::vector<double> p = res.values;
  const auto& x = res.s;
  for (std::size_t k = 1; k < p.size(); ++k)
    for (std::size_t i = p.size() - 1; i >= k; --i) p[i] = (x[i - k] * p[i] - x[i] * p[i - 1]) / (x[i - k] - x[i]);
  res.limit = p.back();
  return res;
}

// ---------------------------------------------------------------- classical perimeter

double classical_per(const IntervalSet& E, const Window& omega) {
  E.validate();
  if (omega.dim() != 1) throw DomainError("classical_per: window must be 1D");
  double c = 0.0;
  for (double b : E.boundary())
    if (omega.lo[0] < b && b < omega.hi[0]) c += 1.0;
  return c;
}

double classical_per(const PixelSet& E, const Window& omega) {
  E.validate();
  if (omega.dim() != 2) throw DomainError("classical_per: window must be 2D");
  const int pad = 3;
  const int W = E.nx + 2 * pad, H = E.ny + 2 * pad;
  std::vector<double> f(static_cast<std::size_t>(W) * H), tmp(f.size());
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) f[static_cast<std::size_t>(j) * W + i] = E.at(i - pad, j - pad) ? 1.0 : 0.0;
  // binomial smoothing, clamped at the padded edge
  const double k5[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(std::clamp(j, 0, H - 1)) * W + std::clamp(i, 0, W - 1); };
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      double a = 0;
      for (int q = -2; q <= 2; ++q) a += k5[q + 2] * f[idx(i + q, j)];
      tmp[static_cast<std::size_t>(j) * W + i] = a;
    }
  for (int j = 0; j < H; ++j)
    for (int i = 0; i < W; ++i) {
      double a = 0;
      for (int q = -2; q <= 2; ++q) a += k5[q + 2] * tmp[idx(i, j + q)];
      f[static_cast<std::size_t>(j) * W + i] = a - 0.5;
    }
  auto X = [&](double i) { return E.x0 + (i - pad + 0.5) * E.h; };
  auto Y = [&](double j) { return E.y0 + (j - pad + 0.5) * E.h; };
  KahanSum len;
  // segment length clipped to the window
  auto seg = [&](std::array<double, 2> p, std::array<double, 2> q) {
    double t0 = 0.0, t1 = 1.0;
    for (int d = 0; d < 2; ++d) {
      double dp = q[d] - p[d];
      if (dp == 0.0) {
        if (!(omega.lo[d] < p[d] && p[d] < omega.hi[d])) return;
        continue;
      }
      double ta = (omega.lo[d] - p[d]) / dp, tb = (omega.hi[d] - p[d]) / dp;
      t0 = std::max(t0, std::min(ta, tb));
      t1 = std::min(t1, std::max(ta, tb));
    }
    if (t1 > t0) len.add((t1 - t0) * std::hypot(q[0] - p[0], q[1] - p[1]));
  };
  for (int j = 0; j + 1 < H; ++j)
    for (int i = 0; i + 1 < W; ++i) {
      double v[4] = {f[idx(i, j)], f[idx(i + 1, j)], f[idx(i + 1, j + 1)], f[idx(i, j + 1)]};
      double px[4] = {X(i), X(i + 1), X(i + 1), X(i)}, py[4] = {Y(j), Y(j), Y(j + 1), Y(j + 1)};
      std::vector<std::array<double, 2>> cut;
      std::vector<int> edge;
      for (int e = 0; e < 4; ++e) {
        int a = e, b = (e + 1) % 4;
        if ((v[a] > 0) != (v[b] > 0)) {
          double t = v[a] / (v[a] - v[b]);
          cut.push_back({px[a] + t * (px[b] - px[a]), py[a] + t * (py[b] - py[a])});
          edge.push_back(e);
        }
      }
      if (cut.size() == 2) seg(cut[0], cut[1]);
      else if (cut.size() == 4) {
        // saddle: the centre value picks the pairing
        double c = 0.25 * (v[0] + v[1] + v[2] + v[3]);
        if ((c > 0) == (v[0] > 0)) seg(cut[0], cut[1]), seg(cut[2], cut[3]);
        else seg(cut[3], cut[0]), seg(cut[1], cut[2]);
      }
    }
  return len.value();
}

}  // namespace fraclab::geometry
