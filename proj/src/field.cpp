#include "fraclab/field.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <set>
#include <sstream>

namespace fraclab {

using std::numbers::pi;

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

// One plan per (shape, direction) and thread; the planner itself is not reentrant.
class FftPlan {
 public:
  FftPlan(const std::vector<int>& dims, int sign) {
    std::size_t total = 1;
    for (int d : dims) total *= static_cast<std::size_t>(d);
    size_ = total;
    buf_ = fftw_alloc_complex(total);
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf_, buf_, sign, FFTW_ESTIMATE);
  }
  ~FftPlan() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(plan_);
    fftw_free(buf_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  void run(std::vector<cplx>& data) {
    std::copy(data.begin(), data.end(), reinterpret_cast<cplx*>(buf_));
    fftw_execute(plan_);
    std::copy(reinterpret_cast<cplx*>(buf_), reinterpret_cast<cplx*>(buf_) + size_, data.begin());
  }

 private:
  fftw_plan plan_;
  fftw_complex* buf_;
  std::size_t size_;
};

void fft_inplace(const std::vector<int>& dims, int sign, std::vector<cplx>& data) {
  thread_local std::map<std::pair<std::vector<int>, int>, std::unique_ptr<FftPlan>> cache;
  auto key = std::make_pair(dims, sign);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, std::make_unique<FftPlan>(dims, sign)).first;
  it->second->run(data);
}

// exp(-2 pi i origin . xi_k) for every flat index
std::vector<cplx> origin_phase(const PeriodicGrid& g, int sign) {
  std::vector<cplx> ph(g.size());
  for (std::size_t k = 0; k < g.size(); ++k) {
    auto xi = g.frequency_vector(k);
    double a = 0.0;
    for (int d = 0; d < g.dim(); ++d) a += g.origin(d) * xi[d];
    ph[k] = std::polar(1.0, sign * 2.0 * pi * a);
  }
  return ph;
}

}  // namespace

PeriodicGrid::PeriodicGrid(int n, int points, double period)
    : PeriodicGrid(std::vector<int>(n, points), std::vector<double>(n, period),
                   std::vector<double>(n, -0.5 * period)) {}

PeriodicGrid::PeriodicGrid(std::vector<int> points, std::vector<double> periods, std::vector<double> origin)
    : points_(std::move(points)), periods_(std::move(periods)), origin_(std::move(origin)) {
  if (points_.empty() || points_.size() != periods_.size() || points_.size() != origin_.size())
    throw DomainError("PeriodicGrid: inconsistent axis data");
  for (std::size_t d = 0; d < points_.size(); ++d) {
    if (!power_of_two(points_[d])) throw DomainError("PeriodicGrid: points per axis must be a power of two");
    if (!(periods_[d] > 0.0)) throw DomainError("PeriodicGrid: period must be positive");
  }
}

double PeriodicGrid::cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim(); ++d) v *= spacing(d);
  return v;
}

double PeriodicGrid::frequency_cell_volume() const {
  double v = 1.0;
  for (int d = 0; d < dim(); ++d) v /= periods_[d];
  return v;
}

std::size_t PeriodicGrid::size() const {
  std::size_t n = 1;
  for (int p : points_) n *= static_cast<std::size_t>(p);
  return n;
}

std::vector<double> PeriodicGrid::point(std::size_t flat) const {
  std::vector<double> x(points_.size());
  for (int d = dim() - 1; d >= 0; --d) {
    int j = static_cast<int>(flat % points_[d]);
    flat /= points_[d];
    x[d] = coord(d, j);
  }
  return x;
}

double PeriodicGrid::frequency(int d, int j) const {
  int N = points_[d];
  int k = j < N / 2 ? j : j - N;
  return k / periods_[d];
}

std::vector<double> PeriodicGrid::frequency_vector(std::size_t flat) const {
  std::vector<double> xi(points_.size());
  for (int d = dim() - 1; d >= 0; --d) {
    int j = static_cast<int>(flat % points_[d]);
    flat /= points_[d];
    xi[d] = frequency(d, j);
  }
  return xi;
}

double PeriodicGrid::frequency_norm(std::size_t flat) const {
  auto xi = frequency_vector(flat);
  double r = 0.0;
  for (double v : xi) r += v * v;
  return std::sqrt(r);
}

SampledField::SampledField(PeriodicGrid g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("SampledField: value count does not match grid");
  for (double x : values)
    if (!std::isfinite(x)) throw DomainError("SampledField: non-finite entry");
}

SampledField SampledField::from_function(const PeriodicGrid& g, const FnN& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = f(g.point(i));
  return SampledField(g, std::move(v));
}

SampledField SampledField::from_function_1d(const PeriodicGrid& g, const Fn1& f) {
  if (g.dim() != 1) throw DomainError("from_function_1d: grid is not one-dimensional");
  std::vector<double> v(g.size());
  for (int j = 0; j < g.points(0); ++j) v[j] = f(g.coord(0, j));
  return SampledField(g, std::move(v));
}

SpectralField to_spectral(const PeriodicGrid& g, const std::vector<cplx>& values) {
  std::vector<int> dims(g.dim());
  for (int d = 0; d < g.dim(); ++d) dims[d] = g.points(d);
  std::vector<cplx> data(values);
  fft_inplace(dims, FFTW_FORWARD, data);
  auto ph = origin_phase(g, -1);
  const double h = g.cell_volume();
  for (std::size_t k = 0; k < data.size(); ++k) data[k] *= h * ph[k];
  return SpectralField{g, std::move(data)};
}

SpectralField to_spectral(const SampledField& f) {
  std::vector<cplx> data(f.values.begin(), f.values.end());
  return to_spectral(f.grid, data);
}

std::vector<cplx> to_physical_complex(const SpectralField& F) {
  const PeriodicGrid& g = F.grid;
  std::vector<int> dims(g.dim());
  for (int d = 0; d < g.dim(); ++d) dims[d] = g.points(d);
  auto ph = origin_phase(g, +1);
  std::vector<cplx> data(F.coefficients.size());
  const double dxi = g.frequency_cell_volume();
  for (std::size_t k = 0; k < data.size(); ++k) data[k] = F.coefficients[k] * ph[k] * dxi;
  fft_inplace(dims, FFTW_BACKWARD, data);
  return data;
}

SampledField to_physical(const SpectralField& F) {
  auto c = to_physical_complex(F);
  std::vector<double> v(c.size());
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i].real();
  return SampledField(F.grid, std::move(v));
}

double integrate(const SampledField& f) {
  KahanSum acc;
  for (double v : f.values) acc.add(v);
  return acc.value() * f.grid.cell_volume();
}

double l2_norm_sq(const SampledField& f) {
  KahanSum acc;
  for (double v : f.values) acc.add(v * v);
  return acc.value() * f.grid.cell_volume();
}

double l2_norm_sq(const SpectralField& F) {
  KahanSum acc;
  for (auto c : F.coefficients) acc.add(std::norm(c));
  return acc.value() * F.grid.frequency_cell_volume();
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const SampledField& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int n = f.grid.dim();
  for (int d = 0; d < n; ++d) out << "x" << d + 1 << ",";
  out << "value\n";
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    auto x = f.grid.point(i);
    for (int d = 0; d < n; ++d) out << format_double(x[d]) << ",";
    out << format_double(f.values[i]) << "\n";
  }
}

SampledField read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);
  int cols = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
  int n = cols - 1;
  if (n < 1) throw DomainError("read_csv: need at least one coordinate column");
  std::vector<std::vector<double>> coords(n);
  std::vector<double> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    for (int c = 0; c < cols; ++c) {
      if (!std::getline(ss, cell, ',')) throw DomainError("read_csv: short row");
      double v = std::strtod(cell.c_str(), nullptr);
      if (c < n)
        coords[c].push_back(v);
      else
        vals.push_back(v);
    }
  }
  std::vector<int> pts(n);
  std::vector<double> per(n), org(n);
  for (int d = 0; d < n; ++d) {
    std::set<double> uniq(coords[d].begin(), coords[d].end());
    if (uniq.size() < 2) throw DomainError("read_csv: axis with a single coordinate");
    pts[d] = static_cast<int>(uniq.size());
    double lo = *uniq.begin(), hi = *uniq.rbegin();
    double h = (hi - lo) / (pts[d] - 1);
    per[d] = h * pts[d];
    org[d] = lo;
  }
  PeriodicGrid g(pts, per, org);
  return SampledField(g, std::move(vals));
}

}  // namespace fraclab
