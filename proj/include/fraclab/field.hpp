#pragma once

#include <complex>
#include <string>
#include <vector>

#include "fraclab/common.hpp"

namespace fraclab {

using cplx = std::complex<double>;

// Uniform grid on a box; periodic with the box as period.
// Point j on axis d sits at origin[d] + j * spacing(d).
class PeriodicGrid {
 public:
  PeriodicGrid() = default;
  PeriodicGrid(int n, int points, double period);  // origin -period/2 on every axis
  PeriodicGrid(std::vector<int> points, std::vector<double> periods, std::vector<double> origin);

  int dim() const { return static_cast<int>(points_.size()); }
  int points(int d) const { return points_[d]; }
  double period(int d) const { return periods_[d]; }
  double origin(int d) const { return origin_[d]; }
  double spacing(int d) const { return periods_[d] / points_[d]; }
  double cell_volume() const;
  double frequency_cell_volume() const;
  std::size_t size() const;

  // Coordinates of the flat (row-major, last axis fastest) index.
  std::vector<double> point(std::size_t flat) const;
  double coord(int d, int j) const { return origin_[d] + j * spacing(d); }
  // Signed frequency k/L for FFT index j.
  double frequency(int d, int j) const;
  std::vector<double> frequency_vector(std::size_t flat) const;
  double frequency_norm(std::size_t flat) const;

  bool operator==(const PeriodicGrid& o) const {
    return points_ == o.points_ && periods_ == o.periods_ && origin_ == o.origin_;
  }

 private:
  std::vector<int> points_;
  std::vector<double> periods_;
  std::vector<double> origin_;
};

struct SampledField {
  PeriodicGrid grid;
  std::vector<double> values;

  SampledField() = default;
  SampledField(PeriodicGrid g, std::vector<double> v);
  static SampledField from_function(const PeriodicGrid& g, const FnN& f);
  static SampledField from_function_1d(const PeriodicGrid& g, const Fn1& f);
};

struct SpectralField {
  PeriodicGrid grid;
  std::vector<cplx> coefficients;  // FFT ordering
};

// c_k = h^n sum_j f(x_j) exp(-2 pi i x_j . xi_k)
SpectralField to_spectral(const SampledField& f);
SpectralField to_spectral(const PeriodicGrid& g, const std::vector<cplx>& values);
// f_j = dxi^n sum_k c_k exp(2 pi i x_j . xi_k)
std::vector<cplx> to_physical_complex(const SpectralField& F);
// Real part of the inverse transform.
SampledField to_physical(const SpectralField& F);

double integrate(const SampledField& f);
double l2_norm_sq(const SampledField& f);
double l2_norm_sq(const SpectralField& F);

void write_csv(const SampledField& f, const std::string& path);
SampledField read_csv(const std::string& path);
std::string format_double(double x);

}  // namespace fraclab
