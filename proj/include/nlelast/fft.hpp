#pragma once

// FFT bridge for periodic grids. Conventions: uhat(xi_k) = h^d * DFT(u)
// approximates the continuum transform at the discrete frequencies
// xi_k = k_signed / (n h), and Parseval reads ||u||^2_{L2} = sum |uhat|^2 / V
// with V the box volume. Plan creation in FFTW is serialized by a mutex.

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <vector>

#include "nlelast/core.hpp"
#include "nlelast/field.hpp"

namespace nlelast {

struct Spectrum {
  Grid grid;  // originating periodic grid; layout shared with GridField
  int components = 0;
  std::vector<std::complex<double>> data;  // component-major, row-major

  std::size_t points() const { return static_cast<std::size_t>(grid.num_points()); }

  std::complex<double>& at(int c, std::size_t idx) {
    return data[static_cast<std::size_t>(c) * points() + idx];
  }
  const std::complex<double>& at(int c, std::size_t idx) const {
    return data[static_cast<std::size_t>(c) * points() + idx];
  }

  // Frequency vector of a flattened spectral index.
  Vec frequency(std::size_t idx) const {
    auto mi = grid.unflatten(static_cast<int64_t>(idx));
    Vec xi(grid.d);
    for (int a = 0; a < grid.d; ++a) xi[a] = grid.frequency(a, mi[static_cast<std::size_t>(a)]);
    return xi;
  }

  double box_volume() const {
    double v = 1.0;
    for (int a = 0; a < grid.d; ++a) v *= grid.box_length(a);
    return v;
  }
};

namespace detail {

inline std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

inline void run_dft(const Grid& g, std::vector<std::complex<double>>& buf, int sign) {
  int dims[kMaxDim];
  for (int a = 0; a < g.d; ++a) dims[a] = g.n[static_cast<std::size_t>(a)];
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft(g.d, dims, ptr, ptr, sign, FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorKind::internal, "fftw plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace detail

inline Spectrum forward_fft(const GridField& u) {
  require(u.grid.periodic, ErrorKind::usage, "forward_fft: grid must be periodic");
  Spectrum s;
  s.grid = u.grid;
  s.components = u.components;
  s.data.assign(u.data.size(), {0.0, 0.0});
  const double scale = u.grid.cell_volume();
  std::vector<std::complex<double>> buf(u.points());
  for (int c = 0; c < u.components; ++c) {
    for (std::size_t i = 0; i < u.points(); ++i) buf[i] = u.at(c, i);
    detail::run_dft(u.grid, buf, FFTW_FORWARD);
    for (std::size_t i = 0; i < u.points(); ++i) s.at(c, i) = scale * buf[i];
  }
  return s;
}

// Real part of the inverse transform; the imaginary residue of a spectrum
// produced from real data and even multipliers sits at rounding level.
inline GridField inverse_fft(const Spectrum& s) {
  GridField u(s.grid, s.components);
  const double scale = 1.0 / s.box_volume();
  std::vector<std::complex<double>> buf(u.points());
  for (int c = 0; c < s.components; ++c) {
    for (std::size_t i = 0; i < u.points(); ++i) buf[i] = s.at(c, i);
    detail::run_dft(s.grid, buf, FFTW_BACKWARD);
    for (std::size_t i = 0; i < u.points(); ++i) u.at(c, i) = scale * buf[i].real();
  }
  return u;
}

}  // namespace nlelast
