#ifndef FHL_GRID_HPP
#define FHL_GRID_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace fhl {

using cplx = std::complex<double>;

// Uniform periodic grid on the box [-L, L)^dim with M points per axis.
// Wavenumbers are the exact discrete duals k_m = pi*m/L, m = -M/2..M/2-1.
struct Grid {
  int dim = 1;
  int m = 0;        // points per axis, even, >= 8
  double half_width = 0.0;

  Grid() = default;
  Grid(int dim_, int m_, double half_width_);

  double spacing() const { return 2.0 * half_width / m; }
  std::size_t size() const;
  double position(int j) const { return -half_width + j * spacing(); }
  // FFT-ordered wavenumber for index j in [0, M).
  double wavenumber(int j) const;
  double cell_volume() const;

  bool operator==(const Grid& o) const {
    return dim == o.dim && m == o.m && half_width == o.half_width;
  }
};

// Complex scalar field sampled on a Grid, row-major axis order.
struct Field {
  Grid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size(), cplx(0.0)) {}
  Field(const Grid& g, std::vector<cplx> v);

  std::size_t size() const { return values.size(); }
  cplx& operator[](std::size_t i) { return values[i]; }
  const cplx& operator[](std::size_t i) const { return values[i]; }

  bool finite() const;
};

// Unravels flat row-major index i into per-axis indices idx[0..dim).
void unravel(std::size_t i, int dim, int m, int* idx);

// Normalized Gaussian exp(-|x|^2/(4 w^2)) scaled to unit discrete L2 mass.
Field gaussian_field(const Grid& g, double width);

}  // namespace fhl

#endif
