#include "fhl/grid.hpp"

#include <cmath>

namespace fhl {

Grid::Grid(int dim_, int m_, double half_width_)
    : dim(dim_), m(m_), half_width(half_width_) {
  if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1, 2 or 3");
  if (m < 8 || m % 2 != 0) throw std::invalid_argument("Grid: points_per_axis must be even and >= 8");
  if (!(half_width > 0.0)) throw std::invalid_argument("Grid: half_width must be positive");
}

std::size_t Grid::size() const {
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(m);
  return n;
}

double Grid::wavenumber(int j) const {
  const int mm = j < m / 2 ? j : j - m;
  return M_PI * mm / half_width;
}

double Grid::cell_volume() const {
  return std::pow(spacing(), dim);
}

Field::Field(const Grid& g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
  if (values.size() != g.size()) throw std::invalid_argument("Field: value count does not match grid");
}

bool Field::finite() const {
  for (const auto& v : values)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

void unravel(std::size_t i, int dim, int m, int* idx) {
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(i % m);
    i /= m;
  }
}

Field gaussian_field(const Grid& g, double width) {
  Field f(g);
  int idx[3];
  for (std::size_t i = 0; i < f.size(); ++i) {
    unravel(i, g.dim, g.m, idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double x = g.position(idx[a]);
      r2 += x * x;
    }
    f[i] = std::exp(-r2 / (4.0 * width * width));
  }
  double mass = 0.0;
  for (const auto& v : f.values) mass += std::norm(v);
  mass *= g.cell_volume();
  const double scale = 1.0 / std::sqrt(mass);
  for (auto& v : f.values) v *= scale;
  return f;
}

}  // namespace fhl
