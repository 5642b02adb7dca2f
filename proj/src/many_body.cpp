#include "fhl/many_body.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fhl/fft.hpp"

namespace fhl {
namespace {

void validate_mb(int n_particles, const Grid& grid, const HartreeParams& p) {
  p.validate();
  if (n_particles < 2)
    throw std::invalid_argument("many_body: n_particles must be >= 2");
  if (!(p.alpha > 0.0))
    throw std::invalid_argument("many_body: alpha must be positive (the bare kernel is not bounded)");
  std::size_t n = 1;
  for (int a = 0; a < n_particles * grid.dim; ++a) {
    n *= static_cast<std::size_t>(grid.m);
    if (n > kManyBodyCapacity)
      throw std::invalid_argument("many_body: amplitude count exceeds capacity 2^27");
  }
}

std::vector<int> tensor_shape(const ManyBodyState& psi) {
  return std::vector<int>(
      static_cast<std::size_t>(psi.n_particles * psi.grid.dim), psi.grid.m);
}

std::size_t per_particle_size(const Grid& g) { return g.size(); }

// |k|^{2 sigma} over one particle's M^dim modes, flat row-major index.
std::vector<double> particle_symbol(const Grid& g, double sigma) {
  std::vector<double> w(g.size());
  int idx[3];
  for (std::size_t i = 0; i < w.size(); ++i) {
    unravel(i, g.dim, g.m, idx);
    double k2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double k = g.wavenumber(idx[a]);
      k2 += k * k;
    }
    w[i] = k2 == 0.0 ? 0.0 : std::pow(k2, sigma);
  }
  return w;
}

double pair_kernel(const Grid& g, const HartreeParams& p, std::size_t ja,
                   std::size_t jb) {
  // Distance between grid nodes at flat per-particle indices ja, jb; the
  // difference is taken on the line (not the torus) to match the zero-padded
  // linear convolution used by the Hartree reference.
  int ia[3], ib[3];
  unravel(ja, g.dim, g.m, ia);
  unravel(jb, g.dim, g.m, ib);
  double r2 = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double d = (ia[a] - ib[a]) * g.spacing();
    r2 += d * d;
  }
  const double r = std::sqrt(r2);
  if (r == 0.0)  // same origin-cell average as the padded Hartree convolution
    return kernel_origin_average(g.dim, p.gamma, p.alpha, 1, g.spacing());
  return 1.0 / (std::pow(r, p.gamma) + p.alpha);
}

// Total interaction Sum_{a<b} K(x_a - x_b) scaled by mu lambda/(N-1),
// tabulated over the full configuration space.
std::vector<double> potential_table(const ManyBodyState& psi) {
  const int n = psi.n_particles;
  const std::size_t q = per_particle_size(psi.grid);
  const double coupling = psi.params.mu * psi.params.lambda / (n - 1);

  std::vector<double> pairk(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      pairk[a * q + b] = pair_kernel(psi.grid, psi.params, a, b);

  std::vector<double> v(psi.size());
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    double s = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) s += pairk[digit[a] * q + digit[b]];
    v[i] = coupling * s;
    for (int a = n - 1; a >= 0; --a) {
      if (++digit[a] < q) break;
      digit[a] = 0;
    }
  }
  return v;
}

// Applies exp(-i tau Sum_a |k_a|^{2 sigma}) in Fourier space (data already
// transformed).  The phase factorizes across particles, so one q-sized
// factor table and a per-block prefix product replace a sincos per point.
void kinetic_phase_inplace(std::vector<cplx>& hat, int n, std::size_t q,
                           const std::vector<double>& wp, double tau) {
  std::vector<cplx> fac(q);
  for (std::size_t j = 0; j < q; ++j) fac[j] = std::polar(1.0, -tau * wp[j]);
  std::vector<std::size_t> digit(static_cast<std::size_t>(n - 1), 0);
  for (std::size_t block = 0; block < hat.size(); block += q) {
    cplx prefix = 1.0;
    for (int a = 0; a < n - 1; ++a) prefix *= fac[digit[static_cast<std::size_t>(a)]];
    for (std::size_t j = 0; j < q; ++j) hat[block + j] *= prefix * fac[j];
    for (int a = n - 2; a >= 0; --a) {
      if (++digit[static_cast<std::size_t>(a)] < q) break;
      digit[static_cast<std::size_t>(a)] = 0;
    }
  }
}

Eigen::VectorXcd weighted_orbital(const Field& phi) {
  const double scale = std::sqrt(phi.grid.cell_volume());
  Eigen::VectorXcd v(static_cast<Eigen::Index>(phi.size()));
  for (std::size_t i = 0; i < phi.size(); ++i) v[static_cast<Eigen::Index>(i)] = phi[i] * scale;
  return v;
}

Eigen::VectorXcd projector_vector(const ReducedDensity& rho, const Field& phi) {
  Eigen::VectorXcd v = weighted_orbital(phi);
  if (rho.k == 1) return v;
  if (rho.k == 2) {
    Eigen::VectorXcd vv(v.size() * v.size());
    for (Eigen::Index a = 0; a < v.size(); ++a)
      for (Eigen::Index b = 0; b < v.size(); ++b) vv[a * v.size() + b] = v[a] * v[b];
    return vv;
  }
  throw std::invalid_argument("reduced density rank must be 1 or 2");
}

// F^dagger diag((1+|k|^{2 sigma})^{exponent/2}) F with F the unitary DFT on
// the per-particle grid; exact weight operator on weighted vectors.
Eigen::MatrixXcd weight_matrix(const Grid& g, double sigma, double exponent) {
  const std::size_t q = g.size();
  const auto wp = particle_symbol(g, sigma);
  Eigen::MatrixXcd f(q, q);
  int ki[3], xi[3];
  const double norm = 1.0 / std::sqrt(static_cast<double>(q));
  for (std::size_t r = 0; r < q; ++r) {
    unravel(r, g.dim, g.m, ki);
    for (std::size_t c = 0; c < q; ++c) {
      unravel(c, g.dim, g.m, xi);
      double phase = 0.0;
      for (int a = 0; a < g.dim; ++a)
        phase += g.wavenumber(ki[a]) * g.position(xi[a]);
      f(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          std::polar(norm, -phase);
    }
  }
  Eigen::VectorXd d(q);
  for (std::size_t r = 0; r < q; ++r)
    d[static_cast<Eigen::Index>(r)] = std::pow(1.0 + wp[r], 0.5 * exponent);
  return f.adjoint() * d.asDiagonal() * f;
}

double hermitian_trace_norm(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

ReducedDensity reduce_density(const ManyBodyState& psi, int k) {
  const std::size_t q = per_particle_size(psi.grid);
  std::size_t rows = 1;
  for (int a = 0; a < k; ++a) rows *= q;
  const std::size_t cols = psi.size() / rows;
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> b(psi.amplitudes.data(), static_cast<Eigen::Index>(rows),
                             static_cast<Eigen::Index>(cols));
  const double weight =
      std::pow(psi.grid.cell_volume(), static_cast<double>(psi.n_particles));
  ReducedDensity rho;
  rho.k = k;
  rho.matrix = (b * b.adjoint()) * weight;
  return rho;
}

}  // namespace

double ManyBodyState::mass() const {
  double s = 0.0;
  for (const auto& v : amplitudes) s += std::norm(v);
  return s * std::pow(grid.cell_volume(), static_cast<double>(n_particles));
}

double ManyBodyState::max_symmetry_defect() const {
  const std::size_t q = per_particle_size(grid);
  const int n = n_particles;
  double sup = 0.0;
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> stride(static_cast<std::size_t>(n));
  stride[static_cast<std::size_t>(n) - 1] = 1;
  for (int a = n - 2; a >= 0; --a) stride[a] = stride[a + 1] * q;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    for (int a = 0; a + 1 < n; ++a) {
      if (digit[a] == digit[a + 1]) continue;
      const std::size_t j = i + (digit[a + 1] - digit[a]) * stride[a] +
                            (digit[a] - digit[a + 1]) * stride[a + 1];
      sup = std::max(sup, std::abs(amplitudes[i] - amplitudes[j]));
    }
    for (int a = n - 1; a >= 0; --a) {
      if (++digit[a] < q) break;
      digit[a] = 0;
    }
  }
  return sup;
}

ManyBodyState product_state(const Field& phi0, int n_particles,
                            const HartreeParams& params) {
  validate_mb(n_particles, phi0.grid, params);
  ManyBodyState psi;
  psi.n_particles = n_particles;
  psi.grid = phi0.grid;
  psi.params = params;
  std::size_t n = 1;
  const std::size_t q = per_particle_size(phi0.grid);
  for (int a = 0; a < n_particles; ++a) n *= q;
  psi.amplitudes.resize(n);
  std::vector<std::size_t> digit(static_cast<std::size_t>(n_particles), 0);
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = 1.0;
    for (int a = 0; a < n_particles; ++a) v *= phi0[digit[a]];
    psi.amplitudes[i] = v;
    for (int a = n_particles - 1; a >= 0; --a) {
      if (++digit[a] < q) break;
      digit[a] = 0;
    }
  }
  return psi;
}

ManyBodyState symmetrized_pair(const Field& phi, const Field& chi,
                               const HartreeParams& params) {
  if (!(phi.grid == chi.grid))
    throw std::invalid_argument("symmetrized_pair: orbitals must share a grid");
  validate_mb(2, phi.grid, params);
  ManyBodyState psi;
  psi.n_particles = 2;
  psi.grid = phi.grid;
  psi.params = params;
  const std::size_t q = per_particle_size(phi.grid);
  psi.amplitudes.resize(q * q);
  for (std::size_t a = 0; a < q; ++a)
    for (std::size_t b = 0; b < q; ++b)
      psi.amplitudes[a * q + b] = phi[a] * chi[b] + chi[a] * phi[b];
  const double m = psi.mass();
  if (!(m > 0.0)) throw std::invalid_argument("symmetrized_pair: null state");
  const double scale = 1.0 / std::sqrt(m);
  for (auto& v : psi.amplitudes) v *= scale;
  return psi;
}

double mb_energy(const ManyBodyState& psi) {
  const auto shape = tensor_shape(psi);
  const std::size_t q = per_particle_size(psi.grid);
  const auto wp = particle_symbol(psi.grid, psi.params.sigma);
  const double hn =
      std::pow(psi.grid.cell_volume(), static_cast<double>(psi.n_particles));

  std::vector<cplx> hat = psi.amplitudes;
  fft::forward(hat, shape);
  double kin = 0.0;
  {
    std::vector<std::size_t> digit(static_cast<std::size_t>(psi.n_particles), 0);
    for (std::size_t i = 0; i < hat.size(); ++i) {
      double w = 0.0;
      for (int a = 0; a < psi.n_particles; ++a) w += wp[digit[a]];
      kin += w * std::norm(hat[i]);
      for (int a = psi.n_particles - 1; a >= 0; --a) {
        if (++digit[a] < q) break;
        digit[a] = 0;
      }
    }
    kin *= hn / static_cast<double>(hat.size());
  }

  const auto v = potential_table(psi);
  double pot = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) pot += v[i] * std::norm(psi.amplitudes[i]);
  pot *= hn;
  return kin + pot;
}

std::vector<ManyBodySample> mb_evolve(const ManyBodyState& psi0, double horizon,
                                      double dt, const MbEvolveOptions& opt) {
  validate_mb(psi0.n_particles, psi0.grid, psi0.params);
  if (!(dt > 0.0)) throw std::invalid_argument("mb_evolve: dt must be positive");
  const auto shape = tensor_shape(psi0);
  const std::size_t q = per_particle_size(psi0.grid);
  const auto wp = particle_symbol(psi0.grid, psi0.params.sigma);
  const auto v = potential_table(psi0);
  // The potential is static, so its per-step phase is a fixed table.
  std::vector<cplx> vphase(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) vphase[i] = std::polar(1.0, -dt * v[i]);
  const int nsteps = static_cast<int>(std::llround(horizon / dt));

  ManyBodyState psi = psi0;
  std::vector<ManyBodySample> samples;
  samples.push_back({0.0, opt.keep_samples ? psi : ManyBodyState{}});

  auto kinetic = [&](double tau) {
    fft::forward(psi.amplitudes, shape);
    kinetic_phase_inplace(psi.amplitudes, psi.n_particles, q, wp, tau);
    fft::inverse(psi.amplitudes, shape);
  };

  // Strang steps with the trailing/leading half-kinetic phases merged between
  // sample points: K/2 V (K V)^{m-1} K/2.
  bool open = false;
  for (int n = 1; n <= nsteps; ++n) {
    kinetic(open ? dt : 0.5 * dt);
    for (std::size_t i = 0; i < psi.amplitudes.size(); ++i)
      psi.amplitudes[i] *= vphase[i];
    open = true;
    const bool due = (opt.keep_samples && n % opt.sample_stride == 0) || n == nsteps;
    if (due) {
      kinetic(0.5 * dt);
      open = false;
      if (opt.keep_samples || n == nsteps) samples.push_back({n * dt, psi});
    }
  }
  if (!psi.amplitudes.empty() && !samples.empty() && samples.back().state.amplitudes.empty())
    samples.back().state = psi;
  for (const auto& s : samples)
    if (!s.state.amplitudes.empty())
      for (const auto& a : s.state.amplitudes)
        if (!std::isfinite(a.real()) || !std::isfinite(a.imag()))
          throw std::runtime_error("mb_evolve: non-finite amplitudes at t = " +
                                   std::to_string(s.t));
  if (!opt.keep_samples) samples.erase(samples.begin());
  return samples;
}

ReducedDensity reduce_density_1(const ManyBodyState& psi) { return reduce_density(psi, 1); }

ReducedDensity reduce_density_2(const ManyBodyState& psi) {
  if (psi.n_particles < 3 && psi.n_particles != 2)
    throw std::invalid_argument("reduce_density_2: need at least 2 particles");
  return reduce_density(psi, 2);
}

double pickl_functional(const ManyBodyState& psi, const Field& phi) {
  ReducedDensity rho = reduce_density_1(psi);
  Eigen::VectorXcd v = weighted_orbital(phi);
  const double overlap = (v.adjoint() * rho.matrix * v).value().real();
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

SchattenDistances schatten_distances(const ReducedDensity& rho, const Field& phi) {
  Eigen::VectorXcd u = projector_vector(rho, phi);
  Eigen::MatrixXcd delta = rho.matrix - u * u.adjoint();
  SchattenDistances d;
  d.hs_norm = delta.norm();
  d.trace_norm = hermitian_trace_norm(delta);
  return d;
}

double weighted_trace_distance(const ReducedDensity& rho, const Field& phi,
                               double theta, double sigma) {
  if (theta == 0.0) {
    // S^0 = identity; skip the dense weight build.
    return schatten_distances(rho, phi).trace_norm;
  }
  Eigen::MatrixXcd a1 = weight_matrix(phi.grid, sigma, theta);
  Eigen::MatrixXcd a = a1;
  if (rho.k == 2) {
    const Eigen::Index q = a1.rows();
    a.resize(q * q, q * q);
    for (Eigen::Index r1 = 0; r1 < q; ++r1)
      for (Eigen::Index r2 = 0; r2 < q; ++r2)
        for (Eigen::Index c1 = 0; c1 < q; ++c1)
          for (Eigen::Index c2 = 0; c2 < q; ++c2)
            a(r1 * q + r2, c1 * q + c2) = a1(r1, c1) * a1(r2, c2);
  }
  Eigen::VectorXcd u = projector_vector(rho, phi);
  Eigen::MatrixXcd delta = rho.matrix - u * u.adjoint();
  return hermitian_trace_norm(a * delta * a);
}

InterpolationBoundRecord interpolation_bound_check(const ManyBodyState& psi,
                                                   const Field& phi,
                                                   double theta, double s,
                                                   double sigma) {
  if (theta < 0.0 || theta >= 1.0)
    throw std::invalid_argument("interpolation_bound_check: theta must lie in [0, 1)");
  InterpolationBoundRecord rec;
  rec.theta = theta;
  rec.s = s;

  ReducedDensity rho = reduce_density_1(psi);
  rec.lhs = weighted_trace_distance(rho, phi, theta * s, sigma);

  const double a = pickl_functional(psi, phi);
  const double hs = schatten_distances(rho, phi).hs_norm;

  SobolevIndex idx;
  idx.s = s;
  idx.sigma = sigma;
  idx.convention = SobolevConvention::operator_weight;
  const double phi_weight = sobolev_norm(phi, idx);

  Eigen::MatrixXcd sfull = weight_matrix(phi.grid, sigma, 2.0 * s);
  const double psi_weight = std::sqrt((sfull * rho.matrix).trace().real());

  rec.constant =
      2.0 * std::pow(psi_weight + phi_weight, std::max(1.0, 2.0 * theta));
  rec.rhs = rec.constant * (std::pow(a, std::min(0.5, 1.0 - theta)) +
                            std::pow(hs, 1.0 - theta));
  rec.ratio = rec.rhs > 0.0 ? rec.lhs / rec.rhs : kInf;
  rec.pass = rec.lhs <= rec.rhs * (1.0 + 1e-12);
  return rec;
}

}  // namespace fhl
