#include "fhl/ground_state.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fhl/fft.hpp"

namespace fhl {
namespace {

std::vector<int> shape_of(const Grid& g) {
  return std::vector<int>(static_cast<std::size_t>(g.dim), g.m);
}

std::vector<double> kinetic_symbol(const Grid& g, double sigma) {
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

KernelSpec soliton_kernel(double gamma, int dim) {
  KernelSpec spec;
  spec.gamma = gamma;
  spec.alpha = 0.0;
  spec.method = gamma < dim ? ConvMethod::fourier_symbol : ConvMethod::padded_real_kernel;
  spec.validate(dim);
  return spec;
}

Field nonlinearity(const Field& q, const KernelSpec& spec) {
  Field rho(q.grid);
  for (std::size_t i = 0; i < q.size(); ++i) rho[i] = std::norm(q[i]);
  Field pot = kernel_convolve(rho, spec);
  Field n(q.grid);
  for (std::size_t i = 0; i < q.size(); ++i) n[i] = pot[i].real() * q[i].real();
  return n;
}

// Circularly shifts the profile so its peak sits at the origin cell; keeps
// iterates from drifting off-center over long runs.
void center_on_peak(Field& q) {
  const Grid& g = q.grid;
  std::size_t peak = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double a = std::abs(q[i]);
    if (a > best) {
      best = a;
      peak = i;
    }
  }
  int pidx[3], shift[3];
  unravel(peak, g.dim, g.m, pidx);
  bool needed = false;
  for (int a = 0; a < g.dim; ++a) {
    shift[a] = g.m / 2 - pidx[a];  // x = 0 lives at index m/2
    if (shift[a] % g.m != 0) needed = true;
  }
  if (!needed) return;
  Field out(g);
  int idx[3];
  for (std::size_t i = 0; i < q.size(); ++i) {
    unravel(i, g.dim, g.m, idx);
    std::size_t src = 0;
    for (int a = 0; a < g.dim; ++a) {
      int j = (idx[a] - shift[a]) % g.m;
      if (j < 0) j += g.m;
      src = src * g.m + static_cast<std::size_t>(j);
    }
    out[i] = q[src];
  }
  q = out;
}

double sup_defect(const Field& q, const std::vector<double>& w, double omega,
                  const Field& n) {
  const auto shape = shape_of(q.grid);
  std::vector<cplx> hat = q.values;
  fft::forward(hat, shape);
  for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= w[i] + omega;
  fft::inverse(hat, shape);
  double sup = 0.0;
  for (std::size_t i = 0; i < hat.size(); ++i)
    sup = std::max(sup, std::abs(hat[i] - n[i]));
  return sup;
}

}  // namespace

GroundState petviashvili_solve(double gamma, double sigma, const Grid& grid,
                               double omega, double tol, int max_iter) {
  if (!(omega > 0.0)) throw std::invalid_argument("petviashvili_solve: omega must be positive");
  const KernelSpec spec = soliton_kernel(gamma, grid.dim);
  const auto shape = shape_of(grid);
  const auto w = kinetic_symbol(grid, sigma);

  GroundState gs;
  gs.omega = omega;
  Field q = gaussian_field(grid, grid.half_width / 6.0);

  for (int it = 1; it <= max_iter; ++it) {
    Field n = nonlinearity(q, spec);

    std::vector<cplx> qhat = q.values;
    std::vector<cplx> nhat = n.values;
    fft::forward(qhat, shape);
    fft::forward(nhat, shape);

    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < qhat.size(); ++i) {
      num += (w[i] + omega) * std::norm(qhat[i]);
      den += (std::conj(qhat[i]) * nhat[i]).real();
    }
    if (!(num > 0.0) || !(den > 0.0) || !std::isfinite(num) || !std::isfinite(den))
      throw std::runtime_error(
          "petviashvili_solve: degenerate renormalization quotient at iteration " +
          std::to_string(it));
    const double s = std::pow(num / den, 1.5);

    for (std::size_t i = 0; i < qhat.size(); ++i)
      qhat[i] = s * nhat[i] / (w[i] + omega);
    fft::inverse(qhat, shape);
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = qhat[i].real();
    center_on_peak(q);
    if (!q.finite())
      throw std::runtime_error("petviashvili_solve: iterate diverged at iteration " +
                               std::to_string(it));

    Field n2 = nonlinearity(q, spec);
    const double res = sup_defect(q, w, omega, n2);
    gs.residual_history.push_back(res);
    gs.iterations = it;
    if (res <= tol) {
      gs.profile = q;
      gs.residual = res;
      gs.critical_mass = l2_mass(q);
      return gs;
    }
  }
  throw std::runtime_error("petviashvili_solve: no convergence after " +
                           std::to_string(max_iter) + " iterations; last residual " +
                           std::to_string(gs.residual_history.back()));
}

double critical_mass(const GroundState& gs) { return l2_mass(gs.profile); }

GradientFlowResult gradient_flow_minimize(double gamma, double sigma,
                                          const Grid& grid, double mass,
                                          double tol, int max_iter) {
  if (!(mass > 0.0)) throw std::invalid_argument("gradient_flow_minimize: mass must be positive");
  const KernelSpec spec = soliton_kernel(gamma, grid.dim);
  const auto shape = shape_of(grid);
  const auto w = kinetic_symbol(grid, sigma);

  HartreeParams ep;
  ep.gamma = gamma;
  ep.sigma = sigma;
  ep.mu = -1.0;
  ep.lambda = 1.0;
  ep.alpha = 0.0;

  Field q = gaussian_field(grid, grid.half_width / 6.0);
  normalize_mass(q, mass);

  GradientFlowResult out;
  double e_prev = energy_functionals(q, ep).total;
  out.energies.push_back(e_prev);
  double dtau = 0.5;

  for (int it = 0; it < max_iter; ++it) {
    Field n = nonlinearity(q, spec);

    std::vector<cplx> qhat = q.values;
    std::vector<cplx> nhat = n.values;
    fft::forward(qhat, shape);
    fft::forward(nhat, shape);
    for (std::size_t i = 0; i < qhat.size(); ++i)
      qhat[i] = (qhat[i] + dtau * nhat[i]) / (1.0 + dtau * w[i]);
    fft::inverse(qhat, shape);

    Field trial(grid);
    for (std::size_t i = 0; i < trial.size(); ++i) trial[i] = qhat[i].real();
    normalize_mass(trial, mass);

    const double e_trial = energy_functionals(trial, ep).total;
    if (!(e_trial <= e_prev + 1e-14 * std::abs(e_prev)) && dtau > 1e-8) {
      dtau *= 0.5;  // step rejected: the semi-implicit update overshot
      continue;
    }
    q = trial;
    out.energies.push_back(e_trial);

    // Projected gradient: H q - omega q with omega = <H q, q>/mass.
    Field n2 = nonlinearity(q, spec);
    std::vector<cplx> hq = q.values;
    fft::forward(hq, shape);
    for (std::size_t i = 0; i < hq.size(); ++i) hq[i] *= w[i];
    fft::inverse(hq, shape);
    double hqq = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      hq[i] = hq[i].real() - n2[i].real();
      hqq += hq[i].real() * q[i].real();
    }
    hqq *= grid.cell_volume();
    const double omega_now = -hqq / mass;  // soliton convention: H q = -omega q

    double g2 = 0.0, sup = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const double r = hq[i].real() + omega_now * q[i].real();
      g2 += r * r;
      sup = std::max(sup, std::abs(r));
    }
    out.grad_norm = std::sqrt(g2 * grid.cell_volume());
    out.residual = sup;
    out.omega = omega_now;

    const double de = std::abs(e_prev - e_trial);
    e_prev = e_trial;
    if (out.grad_norm <= tol && it > 10 && de <= tol * std::max(1.0, std::abs(e_trial))) {
      out.profile = q;
      return out;
    }
    dtau = std::min(dtau * 1.02, 2.0);
  }
  out.profile = q;
  return out;
}

}  // namespace fhl
