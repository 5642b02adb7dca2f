#include "fhl/hartree.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fhl/fft.hpp"

namespace fhl {
namespace {

std::vector<int> shape_of(const Grid& g) {
  return std::vector<int>(static_cast<std::size_t>(g.dim), g.m);
}

double max_kinetic_symbol(const Grid& g, double sigma) {
  double k2 = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double k = M_PI * (g.m / 2) / g.half_width;
    k2 += k * k;
  }
  return std::pow(k2, sigma);
}

void accuracy_guard(const Grid& g, const HartreeParams& p) {
  const double phase = std::abs(p.dt) * max_kinetic_symbol(g, p.sigma);
  if (phase > 20.0 * M_PI) {
    std::fprintf(stderr,
                 "warning: dt*max|k|^(2 sigma) = %.3g exceeds 20 pi; suggested dt <= %.3g\n",
                 phase, 20.0 * M_PI / max_kinetic_symbol(g, p.sigma));
  }
}

// Stepper with cached kinetic half-phase; kernel DFTs are cached globally.
class Propagator {
 public:
  Propagator(const Grid& g, const HartreeParams& p) : grid_(g), params_(p) {
    half_phase_.resize(g.size());
    int idx[3];
    for (std::size_t i = 0; i < half_phase_.size(); ++i) {
      unravel(i, g.dim, g.m, idx);
      double k2 = 0.0;
      for (int a = 0; a < g.dim; ++a) {
        const double k = g.wavenumber(idx[a]);
        k2 += k * k;
      }
      const double sym = k2 == 0.0 ? 0.0 : std::pow(k2, p.sigma);
      half_phase_[i] = std::polar(1.0, -0.5 * p.dt * sym);
    }
  }

  void step(Field& phi) const {
    half_kinetic(phi);
    potential_phase(phi);
    half_kinetic(phi);
  }

 private:
  void half_kinetic(Field& phi) const {
    const auto shape = shape_of(grid_);
    fft::forward(phi.values, shape);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] *= half_phase_[i];
    fft::inverse(phi.values, shape);
  }

  // |phi| is invariant under a pure phase multiply, so the potential substep
  // integrates exactly with J frozen.
  void potential_phase(Field& phi) const {
    Field j = hartree_potential(phi, params_);
    for (std::size_t i = 0; i < phi.size(); ++i)
      phi[i] *= std::polar(1.0, -params_.dt * j[i].real());
  }

  Grid grid_;
  HartreeParams params_;
  std::vector<cplx> half_phase_;
};

DiagnosticsRecord diagnose(const Field& phi, const HartreeParams& p, double t) {
  DiagnosticsRecord r;
  r.t = t;
  r.mass = l2_mass(phi);
  Field rho(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = std::norm(phi[i]);
  Field pot = kernel_convolve(rho, p.kernel());
  double v = 0.0, sup = 0.0;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    v += pot[i].real() * std::norm(phi[i]);
    sup = std::max(sup, std::abs(pot[i].real()));
  }
  r.potential = 0.25 * p.mu * p.lambda * v * phi.grid.cell_volume();
  r.sup_potential = sup;
  r.kinetic = 0.5 * std::pow(homogeneous_sobolev_norm(phi, p.sigma), 2);
  r.energy = r.kinetic + r.potential;
  r.h_gamma_half = sobolev_norm(phi, p.gamma / 2.0);
  r.h_sigma = sobolev_norm(phi, p.sigma);
  return r;
}

}  // namespace

Field hartree_potential(const Field& phi, const HartreeParams& p) {
  if (p.lambda == 0.0) return Field(phi.grid);
  Field rho(phi.grid);
  for (std::size_t i = 0; i < phi.size(); ++i) rho[i] = std::norm(phi[i]);
  Field pot = kernel_convolve(rho, p.kernel());
  for (auto& v : pot.values) v = p.mu * p.lambda * v.real();
  return pot;
}

Field strang_step(const Field& phi, const HartreeParams& p) {
  accuracy_guard(phi.grid, p);
  Field out = phi;
  Propagator prop(phi.grid, p);
  prop.step(out);
  return out;
}

Trajectory evolve(const Field& phi0, const HartreeParams& p, double horizon,
                  const EvolveOptions& opt) {
  p.validate();
  if (opt.enforce_normalization) {
    const double m = l2_mass(phi0);
    if (std::abs(m - 1.0) > 1e-8)
      throw std::invalid_argument("evolve: ||phi0||_2^2 must be 1 (got " +
                                  std::to_string(m) + "); disable the check to override");
  }
  if (p.mu < 0.0 && p.alpha == 0.0 && !opt.force_focusing &&
      !(p.lambda < opt.lambda_critical))
    throw std::invalid_argument(
        "evolve: focusing alpha = 0 with lambda >= lambda_{H,c} requires force_focusing");
  accuracy_guard(phi0.grid, p);

  Trajectory traj;
  traj.params = p;
  traj.grid = phi0.grid;
  const int nsteps = static_cast<int>(std::llround(horizon / p.dt));
  Propagator prop(phi0.grid, p);
  Field phi = phi0;

  DiagnosticsRecord d0 = diagnose(phi, p, 0.0);
  traj.diagnostics.push_back(d0);
  traj.sample_times.push_back(0.0);
  traj.samples.push_back(phi);
  const double kinetic0 = d0.kinetic;

  for (int n = 1; n <= nsteps; ++n) {
    prop.step(phi);
    if (!phi.finite())
      throw std::runtime_error("evolve: non-finite amplitudes at t = " +
                               std::to_string(n * p.dt) + "; last checkpoint at t = " +
                               std::to_string(traj.sample_times.back()));
    const double t = n * p.dt;
    const bool diag_due = (n % opt.diag_stride == 0) || n == nsteps;
    const bool store_due = (n % opt.store_stride == 0) || n == nsteps;
    if (diag_due || store_due) {
      DiagnosticsRecord d = diagnose(phi, p, t);
      if (diag_due) traj.diagnostics.push_back(d);
      if (store_due) {
        traj.sample_times.push_back(t);
        traj.samples.push_back(phi);
      }
      if (kinetic0 > 0.0 && d.kinetic > opt.blowup_factor * kinetic0) {
        traj.blowup_flagged = true;
        traj.blowup_time = t;
        break;
      }
    }
  }
  return traj;
}

PersistenceReport persistence_report(const Trajectory& traj, double s) {
  PersistenceReport rep;
  if (traj.samples.empty()) return rep;
  const double gamma = traj.params.gamma;
  for (const auto& f : traj.samples)
    rep.nu = std::max(rep.nu, sobolev_norm(f, gamma / 2.0));
  const double base = sobolev_norm(traj.samples.front(), s);
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const double t = traj.sample_times[i];
    const double ratio = sobolev_norm(traj.samples[i], s) / base;
    rep.times.push_back(t);
    rep.ratios.push_back(ratio);
    if (t > 0.0 && ratio > 1.0 && rep.nu > 0.0)
      rep.fitted_c = std::max(rep.fitted_c, std::log(ratio) / (rep.nu * rep.nu * t));
  }
  return rep;
}

BlowupReport blowup_monitor(const Trajectory& traj, double factor) {
  BlowupReport rep;
  if (traj.diagnostics.empty()) return rep;
  const double k0 = traj.diagnostics.front().kinetic;
  for (const auto& d : traj.diagnostics) {
    rep.times.push_back(d.t);
    rep.kinetic.push_back(d.kinetic);
    if (!rep.flagged && k0 > 0.0 && d.kinetic > factor * k0) {
      rep.flagged = true;
      rep.flag_time = d.t;
    }
  }
  if (traj.blowup_flagged) {
    rep.flagged = true;
    rep.flag_time = std::min(rep.flag_time > 0.0 ? rep.flag_time : traj.blowup_time,
                             traj.blowup_time);
  }
  return rep;
}

double sup_potential_integral(const Trajectory& traj) {
  if (traj.samples.size() < 2) return 0.0;
  const HartreeParams& p = traj.params;
  KernelSpec spec;
  if (p.alpha > 0.0) {
    spec = KernelSpec{p.gamma, p.alpha, ConvMethod::padded_real_kernel, 2};
  } else {
    if (2.0 * p.gamma >= traj.grid.dim)
      throw std::invalid_argument("sup_potential_integral: 2 gamma >= dim needs alpha > 0");
    spec = KernelSpec{2.0 * p.gamma, 0.0, ConvMethod::fourier_symbol, 1};
  }
  std::vector<double> g(traj.samples.size());
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const Field& f = traj.samples[i];
    Field rho(f.grid);
    for (std::size_t j = 0; j < f.size(); ++j) rho[j] = std::norm(f[j]);
    Field pot = kernel_convolve(rho, spec);
    double sup = 0.0;
    for (const auto& v : pot.values) sup = std::max(sup, std::abs(v.real()));
    g[i] = std::sqrt(sup);
  }
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    integral += 0.5 * (traj.sample_times[i + 1] - traj.sample_times[i]) * (g[i] + g[i + 1]);
  return integral;
}

}  // namespace fhl
