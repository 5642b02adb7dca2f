#include <cmath>

#include <doctest.h>

#include "fhl/hartree.hpp"

using namespace fhl;

namespace {

HartreeParams line_params() {
  HartreeParams p;
  p.gamma = 0.5;
  p.sigma = 0.5;
  p.mu = 1.0;
  p.lambda = 1.0;
  p.alpha = 0.0;
  p.dt = 5e-3;
  return p;
}

}  // namespace

TEST_CASE("free flow advances plane waves by the exact phase") {
  Grid g(1, 32, 4.0);
  HartreeParams p = line_params();
  p.lambda = 0.0;
  Field f(g);
  const int mode = 3;
  const double k = g.wavenumber(mode);
  const double norm = 1.0 / std::sqrt(2.0 * g.half_width);
  for (int j = 0; j < g.m; ++j)
    f[static_cast<std::size_t>(j)] = std::polar(norm, k * g.position(j));

  Field cur = f;
  const int nsteps = 40;
  for (int n = 0; n < nsteps; ++n) cur = strang_step(cur, p);
  const cplx phase = std::polar(1.0, -std::pow(k * k, p.sigma) * p.dt * nsteps);
  for (std::size_t i = 0; i < f.size(); ++i)
    CHECK(std::abs(cur[i] - phase * f[i]) < 1e-11);
}

TEST_CASE("interaction potential is real and linear in the coupling") {
  Grid g(1, 32, 4.0);
  HartreeParams p = line_params();
  Field f = gaussian_field(g, 0.8);
  Field v1 = hartree_potential(f, p);
  p.lambda = 3.0;
  Field v3 = hartree_potential(f, p);
  for (std::size_t i = 0; i < f.size(); ++i) {
    CHECK(std::abs(v1[i].imag()) < 1e-13);
    CHECK(std::abs(v3[i] - 3.0 * v1[i]) < 1e-11);
  }
  p.lambda = 0.0;
  Field v0 = hartree_potential(f, p);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(v0[i] == cplx(0.0));
}

TEST_CASE("mass is conserved to rounding") {
  Grid g(1, 64, 6.0);
  HartreeParams p = line_params();
  Field phi0 = gaussian_field(g, 1.0);
  EvolveOptions opt;
  opt.diag_stride = 10;
  Trajectory traj = evolve(phi0, p, 0.5, opt);
  for (const auto& d : traj.diagnostics)
    CHECK(std::abs(d.mass - 1.0) < 1e-12);
}

TEST_CASE("energy drift shrinks by ~4 when dt halves (Strang order)") {
  Grid g(1, 64, 6.0);
  Field phi0 = gaussian_field(g, 1.0);
  auto drift = [&](double dt) {
    HartreeParams p = line_params();
    p.lambda = 4.0;  // strong coupling so splitting error beats roundoff
    p.dt = dt;
    EvolveOptions opt;
    opt.diag_stride = 4;
    Trajectory traj = evolve(phi0, p, 0.4, opt);
    double worst = 0.0;
    for (const auto& d : traj.diagnostics)
      worst = std::max(worst, std::abs(d.energy - traj.diagnostics[0].energy));
    return worst;
  };
  const double d1 = drift(2e-2), d2 = drift(1e-2);
  CHECK(d1 > 1e-12);  // guard: measurable signal
  CHECK(d1 / d2 > 3.0);
  CHECK(d1 / d2 < 5.5);
}

TEST_CASE("the splitting is exactly time reversible") {
  Grid g(1, 64, 6.0);
  HartreeParams p = line_params();
  Field phi0 = gaussian_field(g, 1.0);
  Field cur = phi0;
  for (int n = 0; n < 50; ++n) cur = strang_step(cur, p);
  HartreeParams back = p;
  back.dt = -p.dt;
  for (int n = 0; n < 50; ++n) cur = strang_step(cur, back);
  for (std::size_t i = 0; i < phi0.size(); ++i)
    CHECK(std::abs(cur[i] - phi0[i]) < 1e-11);
}

TEST_CASE("evolve guards the input normalization") {
  Grid g(1, 32, 4.0);
  HartreeParams p = line_params();
  Field phi0 = gaussian_field(g, 0.8);
  for (auto& v : phi0.values) v *= 2.0;  // mass 4
  CHECK_THROWS_AS(evolve(phi0, p, 0.1), std::invalid_argument);
  EvolveOptions opt;
  opt.enforce_normalization = false;
  CHECK_NOTHROW(evolve(phi0, p, 0.05, opt));
}

TEST_CASE("persistence report starts at ratio one and finds an envelope") {
  Grid g(1, 64, 6.0);
  HartreeParams p = line_params();
  p.lambda = 2.0;
  Field phi0 = gaussian_field(g, 1.0);
  EvolveOptions opt;
  opt.store_stride = 20;
  Trajectory traj = evolve(phi0, p, 0.5, opt);
  PersistenceReport rep = persistence_report(traj, 1.0);
  REQUIRE(!rep.ratios.empty());
  CHECK(rep.ratios.front() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rep.nu >= sobolev_norm(phi0, p.gamma / 2.0) - 1e-12);
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    CHECK(rep.ratios[i] <=
          std::exp(rep.fitted_c * rep.nu * rep.nu * rep.times[i]) + 1e-9);
}

TEST_CASE("defocusing runs raise no growth flag") {
  Grid g(1, 64, 6.0);
  HartreeParams p = line_params();
  Field phi0 = gaussian_field(g, 1.0);
  Trajectory traj = evolve(phi0, p, 0.3);
  BlowupReport rep = blowup_monitor(traj, 5.0);
  CHECK(!rep.flagged);
  CHECK(rep.times.size() == traj.diagnostics.size());
}

TEST_CASE("potential integral uses the squared kernel and trapezoid rule") {
  Grid g(1, 64, 6.0);
  HartreeParams p = line_params();
  p.alpha = 0.4;  // 2 gamma >= dim, so the squared kernel needs alpha > 0
  Field phi0 = gaussian_field(g, 1.0);
  EvolveOptions opt;
  opt.store_stride = 10;
  Trajectory traj = evolve(phi0, p, 0.3, opt);
  const double integral = sup_potential_integral(traj);
  CHECK(integral > 0.0);
  // crude envelope: integrand is bounded by sqrt(sup K^2 * rho) <= sqrt(K(0) * mass_sup)
  CHECK(integral < 0.3 * std::sqrt(1.0 / (p.alpha * p.alpha)) * 2.0);

  HartreeParams bare = line_params();  // alpha = 0 and 2 gamma >= 1
  Trajectory t2 = evolve(phi0, bare, 0.1, opt);
  CHECK_THROWS_AS(sup_potential_integral(t2), std::invalid_argument);
}
