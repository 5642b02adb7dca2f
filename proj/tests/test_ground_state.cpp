#include <cmath>
#include <random>

#include <doctest.h>

#include "fhl/fft.hpp"
#include "fhl/ground_state.hpp"

using namespace fhl;

namespace {

// Mass-critical line configuration: gamma = 1/2, sigma = gamma/2 = 1/4.
constexpr double kGamma = 0.5;
constexpr double kSigma = 0.25;

double inner(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    s += (std::conj(a[i]) * b[i]).real();
  return s * a.grid.cell_volume();
}

}  // namespace

TEST_CASE("spectral renormalization reaches a tight positive profile") {
  Grid g(1, 256, 20.0);
  GroundState gs = petviashvili_solve(kGamma, kSigma, g, 1.0, 1e-10, 600);
  CHECK(gs.residual <= 1e-10);
  CHECK(gs.iterations < 600);

  double maxval = 0.0, minval = 1e300;
  for (const auto& v : gs.profile.values) {
    maxval = std::max(maxval, v.real());
    minval = std::min(minval, v.real());
  }
  CHECK(maxval > 0.0);
  CHECK(minval > -1e-8 * maxval);  // positive up to rounding
  CHECK(gs.critical_mass > 0.0);
  // residuals recorded every iteration, last one below tolerance
  CHECK(gs.residual_history.size() == static_cast<std::size_t>(gs.iterations));
}

TEST_CASE("the profile satisfies the paired soliton identities") {
  Grid g(1, 256, 20.0);
  GroundState gs = petviashvili_solve(kGamma, kSigma, g, 1.0, 1e-10, 600);
  const Field& q = gs.profile;

  const double t0 = std::pow(homogeneous_sobolev_norm(q, kSigma), 2);
  const double m = l2_mass(q);
  KernelSpec spec{kGamma, 0.0, ConvMethod::fourier_symbol, 1};
  Field rho(g);
  for (std::size_t i = 0; i < q.size(); ++i) rho[i] = std::norm(q[i]);
  Field pot = kernel_convolve(rho, spec);
  double p4 = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) p4 += pot[i].real() * std::norm(q[i]);
  p4 *= g.cell_volume();

  // Pairing the profile equation with Q is exact on the lattice:
  // T0 + omega*m = <(K*Q^2)Q, Q>.
  CHECK(t0 + gs.omega * m == doctest::Approx(p4).epsilon(1e-8));
}

TEST_CASE("the scaling identity defect vanishes with the box at the gauge rate") {
  // In the continuum the critical soliton satisfies omega*m = T0 (zero
  // binding energy).  On a periodic box the zero-mode-removed kernel shifts
  // the potential by a constant of order L^{gamma - d}, so the identity holds
  // only up to a defect that decays at roughly that rate as the box grows at
  // fixed spacing.  gamma = 0.8 keeps the tails thin enough to see it.
  auto defect = [](int mm, double ll) {
    Grid g(1, mm, ll);
    GroundState gs = petviashvili_solve(0.8, 0.4, g, 1.0, 1e-10, 2000);
    const double t0 = std::pow(homogeneous_sobolev_norm(gs.profile, 0.4), 2);
    return std::abs(gs.omega * l2_mass(gs.profile) - t0) / t0;
  };
  const double d1 = defect(1024, 16.0);
  const double d2 = defect(2048, 32.0);
  const double d3 = defect(4096, 64.0);
  CHECK(d1 < 0.15);
  CHECK(d2 / d1 > 0.4);
  CHECK(d2 / d1 < 0.8);
  CHECK(d3 / d2 > 0.4);
  CHECK(d3 / d2 < 0.8);

  // Binding energy tracks the same defect scale instead of vanishing.
  Grid g(1, 2048, 32.0);
  GroundState gs = petviashvili_solve(0.8, 0.4, g, 1.0, 1e-10, 2000);
  HartreeParams ep;
  ep.gamma = 0.8;
  ep.sigma = 0.4;
  ep.mu = -1.0;
  EnergyBreakdown e = energy_functionals(gs.profile, ep);
  CHECK(std::abs(e.total) < 0.1 * e.kinetic);
}

TEST_CASE("the profile near-maximizes the interaction-to-kinetic ratio") {
  // On a periodic box with the zero-mode-removed kernel the computed profile
  // is only a quasi-maximizer: the mean-removal gauge perturbs the quotient
  // at the percent level, so we check a generic trial state loses clearly
  // and random perturbations move the quotient by at most a few percent.
  Grid g(1, 256, 20.0);
  GroundState gs = petviashvili_solve(kGamma, kSigma, g, 1.0, 1e-10, 600);
  HartreeParams ep;
  ep.gamma = kGamma;
  ep.sigma = kSigma;
  ep.mu = -1.0;
  const double best = gns_ratio(gs.profile, ep);

  Field trial = gaussian_field(g, 3.0);
  CHECK(gns_ratio(trial, ep) < 0.9 * best);

  std::mt19937_64 rng(17);
  std::normal_distribution<double> dist;
  for (int t = 0; t < 3; ++t) {
    Field perturbed = gs.profile;
    for (auto& v : perturbed.values) v += 0.05 * dist(rng) * std::abs(v);
    CHECK(gns_ratio(perturbed, ep) == doctest::Approx(best).epsilon(3e-2));
  }
}

TEST_CASE("critical mass does not depend on the frequency") {
  // Exact discrete covariance: doubling omega shrinks the soliton by
  // 2^{1/(2 sigma)} = 4, so the quarter-size box with the same point count
  // maps the lattice problem onto itself and the masses agree to solver
  // tolerance.
  GroundState a = petviashvili_solve(kGamma, kSigma, Grid(1, 1024, 48.0), 1.0,
                                     1e-10, 600);
  GroundState b = petviashvili_solve(kGamma, kSigma, Grid(1, 1024, 12.0), 2.0,
                                     1e-10, 600);
  CHECK(critical_mass(b) == doctest::Approx(critical_mass(a)).epsilon(1e-8));

  // Independent discretizations (not scaling partners of each other) on a
  // smoother critical line: masses agree once each box tracks its soliton
  // width and the resolution is converged.
  GroundState c = petviashvili_solve(0.8, 0.4, Grid(1, 4096, 128.0), 1.0,
                                     1e-10, 600);
  GroundState d = petviashvili_solve(0.8, 0.4, Grid(1, 4096, 32.0), 4.0,
                                     1e-10, 600);
  CHECK(critical_mass(d) == doctest::Approx(critical_mass(c)).epsilon(1e-3));
}

TEST_CASE("invalid frequency is rejected") {
  Grid g(1, 64, 10.0);
  CHECK_THROWS_AS(petviashvili_solve(kGamma, kSigma, g, -1.0), std::invalid_argument);
}

TEST_CASE("constrained descent agrees with the fixed-point profile") {
  // Run the cross-check on the mass-subcritical line sigma > gamma/2, where
  // the constrained minimizer exists at any mass.  (At the critical point
  // the energy infimum at the critical mass is zero and is approached by
  // dispersion, so a descent flow rightly spreads out instead of settling
  // on the soliton.)
  Grid g(1, 256, 20.0);
  GradientFlowResult flow = gradient_flow_minimize(0.5, 0.5, g, 1.0, 1e-6, 20000);

  for (std::size_t i = 1; i < flow.energies.size(); ++i)
    CHECK(flow.energies[i] <=
          flow.energies[i - 1] + 1e-12 * std::abs(flow.energies[i - 1]) + 1e-15);
  CHECK(flow.omega > 0.0);

  // Re-solve the fixed point at the flow's terminal frequency so both
  // profiles live at the same scaling; compare masses and L2 profiles.
  GroundState ref = petviashvili_solve(0.5, 0.5, g, flow.omega, 1e-10, 600);
  CHECK(l2_mass(ref.profile) == doctest::Approx(1.0).epsilon(1e-2));
  Field diff(g);
  for (std::size_t i = 0; i < diff.size(); ++i)
    diff[i] = flow.profile[i] - ref.profile[i];
  CHECK(l2_norm(diff) < 1e-2 * l2_norm(ref.profile));
}
