#include <cmath>
#include <random>

#include <doctest.h>

#include "fhl/many_body.hpp"

using namespace fhl;

namespace {

HartreeParams mb_params() {
  HartreeParams p;
  p.gamma = 1.0;
  p.sigma = 0.5;
  p.mu = 1.0;
  p.lambda = 1.0;
  p.alpha = 0.4;
  p.dt = 1e-2;
  return p;
}

Field unit_plane_wave(const Grid& g, int mode) {
  Field f(g);
  const double norm = 1.0 / std::sqrt(2.0 * g.half_width);
  for (int j = 0; j < g.m; ++j)
    f[static_cast<std::size_t>(j)] =
        std::polar(norm, g.wavenumber(mode) * g.position(j));
  return f;
}

ManyBodyState symmetrize_random(const Grid& g, int n, const HartreeParams& p,
                                unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist;
  ManyBodyState psi;
  psi.n_particles = n;
  psi.grid = g;
  psi.params = p;
  const std::size_t q = g.size();
  std::size_t total = 1;
  for (int a = 0; a < n; ++a) total *= q;
  std::vector<cplx> raw(total);
  for (auto& v : raw) v = cplx(dist(rng), dist(rng));

  // Average over the permutation group (n = 2 or 3 here).
  psi.amplitudes.assign(total, cplx(0.0));
  std::vector<std::size_t> digit(static_cast<std::size_t>(n), 0);
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < total; ++i) {
    for (int a = 0; a < n; ++a) perm[a] = a;
    cplx acc = 0.0;
    int count = 0;
    std::sort(perm.begin(), perm.end());
    do {
      std::size_t j = 0;
      for (int a = 0; a < n; ++a) j = j * q + digit[static_cast<std::size_t>(perm[a])];
      acc += raw[j];
      ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));
    psi.amplitudes[i] = acc / static_cast<double>(count);
    for (int a = n - 1; a >= 0; --a) {
      if (++digit[a] < q) break;
      digit[a] = 0;
    }
  }
  const double m = psi.mass();
  const double s = 1.0 / std::sqrt(m);
  for (auto& v : psi.amplitudes) v *= s;
  return psi;
}

}  // namespace

TEST_CASE("product states are symmetric with zero depletion") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  ManyBodyState psi = product_state(phi, 3, p);
  CHECK(psi.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(psi.max_symmetry_defect() < 1e-14);
  CHECK(pickl_functional(psi, phi) < 1e-12);
  ReducedDensity rho = reduce_density_1(psi);
  CHECK(rho.matrix.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("product-state energy equals 2N times the one-body energy") {
  // <H_N> on phi^{(x) N} ties the tensor Hamiltonian to the mean-field
  // functional exactly (same kernel samples on both sides).
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  EnergyBreakdown e = energy_functionals(phi, p);
  for (int n : {2, 3, 4}) {
    ManyBodyState psi = product_state(phi, n, p);
    CHECK(mb_energy(psi) == doctest::Approx(2.0 * n * e.total).epsilon(1e-10));
  }
}

TEST_CASE("rank-2 reduced density closed form") {
  Grid g(1, 32, 6.0);
  HartreeParams p = mb_params();
  Field phi = unit_plane_wave(g, 1);
  Field chi = unit_plane_wave(g, 2);
  ManyBodyState pair = symmetrized_pair(phi, chi, p);
  CHECK(pair.mass() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(pickl_functional(pair, phi) == doctest::Approx(0.5).epsilon(1e-10));
  ReducedDensity rho = reduce_density_1(pair);
  SchattenDistances sd = schatten_distances(rho, phi);
  CHECK(sd.trace_norm == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sd.hs_norm == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-10));
}

TEST_CASE("weighted trace distance against the plane-wave eigenbasis") {
  // gamma^{(1)} - P is diagonal in the two plane-wave modes, so the weighted
  // trace norm is (w_phi^theta + w_chi^theta)/2 with w = 1 + |k|^{2 sigma}.
  Grid g(1, 32, 6.0);
  HartreeParams p = mb_params();
  Field phi = unit_plane_wave(g, 1);
  Field chi = unit_plane_wave(g, 2);
  ManyBodyState pair = symmetrized_pair(phi, chi, p);
  ReducedDensity rho = reduce_density_1(pair);

  const double kphi = g.wavenumber(1), kchi = g.wavenumber(2);
  for (double theta : {0.0, 0.4, 1.0}) {
    const double expect =
        0.5 * (std::pow(1.0 + std::pow(kphi * kphi, p.sigma), theta) +
               std::pow(1.0 + std::pow(kchi * kchi, p.sigma), theta));
    const double got = weighted_trace_distance(rho, phi, theta, p.sigma);
    CHECK(got == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("two-particle reduced density of a pair state is the pair projector") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  ManyBodyState psi = product_state(phi, 2, p);
  ReducedDensity rho2 = reduce_density_2(psi);
  CHECK(rho2.matrix.trace().real() == doctest::Approx(1.0).epsilon(1e-12));
  SchattenDistances sd = schatten_distances(rho2, phi);
  CHECK(sd.trace_norm < 1e-10);
}

TEST_CASE("direct projector contraction agrees with the reduced-density path") {
  Grid g(1, 12, 3.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  for (unsigned seed : {1u, 2u, 3u}) {
    ManyBodyState psi = symmetrize_random(g, 3, p, seed);
    const double via_density = pickl_functional(psi, phi);

    // Direct: 1 - <Psi, (|phi><phi| (x) 1) Psi> contracted in the full tensor.
    const std::size_t q = g.size();
    const double h = g.cell_volume();
    const std::size_t rest = psi.size() / q;
    double overlap = 0.0;
    for (std::size_t r = 0; r < rest; ++r) {
      cplx amp = 0.0;
      for (std::size_t x = 0; x < q; ++x)
        amp += std::conj(phi[x]) * psi.amplitudes[x * rest + r] * h;
      overlap += std::norm(amp) * h * h;
    }
    CHECK(via_density == doctest::Approx(1.0 - overlap).epsilon(1e-10));
  }
}

TEST_CASE("free tensor flow factorizes into one-body flows") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  p.lambda = 0.0;
  Field phi = gaussian_field(g, 0.8);
  ManyBodyState psi0 = product_state(phi, 2, p);
  auto samples = mb_evolve(psi0, 0.1, p.dt);
  const ManyBodyState& end = samples.back().state;

  // one-body free evolution with the same stepper
  Field cur = phi;
  for (int n = 0; n < 10; ++n) cur = strang_step(cur, p);
  ManyBodyState expect = product_state(cur, 2, p);
  for (std::size_t i = 0; i < end.size(); ++i)
    CHECK(std::abs(end.amplitudes[i] - expect.amplitudes[i]) < 1e-11);
}

TEST_CASE("tensor flow conserves mass and energy") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  p.mu = -1.0;
  Field phi = gaussian_field(g, 0.8);
  ManyBodyState psi0 = product_state(phi, 3, p);
  const double e0 = mb_energy(psi0);
  auto samples = mb_evolve(psi0, 0.2, 2e-3);
  const ManyBodyState& end = samples.back().state;
  CHECK(end.mass() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(mb_energy(end) == doctest::Approx(e0).epsilon(1e-6));
  CHECK(end.max_symmetry_defect() < 1e-12);
}

TEST_CASE("interpolation bound holds with the explicit constant") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  ManyBodyState psi0 = product_state(phi, 3, p);
  auto samples = mb_evolve(psi0, 0.2, 5e-3);

  Field cur = phi;
  for (int n = 0; n < 40; ++n) cur = strang_step(cur, p);

  for (double theta : {0.0, 0.25, 0.5}) {
    auto rec = interpolation_bound_check(samples.back().state, cur, theta, 1.0, p.sigma);
    CHECK(rec.pass);
    CHECK(rec.lhs <= rec.rhs * (1.0 + 1e-12));
    CHECK(rec.constant > 0.0);
  }
  CHECK_THROWS_AS(interpolation_bound_check(psi0, phi, 1.0, 1.0, p.sigma),
                  std::invalid_argument);
}

TEST_CASE("guards: regularization and capacity") {
  Grid g(1, 16, 4.0);
  HartreeParams p = mb_params();
  Field phi = gaussian_field(g, 0.8);
  p.alpha = 0.0;
  CHECK_THROWS_AS(product_state(phi, 2, p), std::invalid_argument);
  p.alpha = 0.4;
  CHECK_THROWS_AS(product_state(phi, 30, p), std::invalid_argument);
}
