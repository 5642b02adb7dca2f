#include <cmath>
#include <random>

#include <doctest.h>

#include "fhl/studies.hpp"

using namespace fhl;

namespace {

SweepSpec line_spec(SweepKind kind) {
  SweepSpec spec;
  spec.kind = kind;
  spec.base.gamma = 1.0;
  spec.base.sigma = 0.5;
  spec.base.alpha = 0.5;
  spec.base.dt = 2e-2;
  spec.grid = Grid(1, 16, 4.0);
  spec.horizon = 0.1;
  return spec;
}

}  // namespace

TEST_CASE("log-log fit recovers exact power laws") {
  std::vector<double> x = {1.0, 2.0, 4.0, 8.0};
  std::vector<double> y1 = x;
  RateFit f1 = rate_fit(x, y1);
  CHECK(f1.valid);
  CHECK(f1.slope == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f1.residual < 1e-12);

  std::vector<double> y2(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y2[i] = 3.7 * x[i] * x[i];
  RateFit f2 = rate_fit(x, y2);
  CHECK(f2.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(f2.intercept == doctest::Approx(std::log(3.7)).epsilon(1e-12));
}

TEST_CASE("log-log fit is robust to small seeded noise") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  std::vector<double> x, y;
  for (int i = 0; i < 12; ++i) {
    const double xi = std::pow(2.0, i * 0.5);
    x.push_back(xi);
    y.push_back(std::pow(xi, 1.5) * (1.0 + 0.01 * noise(rng)));
  }
  RateFit f = rate_fit(x, y);
  CHECK(std::abs(f.slope - 1.5) < 0.05);
  CHECK(f.residual < 0.05);
}

TEST_CASE("log-log fit input validation") {
  CHECK_THROWS_AS(rate_fit({1.0, 2.0}, {1.0, 2.0}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({1.0, 2.0, 3.0}, {1.0, -2.0, 3.0}), std::invalid_argument);
  CHECK_THROWS_AS(rate_fit({1.0, 2.0, 3.0}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("regularization sweep degenerates correctly") {
  // T = 0: both flows are the identity, all distances vanish, fits suppressed.
  SweepSpec spec = line_spec(SweepKind::alpha_sweep);
  spec.grid = Grid(3, 8, 4.0);  // bare kernel needs gamma < dim
  spec.base.alpha = 0.0;
  spec.values = {0.1, 0.2, 0.4};
  spec.horizon = 0.0;
  StudyResult r = alpha_sweep(spec);
  REQUIRE(r.rows.size() == 3);
  for (const auto& row : r.rows) {
    CHECK(row[1] < 1e-14);
    CHECK(row[2] < 1e-14);
  }
  const bool fit_suppressed = !r.fits.count("l2_dist") || !r.fits.at("l2_dist").valid;
  CHECK(fit_suppressed);

  // lambda = 0: identical free flows for every alpha.
  spec.horizon = 0.1;
  spec.base.lambda = 0.0;
  spec.base.dt = 1e-2;
  StudyResult r0 = alpha_sweep(spec);
  for (const auto& row : r0.rows) {
    CHECK(row[1] < 1e-12);
    CHECK(row[2] < 1e-12);
  }
}

TEST_CASE("particle sweep with a frozen schedule matches the plain sweep") {
  SweepSpec spec = line_spec(SweepKind::n_sweep);
  spec.values = {2, 3, 4};
  StudyResult plain = n_sweep(spec);

  SweepSpec coupled = spec;
  coupled.kind = SweepKind::coupled_focusing;
  coupled.schedule_exponent = 0.0;
  StudyResult frozen = coupled_focusing(coupled);

  REQUIRE(plain.rows.size() == frozen.rows.size());
  for (std::size_t i = 0; i < plain.rows.size(); ++i)
    for (std::size_t c = 0; c < plain.rows[i].size(); ++c)
      CHECK(std::abs(plain.rows[i][c] - frozen.rows[i][c]) < 1e-10);
}

TEST_CASE("particle sweep records the depletion chain") {
  SweepSpec spec = line_spec(SweepKind::n_sweep);
  spec.values = {2, 3, 4};
  StudyResult r = n_sweep(spec);
  REQUIRE(r.rows.size() == 3);
  CHECK(r.flags.at("schatten_chain"));
  for (const auto& row : r.rows) {
    const double a = row[2], tr = row[3], hs = row[4];
    CHECK(tr >= hs - 1e-10);
    CHECK(hs <= std::sqrt(2.0 * a) + 1e-8);
  }
}

TEST_CASE("particle sweep input validation") {
  SweepSpec spec = line_spec(SweepKind::n_sweep);
  spec.values = {2, 3, 4};
  spec.grid = Grid(2, 8, 4.0);
  CHECK_THROWS_AS(n_sweep(spec), std::invalid_argument);  // dim != 1
  spec.grid = Grid(1, 16, 4.0);
  spec.base.alpha = 0.0;
  CHECK_THROWS_AS(n_sweep(spec), std::invalid_argument);  // bare kernel
  spec.base.alpha = 0.5;
  spec.values = {2, 2.5, 3};
  CHECK_THROWS_AS(n_sweep(spec), std::invalid_argument);  // non-integer N
  spec.values = {2, 3};
  CHECK_THROWS_AS(n_sweep(spec), std::invalid_argument);  // too few points
  spec.values = {2, 4, 3};
  CHECK_THROWS_AS(n_sweep(spec), std::invalid_argument);  // not monotone
}

TEST_CASE("dichotomy study demands the critical scaling relation") {
  SweepSpec spec = line_spec(SweepKind::dichotomy);
  spec.base.sigma = 1.0;  // != gamma/2
  spec.values = {0.5, 1.5};
  CHECK_THROWS_AS(dichotomy_study(spec), std::invalid_argument);
}

TEST_CASE("persistence study emits a bounded envelope") {
  SweepSpec spec = line_spec(SweepKind::persistence);
  spec.base.alpha = 0.3;
  spec.horizon = 0.2;
  StudyResult r = persistence_study(spec, 1.0);
  REQUIRE(!r.rows.empty());
  CHECK(r.flags.at("bounded_by_envelope"));
  CHECK(r.metadata.at("nu") > 0.0);
  CHECK(r.rows.front()[1] == doctest::Approx(1.0).epsilon(1e-12));
}
