#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fhl/ground_state.hpp"
#include "fhl/io.hpp"
#include "fhl/many_body.hpp"
#include "fhl/studies.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerify = 4;

fhl::Field default_datum(const fhl::RunConfig& cfg) {
  const double w = cfg.initial_width > 0.0 ? cfg.initial_width
                                           : cfg.grid.half_width / 6.0;
  return fhl::gaussian_field(cfg.grid, w);
}

fhl::SweepSpec sweep_from(const fhl::RunConfig& cfg,
                          fhl::SweepKind kind,
                          std::vector<double> fallback_values) {
  fhl::SweepSpec spec;
  spec.kind = kind;
  spec.base = cfg.params;
  spec.grid = cfg.grid;
  spec.values = cfg.sweep_values.empty() ? std::move(fallback_values)
                                         : cfg.sweep_values;
  spec.horizon = cfg.horizon;
  spec.initial_width = cfg.initial_width;
  spec.schedule_exponent = cfg.schedule_exponent;
  spec.seed = cfg.seed;
  return spec;
}

void ensure_out_dir(const std::string& dir) {
  std::filesystem::create_directories(dir);
}

int run_evolve(const fhl::RunConfig& cfg) {
  fhl::Field phi0 = default_datum(cfg);
  fhl::EvolveOptions opt;
  opt.store_stride = cfg.store_stride;
  opt.diag_stride = cfg.store_stride;
  fhl::Trajectory traj = fhl::evolve(phi0, cfg.params, cfg.horizon, opt);
  ensure_out_dir(cfg.out_dir);
  fhl::emit_trajectory_csv(traj, cfg.out_dir + "/trajectory.csv");
  fhl::write_field_checkpoint(cfg.out_dir + "/final_field.fhrt", traj.samples.back());
  std::printf("evolve: %zu diagnostics rows, final t = %s%s\n",
              traj.diagnostics.size(),
              fhl::format_real(traj.diagnostics.back().t).c_str(),
              traj.blowup_flagged ? " (growth flag raised)" : "");
  return kExitOk;
}

int run_groundstate(const fhl::RunConfig& cfg) {
  fhl::GroundState gs = fhl::petviashvili_solve(cfg.params.gamma, cfg.params.sigma,
                                                cfg.grid, cfg.omega);
  ensure_out_dir(cfg.out_dir);
  fhl::write_field_checkpoint(cfg.out_dir + "/ground_state.fhrt", gs.profile);
  fhl::StudyResult r;
  r.kind = "groundstate";
  r.metadata["omega"] = gs.omega;
  r.metadata["residual"] = gs.residual;
  r.metadata["critical_mass"] = gs.critical_mass;
  r.metadata["iterations"] = gs.iterations;
  fhl::emit_summary(r, cfg.out_dir + "/ground_state.json");
  std::printf("groundstate: residual %s after %d iterations, ||Q||_2^2 = %s\n",
              fhl::format_real(gs.residual).c_str(), gs.iterations,
              fhl::format_real(gs.critical_mass).c_str());
  return kExitOk;
}

int run_study(const fhl::RunConfig& cfg, const fhl::StudyResult& result,
              const std::string& stem) {
  ensure_out_dir(cfg.out_dir);
  fhl::emit_csv(result, cfg.out_dir + "/" + stem + ".csv");
  fhl::emit_summary(result, cfg.out_dir + "/" + stem + "_summary.json");
  std::printf("%s: %zu rows", result.kind.c_str(), result.rows.size());
  for (const auto& [name, fit] : result.fits)
    if (fit.valid) std::printf(", %s slope %.4f", name.c_str(), fit.slope);
  std::printf("\n");
  return kExitOk;
}

bool check(const char* name, bool ok) {
  std::printf("%-40s %s\n", name, ok ? "pass" : "FAIL");
  return ok;
}

// Invariant suite: cheap end-to-end probes of the spectral identities,
// conservation laws, and reduced-density algebra.
int run_verify(const fhl::RunConfig& cfg) {
  bool all = true;

  {
    fhl::Grid g(1, 64, 10.0);
    std::mt19937_64 rng(cfg.seed ? cfg.seed : 7u);
    std::normal_distribution<double> dist;
    fhl::Field f(g);
    for (auto& v : f.values) v = fhl::cplx(dist(rng), dist(rng));
    const double mass = fhl::l2_mass(f);
    const double hs0 = fhl::sobolev_norm(f, 0.0);
    all &= check("parseval: ||f||_2 == H^0 norm",
                 std::abs(mass - hs0 * hs0) <= 1e-9 * mass);
  }

  {
    fhl::Grid g(3, 16, 8.0);
    fhl::HartreeParams p;
    p.gamma = 1.0;
    p.sigma = 0.5;
    p.dt = 1e-2;
    fhl::Field phi0 = fhl::gaussian_field(g, g.half_width / 6.0);
    fhl::EvolveOptions opt;
    opt.store_stride = 50;
    opt.diag_stride = 10;
    fhl::Trajectory traj = fhl::evolve(phi0, p, 0.5, opt);
    double mass_drift = 0.0, energy_drift = 0.0;
    for (const auto& d : traj.diagnostics) {
      mass_drift = std::max(mass_drift, std::abs(d.mass - traj.diagnostics[0].mass));
      energy_drift = std::max(energy_drift, std::abs(d.energy - traj.diagnostics[0].energy));
    }
    all &= check("conservation: mass drift < 1e-10", mass_drift < 1e-10);
    all &= check("conservation: energy drift < 1e-5", energy_drift < 1e-5);
  }

  {
    fhl::Grid g(1, 32, 6.0);
    fhl::HartreeParams p;
    p.gamma = 1.0;
    p.sigma = 0.5;
    p.alpha = 0.2;
    fhl::Field phi(g), chi(g);
    const double norm = 1.0 / std::sqrt(2.0 * g.half_width);
    for (int j = 0; j < g.m; ++j) {
      const double x = g.position(j);
      phi[static_cast<std::size_t>(j)] = std::polar(norm, M_PI * x / g.half_width);
      chi[static_cast<std::size_t>(j)] = std::polar(norm, 2.0 * M_PI * x / g.half_width);
    }
    fhl::ManyBodyState pair = fhl::symmetrized_pair(phi, chi, p);
    const double a = fhl::pickl_functional(pair, phi);
    auto sd = fhl::schatten_distances(fhl::reduce_density_1(pair), phi);
    all &= check("rank-2 density: a == 1/2", std::abs(a - 0.5) < 1e-10);
    all &= check("rank-2 density: HS == 1/sqrt(2)",
                 std::abs(sd.hs_norm - 1.0 / std::sqrt(2.0)) < 1e-10);
    all &= check("rank-2 density: trace norm == 1",
                 std::abs(sd.trace_norm - 1.0) < 1e-10);

    auto rec = fhl::interpolation_bound_check(pair, phi, 0.5, 1.0, p.sigma);
    all &= check("interpolation bound: ratio <= 1", rec.pass);
  }

  if (!all) {
    std::printf("verify: FAILURES DETECTED\n");
    return kExitVerify;
  }
  std::printf("verify: all checks passed\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pseudospectral laboratory for fractional Hartree dynamics"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  int threads_override = 0;
  unsigned long long seed_override = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--out", out_override, "output directory (overrides config)");
  app.add_option("--threads", threads_override, "worker thread cap");
  app.add_option("--seed", seed_override, "RNG seed (overrides config)")
      ->each([&](const std::string&) { seed_set = true; });

  const std::vector<std::string> commands = {"evolve",    "groundstate",
                                             "alpha-sweep", "meanfield",
                                             "dichotomy", "verify"};
  for (const auto& c : commands) app.add_subcommand(c)->fallthrough();

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  fhl::RunConfig cfg;
  try {
    if (!config_path.empty()) {
      cfg = fhl::parse_config_file(config_path);
    } else if (command != "verify") {
      std::fprintf(stderr, "error: --config is required for %s\n", command.c_str());
      return kExitConfig;
    }
    cfg.command = command;
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (threads_override > 0) cfg.threads = threads_override;
    if (seed_set) cfg.seed = seed_override;
  } catch (const fhl::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }

  try {
    if (command == "evolve") return run_evolve(cfg);
    if (command == "groundstate") return run_groundstate(cfg);
    if (command == "alpha-sweep")
      return run_study(cfg,
                       fhl::alpha_sweep(sweep_from(cfg, fhl::SweepKind::alpha_sweep,
                                                   {0.05, 0.1, 0.2, 0.4})),
                       "alpha_sweep");
    if (command == "meanfield") {
      fhl::SweepSpec spec = sweep_from(cfg, fhl::SweepKind::n_sweep, {2, 3, 4});
      fhl::StudyResult result = cfg.schedule_exponent == 0.0
                                    ? fhl::n_sweep(spec)
                                    : fhl::coupled_focusing(spec);
      return run_study(cfg, result, "meanfield");
    }
    if (command == "dichotomy")
      return run_study(cfg,
                       fhl::dichotomy_study(sweep_from(cfg, fhl::SweepKind::dichotomy,
                                                       {0.5, 0.9, 1.1, 1.5})),
                       "dichotomy");
    if (command == "verify") return run_verify(cfg);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
