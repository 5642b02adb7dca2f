#include "fhl/studies.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fhl/ground_state.hpp"
#include "fhl/many_body.hpp"

namespace fhl {
namespace {

const char* kind_name(SweepKind k) {
  switch (k) {
    case SweepKind::alpha_sweep: return "alpha_sweep";
    case SweepKind::n_sweep: return "n_sweep";
    case SweepKind::coupled_focusing: return "coupled_focusing";
    case SweepKind::persistence: return "persistence";
    case SweepKind::dichotomy: return "dichotomy";
  }
  return "unknown";
}

void check_sweep_values(const SweepSpec& spec, std::size_t min_points) {
  if (spec.values.size() < min_points)
    throw std::invalid_argument("SweepSpec: at least " + std::to_string(min_points) +
                                " sweep values required");
  for (std::size_t i = 0; i + 1 < spec.values.size(); ++i) {
    const bool up = spec.values[1] > spec.values[0];
    if (up ? !(spec.values[i + 1] > spec.values[i])
           : !(spec.values[i + 1] < spec.values[i]))
      throw std::invalid_argument("SweepSpec: values must be strictly monotone");
  }
}

Field initial_datum(const SweepSpec& spec) {
  const double w = spec.initial_width > 0.0 ? spec.initial_width
                                            : spec.grid.half_width / 6.0;
  return gaussian_field(spec.grid, w);
}

void stamp_metadata(StudyResult& r, const SweepSpec& spec) {
  r.kind = kind_name(spec.kind);
  r.metadata["dim"] = spec.grid.dim;
  r.metadata["points_per_axis"] = spec.grid.m;
  r.metadata["half_width"] = spec.grid.half_width;
  r.metadata["dt"] = spec.base.dt;
  r.metadata["horizon"] = spec.horizon;
  r.metadata["seed"] = static_cast<double>(spec.seed);
}

// Endpoint-only evolution: diagnostics thinned, fields stored only at t = 0, T.
Field evolve_to_horizon(const Field& phi0, const HartreeParams& p, double horizon,
                        bool force_focusing = false) {
  EvolveOptions opt;
  const int nsteps = std::max(1, static_cast<int>(std::llround(horizon / p.dt)));
  opt.store_stride = nsteps + 1;
  opt.diag_stride = nsteps + 1;
  opt.force_focusing = force_focusing;
  Trajectory traj = evolve(phi0, p, horizon, opt);
  return traj.samples.back();
}

RateFit try_fit(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return rate_fit(x, y);
  } catch (const std::invalid_argument&) {
    return RateFit{};
  }
}

// Shared body of n_sweep and coupled_focusing; `exponent` scales the
// regularization schedule alpha_N = alpha0 N^-exponent.
StudyResult particle_sweep(const SweepSpec& spec, double exponent) {
  check_sweep_values(spec, 3);
  if (spec.grid.dim != 1)
    throw std::invalid_argument("n_sweep: per-particle dimension must be 1");
  if (!(spec.base.alpha > 0.0))
    throw std::invalid_argument("n_sweep: base alpha must be positive");

  StudyResult r;
  stamp_metadata(r, spec);
  r.columns = {"n_particles", "alpha", "pickl_a", "trace_dist", "hs_dist"};
  Field phi0 = initial_datum(spec);

  std::vector<double> ns, as, trs;
  bool chain_ok = true;
  for (double vn : spec.values) {
    const int n = static_cast<int>(std::llround(vn));
    if (n < 2 || std::abs(vn - n) > 1e-12)
      throw std::invalid_argument("n_sweep: values must be integers >= 2");
    HartreeParams p = spec.base;
    p.alpha = spec.base.alpha * std::pow(static_cast<double>(n), -exponent);

    Field phi_t;
    try {
      phi_t = evolve_to_horizon(phi0, p, spec.horizon);
    } catch (const std::runtime_error&) {
      r.flags["aborted_n_" + std::to_string(n)] = true;
      continue;
    }

    ManyBodyState psi0 = product_state(phi0, n, p);
    MbEvolveOptions mopt;
    mopt.sample_stride = spec.mb_sample_stride;
    mopt.keep_samples = false;
    auto samples = mb_evolve(psi0, spec.horizon, p.dt, mopt);
    const ManyBodyState& psi_t = samples.back().state;

    const double a = pickl_functional(psi_t, phi_t);
    ReducedDensity rho = reduce_density_1(psi_t);
    SchattenDistances sd = schatten_distances(rho, phi_t);

    r.rows.push_back({static_cast<double>(n), p.alpha, a, sd.trace_norm, sd.hs_norm});
    if (sd.trace_norm < sd.hs_norm - 1e-10 ||
        sd.hs_norm > std::sqrt(2.0 * a) + 1e-10)
      chain_ok = false;
    ns.push_back(n);
    as.push_back(a);
    trs.push_back(sd.trace_norm);
  }
  r.flags["schatten_chain"] = chain_ok;
  r.fits["pickl_a"] = try_fit(ns, as);
  r.fits["trace_dist"] = try_fit(ns, trs);
  return r;
}

}  // namespace

RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("rate_fit: size mismatch");
  if (x.size() < 3)
    throw std::invalid_argument("rate_fit: at least 3 points required");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0))
      throw std::invalid_argument("rate_fit: all values must be positive");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    sx += lx[i];
    sy += ly[i];
    sxx += lx[i] * lx[i];
    sxy += lx[i] * ly[i];
  }
  const double n = static_cast<double>(x.size());
  const double det = n * sxx - sx * sx;
  if (std::abs(det) < 1e-300)
    throw std::invalid_argument("rate_fit: degenerate abscissae");
  RateFit f;
  f.slope = (n * sxy - sx * sy) / det;
  f.intercept = (sy * sxx - sx * sxy) / det;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = ly[i] - (f.slope * lx[i] + f.intercept);
    ss += d * d;
  }
  f.residual = std::sqrt(ss / n);
  f.valid = true;
  return f;
}

StudyResult alpha_sweep(const SweepSpec& spec) {
  check_sweep_values(spec, 3);
  for (double a : spec.values)
    if (!(a > 0.0)) throw std::invalid_argument("alpha_sweep: alpha values must be positive");

  StudyResult r;
  stamp_metadata(r, spec);
  r.columns = {"alpha", "l2_dist", "frac_grad_dist"};
  Field phi0 = initial_datum(spec);

  // The reference runs with the free-space bare kernel so that it shares the
  // regularized flows' gauge; the periodized symbol would differ by a
  // constant (a global phase drift) that swamps the alpha-distance.
  HartreeParams bare = spec.base;
  bare.alpha = 0.0;
  bare.free_space_bare = true;
  Field ref = evolve_to_horizon(phi0, bare, spec.horizon);

  std::vector<double> alphas, d2s, dhs;
  for (double a : spec.values) {
    HartreeParams p = spec.base;
    p.alpha = a;
    Field reg = evolve_to_horizon(phi0, p, spec.horizon);
    Field diff(phi0.grid);
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = ref[i] - reg[i];
    const double d2 = l2_norm(diff);
    // ||(-Delta)^{gamma/4} u||_2, i.e. the |k|^{gamma/2} half-derivative.
    const double dh = homogeneous_sobolev_norm(diff, spec.base.gamma / 2.0);
    r.rows.push_back({a, d2, dh});
    alphas.push_back(a);
    d2s.push_back(d2);
    dhs.push_back(dh);
  }

  bool monotone = true;
  for (std::size_t i = 0; i + 1 < alphas.size(); ++i) {
    const bool bigger = alphas[i + 1] > alphas[i];
    if ((bigger && (d2s[i + 1] < d2s[i] || dhs[i + 1] < dhs[i])) ||
        (!bigger && (d2s[i + 1] > d2s[i] || dhs[i + 1] > dhs[i])))
      monotone = false;
  }
  r.flags["monotone"] = monotone;
  if (monotone) {
    r.fits["l2_dist"] = try_fit(alphas, d2s);
    r.fits["frac_grad_dist"] = try_fit(alphas, dhs);
  }
  return r;
}

StudyResult n_sweep(const SweepSpec& spec) { return particle_sweep(spec, 0.0); }

StudyResult coupled_focusing(const SweepSpec& spec) {
  return particle_sweep(spec, spec.schedule_exponent);
}

StudyResult dichotomy_study(const SweepSpec& spec) {
  check_sweep_values(spec, 1);
  if (std::abs(spec.base.sigma - spec.base.gamma / 2.0) > 1e-12)
    throw std::invalid_argument("dichotomy_study: requires sigma = gamma/2");

  StudyResult r;
  stamp_metadata(r, spec);
  r.columns = {"multiplier", "lambda", "flagged", "flag_time"};

  GroundState gs = petviashvili_solve(spec.base.gamma, spec.base.sigma, spec.grid);
  const double lambda_c = gs.critical_mass;
  r.metadata["lambda_critical"] = lambda_c;

  // Generic near-critical datum: unit-mass Q squeezed to 90% width.
  Field q = gs.profile;
  normalize_mass(q);
  Field phi0 = stretch_field(q, 0.9);
  normalize_mass(phi0);

  for (double mult : spec.values) {
    HartreeParams p = spec.base;
    p.lambda = mult * lambda_c;
    EvolveOptions opt;
    opt.diag_stride = 5;
    opt.store_stride = 1 << 24;
    opt.force_focusing = true;
    bool flagged = false;
    double flag_time = 0.0;
    try {
      Trajectory traj = evolve(phi0, p, spec.horizon, opt);
      flagged = traj.blowup_flagged;
      flag_time = traj.blowup_time;
    } catch (const std::runtime_error&) {
      flagged = true;  // numerical collapse before the monitor tripped
      flag_time = -1.0;
    }
    r.rows.push_back({mult, p.lambda, flagged ? 1.0 : 0.0, flag_time});
    r.flags["flag_" + std::to_string(mult)] = flagged;
  }
  return r;
}

StudyResult persistence_study(const SweepSpec& spec, double s) {
  StudyResult r;
  stamp_metadata(r, spec);
  r.metadata["sobolev_order"] = s;
  r.columns = {"t", "hs_ratio", "envelope"};

  Field phi0 = initial_datum(spec);
  EvolveOptions opt;
  const int nsteps = std::max(1, static_cast<int>(std::llround(spec.horizon / spec.base.dt)));
  opt.store_stride = std::max(1, nsteps / 32);
  opt.diag_stride = opt.store_stride;
  Trajectory traj = evolve(phi0, spec.base, spec.horizon, opt);

  PersistenceReport rep = persistence_report(traj, s);
  r.metadata["nu"] = rep.nu;
  r.metadata["fitted_c"] = rep.fitted_c;
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    r.rows.push_back({rep.times[i], rep.ratios[i],
                      std::exp(rep.fitted_c * rep.nu * rep.nu * rep.times[i])});
  r.flags["bounded_by_envelope"] = true;
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    if (rep.ratios[i] > std::exp(rep.fitted_c * rep.nu * rep.nu * rep.times[i]) * (1.0 + 1e-9))
      r.flags["bounded_by_envelope"] = false;
  return r;
}

}  // namespace fhl
