#ifndef FHL_HARTREE_HPP
#define FHL_HARTREE_HPP

#include <optional>
#include <vector>

#include "fhl/spectral.hpp"

namespace fhl {

struct DiagnosticsRecord {
  double t = 0.0;
  double mass = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double energy = 0.0;
  double h_gamma_half = 0.0;  // ||phi||_{H^{gamma/2}}
  double h_sigma = 0.0;       // ||phi||_{H^sigma}
  double sup_potential = 0.0; // ||K * |phi|^2||_inf (kernel only, no coupling)
};

struct Trajectory {
  HartreeParams params;
  Grid grid;
  std::vector<DiagnosticsRecord> diagnostics;
  std::vector<double> sample_times;   // times of stored fields
  std::vector<Field> samples;         // stored at `store_stride` steps
  bool blowup_flagged = false;
  double blowup_time = 0.0;
};

struct EvolveOptions {
  int store_stride = 10;        // field storage cadence in steps
  int diag_stride = 1;          // diagnostics cadence in steps
  double blowup_factor = 5.0;   // flag when T exceeds this multiple of T(0)
  bool enforce_normalization = true;
  bool force_focusing = false;  // allow focusing alpha = 0 beyond threshold
  double lambda_critical = kInf;  // estimated lambda_{H,c} for the guard
};

// mu lambda (K_{gamma,alpha} * |phi|^2), real to rounding.
Field hartree_potential(const Field& phi, const HartreeParams& p);

// One Strang step: half kinetic phase, exact potential phase, half kinetic.
Field strang_step(const Field& phi, const HartreeParams& p);

Trajectory evolve(const Field& phi0, const HartreeParams& p, double horizon,
                  const EvolveOptions& opt = {});

struct PersistenceReport {
  double nu = 0.0;                  // sup_t ||phi_t||_{H^{gamma/2}}
  std::vector<double> times;
  std::vector<double> ratios;       // ||phi_t||_{H^s} / ||phi_0||_{H^s}
  double fitted_c = 0.0;            // smallest c with ratio <= e^{c nu^2 t}
};

PersistenceReport persistence_report(const Trajectory& traj, double s);

struct BlowupReport {
  std::vector<double> times;
  std::vector<double> kinetic;      // T^{(sigma)} series
  bool flagged = false;
  double flag_time = 0.0;
};

BlowupReport blowup_monitor(const Trajectory& traj, double factor = 5.0);

// Trapezoidal time integral of ||K_{2gamma} * |phi|^2||_inf^{1/2} over the
// stored samples (regularized kernel squared when alpha > 0).
double sup_potential_integral(const Trajectory& traj);

}  // namespace fhl

#endif
