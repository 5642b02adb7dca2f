#ifndef FHL_SPECTRAL_HPP
#define FHL_SPECTRAL_HPP

#include <limits>
#include <string>
#include <vector>

#include "fhl/grid.hpp"

namespace fhl {

enum class ConvMethod { fourier_symbol, padded_real_kernel };

// Interaction kernel 1/(|x|^gamma + alpha); alpha = 0 is the bare Riesz
// potential.  `power` raises the kernel pointwise (used for the |x|^{-2gamma}
// potential integrand).
struct KernelSpec {
  double gamma = 1.0;
  double alpha = 0.0;
  ConvMethod method = ConvMethod::fourier_symbol;
  int power = 1;

  void validate(int dim) const;
};

enum class SobolevConvention {
  standard_hs,      // symbol (1+|k|^2)^{s/2}
  operator_weight,  // symbol (1+|k|^{2 sigma})^{r/2}
};

struct SobolevIndex {
  double s = 0.0;      // order (r for operator_weight)
  double sigma = 1.0;  // only used by operator_weight
  SobolevConvention convention = SobolevConvention::standard_hs;
};

struct HartreeParams {
  double gamma = 1.0;
  double sigma = 0.5;
  double mu = 1.0;     // +1 defocusing, -1 focusing
  double lambda = 1.0;
  double alpha = 0.0;
  double dt = 2e-3;
  // alpha = 0 convolution via the zero-padded free-space kernel instead of
  // the periodized (zero-mode-removed) Fourier symbol.  The two differ by a
  // constant gauge plus periodic-image terms, so comparisons between bare
  // and regularized flows must run both in the same gauge.
  bool free_space_bare = false;

  void validate() const;  // throws std::invalid_argument naming the key
  KernelSpec kernel() const;
};

// --- Fourier multipliers -------------------------------------------------

Field frac_laplacian_apply(const Field& f, double sigma);
Field sobolev_weight_apply(const Field& f, const SobolevIndex& idx);

// --- Singular-kernel convolutions ---------------------------------------

// Convolution with the Riesz potential |x|^{-gamma} via the exact Fourier
// symbol c_{d,gamma} |k|^{gamma-d}; the divergent zero mode is set to 0.
Field riesz_convolve(const Field& rho, const KernelSpec& spec);

// Linear (zero-padded, non-circular) convolution with the sampled kernel;
// the alpha = 0 origin cell takes the analytic cell average.
Field regularized_convolve(const Field& rho, const KernelSpec& spec);

// Dispatches on spec.method.
Field kernel_convolve(const Field& rho, const KernelSpec& spec);

// Equal-volume-ball average of (|x|^gamma + alpha)^{-power} over one grid
// cell; the value the padded convolution assigns to zero separation.
double kernel_origin_average(int dim, double gamma, double alpha, int power,
                             double h);

// --- Norms ---------------------------------------------------------------

double l2_mass(const Field& f);          // sum |f|^2 h^dim
double l2_norm(const Field& f);
double lp_norm(const Field& f, double p);  // p = inf -> sup norm
double sobolev_norm(const Field& f, const SobolevIndex& idx);
double sobolev_norm(const Field& f, double s);  // standard H^s
double homogeneous_sobolev_norm(const Field& f, double s);

double mixed_spacetime_norm(const std::vector<std::pair<double, Field>>& traj,
                            double q, double s, double r);

// --- Energies ------------------------------------------------------------

struct EnergyBreakdown {
  double kinetic = 0.0;    // T = 1/2 ||(-Delta)^{sigma/2} f||_2^2
  double potential = 0.0;  // V = (mu lambda / 4) <f, (K * |f|^2) f>
  double total = 0.0;
};

EnergyBreakdown energy_functionals(const Field& f, const HartreeParams& p);

// |V| / (T^{gamma/(2 sigma)} ||f||_2^{4 - gamma/sigma}); scale-invariant at
// the mass-critical point sigma = gamma/2.
double gns_ratio(const Field& f, const HartreeParams& p);

// Rescaled field ell^{(d-gamma)/2+sigma} f(ell x), evaluated by trigonometric
// resampling (exact on band-limited data with ell mapping the grid onto
// itself, interpolated otherwise).
Field rescale_field(const Field& f, double ell, double gamma, double sigma);

// Periodic resample of f at x/stretch (width squeeze for stretch < 1),
// cubic interpolation.
Field stretch_field(const Field& f, double stretch);

void normalize_mass(Field& f, double mass = 1.0);

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace fhl

#endif
