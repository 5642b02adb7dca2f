#ifndef FHL_MANY_BODY_HPP
#define FHL_MANY_BODY_HPP

#include <Eigen/Dense>
#include <vector>

#include "fhl/hartree.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

// Largest permitted amplitude count for a many-body tensor (2^27).
constexpr std::size_t kManyBodyCapacity = std::size_t(1) << 27;

// Full N-boson wavefunction on grid^N, row-major with particle 1 slowest.
struct ManyBodyState {
  int n_particles = 2;
  Grid grid;                 // per-particle grid (dim 1 by default)
  std::vector<cplx> amplitudes;  // M^(N*dim) entries
  HartreeParams params;

  std::size_t size() const { return amplitudes.size(); }
  double mass() const;       // discrete L2 mass, h^{N dim} weights
  double max_symmetry_defect() const;  // sup over adjacent transpositions
};

ManyBodyState product_state(const Field& phi0, int n_particles,
                            const HartreeParams& params);

// Symmetrized (phi x chi + chi x phi)/norm, N = 2.
ManyBodyState symmetrized_pair(const Field& phi, const Field& chi,
                               const HartreeParams& params);

double mb_energy(const ManyBodyState& psi);  // <Psi, H_N^{(alpha)} Psi>

struct ManyBodySample {
  double t = 0.0;
  ManyBodyState state;
};

struct MbEvolveOptions {
  int sample_stride = 10;
  bool keep_samples = true;  // false: only the final state is retained
};

std::vector<ManyBodySample> mb_evolve(const ManyBodyState& psi0, double horizon,
                                      double dt, const MbEvolveOptions& opt = {});

// Reduced density matrices in the weighted convention: entries carry the
// h^{k dim} quadrature weight, so trace/eigenvalues/products are plain
// matrix algebra and tr = 1.
struct ReducedDensity {
  int k = 1;
  Eigen::MatrixXcd matrix;
};

ReducedDensity reduce_density_1(const ManyBodyState& psi);
ReducedDensity reduce_density_2(const ManyBodyState& psi);

// a_{N,t} = 1 - <phi, gamma^{(1)} phi>, clamped to [0, 1] at rounding scale.
double pickl_functional(const ManyBodyState& psi, const Field& phi);

struct SchattenDistances {
  double trace_norm = 0.0;
  double hs_norm = 0.0;
};

SchattenDistances schatten_distances(const ReducedDensity& rho, const Field& phi);

// tr |S^{theta/2} (gamma - P) S^{theta/2}| with the Fourier weight
// (1+|k|^{2 sigma})^{theta/2} on each index.
double weighted_trace_distance(const ReducedDensity& rho, const Field& phi,
                               double theta, double sigma);

struct InterpolationBoundRecord {
  double theta = 0.0;
  double s = 0.0;
  double lhs = 0.0;       // weighted trace distance at index theta*s
  double rhs = 0.0;
  double constant = 0.0;  // 2 (||S_{1,s}^{1/2} Psi|| + ||S^{s/2} phi||)^{max(1,2 theta)}
  double ratio = 0.0;
  bool pass = false;
};

InterpolationBoundRecord interpolation_bound_check(const ManyBodyState& psi,
                                                   const Field& phi,
                                                   double theta, double s,
                                                   double sigma);

}  // namespace fhl

#endif
