#ifndef FHL_GROUND_STATE_HPP
#define FHL_GROUND_STATE_HPP

#include <vector>

#include "fhl/spectral.hpp"

namespace fhl {

struct GroundState {
  Field profile;          // Q, real and positive up to discretization
  double omega = 1.0;     // frequency of the augmented soliton equation
  double residual = 0.0;  // sup-norm defect of (-Delta)^sigma Q + omega Q - (K*Q^2) Q
  double critical_mass = 0.0;  // ||Q||_2^2
  int iterations = 0;
  std::vector<double> residual_history;
};

// Spectral-renormalization fixed point for
//   (-Delta)^sigma Q + omega Q = (K_gamma * |Q|^2) Q
// with stabilizing exponent 3/2.  Throws on non-convergence (the error
// message carries the last residual).
GroundState petviashvili_solve(double gamma, double sigma, const Grid& grid,
                               double omega = 1.0, double tol = 1e-8,
                               int max_iter = 500);

double critical_mass(const GroundState& gs);

struct GradientFlowResult {
  Field profile;
  double omega = 0.0;       // terminal Lagrange multiplier
  double residual = 0.0;    // sup-norm of H[Q]Q - omega Q
  double grad_norm = 0.0;   // terminal projected-gradient L2 norm
  std::vector<double> energies;  // monotone nonincreasing
};

// Normalized (projected) gradient flow of E^{(gamma,sigma)} at fixed mass,
// mu = -1, lambda = 1; semi-implicit in the kinetic part.
GradientFlowResult gradient_flow_minimize(double gamma, double sigma,
                                          const Grid& grid, double mass,
                                          double tol = 1e-6,
                                          int max_iter = 20000);

}  // namespace fhl

#endif
