#ifndef FHL_STUDIES_HPP
#define FHL_STUDIES_HPP

#include <map>
#include <string>
#include <vector>

#include "fhl/hartree.hpp"
#include "fhl/spectral.hpp"

namespace fhl {

enum class SweepKind { alpha_sweep, n_sweep, coupled_focusing, persistence, dichotomy };

struct SweepSpec {
  SweepKind kind = SweepKind::alpha_sweep;
  HartreeParams base;
  Grid grid;
  std::vector<double> values;   // sweep points, strictly monotone
  double horizon = 0.5;
  double initial_width = 0.0;   // 0 -> L/6 Gaussian default
  double schedule_exponent = 0.75;  // coupled_focusing: alpha_N = a0 N^-e
  unsigned long long seed = 0;
  int mb_sample_stride = 10;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // RMS log-space defect
  bool valid = false;
};

struct StudyResult {
  std::string kind;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;  // one row per sweep point / sample
  std::map<std::string, RateFit> fits;
  std::map<std::string, double> metadata;
  std::map<std::string, bool> flags;
};

RateFit rate_fit(const std::vector<double>& x, const std::vector<double>& y);

// Alpha-convergence study: evolve phi and phi^(alpha) from the same
// smooth datum, record the L2 and (-Delta)^{gamma/4} half-derivative
// distances at t = T, fit log-log slopes p2 / ph over the alpha grid.
StudyResult alpha_sweep(const SweepSpec& spec);

// Mean-field N-sweep: a_{N,T}, trace and HS distances vs the matching
// regularized Hartree reference; slope of log a vs log N.
StudyResult n_sweep(const SweepSpec& spec);

// n_sweep with the coupled schedule alpha_N = alpha0 N^{-3/4}.
StudyResult coupled_focusing(const SweepSpec& spec);

// Blow-up dichotomy at lambda in values * lambda_{H,c} from squeezed-Q data.
StudyResult dichotomy_study(const SweepSpec& spec);

// Persistence-of-regularity growth envelope along one run.
StudyResult persistence_study(const SweepSpec& spec, double s);

}  // namespace fhl

#endif
