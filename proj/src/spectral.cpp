#include "fhl/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fhl/fft.hpp"

namespace fhl {
namespace {

std::vector<int> shape_of(const Grid& g) {
  return std::vector<int>(static_cast<std::size_t>(g.dim), g.m);
}

void check_finite(const Field& f, const char* op) {
  if (!f.finite()) throw std::invalid_argument(std::string(op) + ": non-finite amplitudes");
}

// Applies a real Fourier multiplier given as a function of |k|^2.
template <typename Fn>
Field apply_multiplier(const Field& f, Fn&& symbol) {
  Field out = f;
  const auto shape = shape_of(f.grid);
  fft::forward(out.values, shape);
  int idx[3];
  for (std::size_t i = 0; i < out.size(); ++i) {
    unravel(i, f.grid.dim, f.grid.m, idx);
    double k2 = 0.0;
    for (int a = 0; a < f.grid.dim; ++a) {
      const double k = f.grid.wavenumber(idx[a]);
      k2 += k * k;
    }
    out[i] *= symbol(k2);
  }
  fft::inverse(out.values, shape);
  return out;
}

// Fourier transform of |x|^{-gamma} in d dimensions combined with the
// convolution-theorem factor (unitary angular-frequency convention):
// K * rho = F^{-1}[ c |k|^{gamma-d} rho^ ],  c = pi^{d/2} 2^{d-gamma}
// Gamma((d-gamma)/2) / Gamma(gamma/2).   (d=3, gamma=1 gives 4 pi.)
double riesz_multiplier_constant(int d, double gamma) {
  return std::pow(M_PI, d / 2.0) * std::pow(2.0, d - gamma) *
         std::tgamma((d - gamma) / 2.0) / std::tgamma(gamma / 2.0);
}

}  // namespace

// Average of (|x|^g + alpha)^{-power} over the origin cell, computed on the
// equal-volume ball (exact in 1D for alpha = 0).  Point sampling would put
// alpha^{-power} at the origin, over-weighting that cell by orders of
// magnitude once alpha drops below the spacing and wrecking the alpha -> 0
// convergence of regularized flows.
double kernel_origin_average(int d, double g, double alpha, int power, double h) {
  const double ball_volume = std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  const double radius = h * std::pow(1.0 / ball_volume, 1.0 / d);
  const double surface = 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
  if (alpha == 0.0) {
    const double gp = g * power;
    return surface * std::pow(radius, d - gp) / (d - gp) / std::pow(h, d);
  }
  // Simpson quadrature of surface * r^{d-1} (r^g + alpha)^{-power} with the
  // substitution r = radius * t^2 to soften the r = 0 corner.
  const int n = 4096;
  const double dt = 1.0 / n;
  double acc = 0.0;
  for (int i = 1; i <= n; ++i) {
    const double t = i * dt;
    const double r = radius * t * t;
    const double f = std::pow(r, d - 1) * 2.0 * radius * t /
                     std::pow(std::pow(r, g) + alpha, power);
    acc += ((i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0)) * f;
  }
  return surface * acc * dt / 3.0 / std::pow(h, d);
}

namespace {

struct KernelCacheKey {
  int dim, m, power;
  double half_width, gamma, alpha;
  bool operator<(const KernelCacheKey& o) const {
    auto tie = [](const KernelCacheKey& k) {
      return std::tuple(k.dim, k.m, k.power, k.half_width, k.gamma, k.alpha);
    };
    return tie(*this) < tie(o);
  }
};

// DFT of the kernel sampled on the zero-padded (2M)^d grid, cached.
const std::vector<cplx>& padded_kernel_hat(const Grid& g, const KernelSpec& spec) {
  static std::map<KernelCacheKey, std::vector<cplx>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  KernelCacheKey key{g.dim, g.m, spec.power, g.half_width, spec.gamma, spec.alpha};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  const int p = 2 * g.m;
  const double h = g.spacing();
  std::size_t n = 1;
  for (int a = 0; a < g.dim; ++a) n *= static_cast<std::size_t>(p);
  std::vector<cplx> ker(n, cplx(0.0));
  int idx[3];
  for (std::size_t i = 0; i < n; ++i) {
    unravel(i, g.dim, p, idx);
    double r2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const int off = idx[a] <= p / 2 ? idx[a] : idx[a] - p;
      const double x = off * h;
      r2 += x * x;
    }
    const double r = std::sqrt(r2);
    double v;
    if (r == 0.0) {
      v = kernel_origin_average(g.dim, spec.gamma, spec.alpha, spec.power, h);
    } else {
      v = std::pow(1.0 / (std::pow(r, spec.gamma) + spec.alpha), spec.power);
    }
    ker[i] = v;
  }
  fft::forward(ker, std::vector<int>(static_cast<std::size_t>(g.dim), p));
  return cache.emplace(key, std::move(ker)).first->second;
}

}  // namespace

void KernelSpec::validate(int dim) const {
  if (!(gamma > 0.0)) throw std::invalid_argument("KernelSpec: gamma must be positive");
  if (alpha < 0.0) throw std::invalid_argument("KernelSpec: alpha must be >= 0");
  if (power < 1) throw std::invalid_argument("KernelSpec: power must be >= 1");
  if (alpha == 0.0 && gamma * power >= dim)
    throw std::invalid_argument(
        "KernelSpec: gamma >= dim with alpha = 0 is not integrable; use regularized_convolve with alpha > 0");
}

void HartreeParams::validate() const {
  if (!(gamma > 0.0 && gamma < 1.5))
    throw std::invalid_argument("gamma: admissible range is (0, 3/2)");
  if (!(sigma >= gamma / 2.0 && sigma <= 1.0))
    throw std::invalid_argument("sigma: admissible range is [gamma/2, 1]");
  if (mu != 1.0 && mu != -1.0)
    throw std::invalid_argument("mu: must be +1 or -1");
  if (!(lambda >= 0.0))  // 0 admits the free flow used by degenerate sweeps
    throw std::invalid_argument("lambda: must be >= 0");
  if (alpha < 0.0)
    throw std::invalid_argument("alpha: must be >= 0");
  if (!(dt > 0.0))
    throw std::invalid_argument("dt: must be positive");
}

KernelSpec HartreeParams::kernel() const {
  KernelSpec spec;
  spec.gamma = gamma;
  spec.alpha = alpha;
  spec.method = (alpha > 0.0 || free_space_bare) ? ConvMethod::padded_real_kernel
                                                 : ConvMethod::fourier_symbol;
  return spec;
}

Field frac_laplacian_apply(const Field& f, double sigma) {
  check_finite(f, "frac_laplacian_apply");
  if (!(sigma > 0.0 && sigma <= 1.0))
    throw std::invalid_argument("frac_laplacian_apply: sigma must be in (0, 1]");
  return apply_multiplier(f, [sigma](double k2) {
    return k2 == 0.0 ? 0.0 : std::pow(k2, sigma);
  });
}

Field sobolev_weight_apply(const Field& f, const SobolevIndex& idx) {
  check_finite(f, "sobolev_weight_apply");
  if (idx.convention == SobolevConvention::standard_hs) {
    const double s = idx.s;
    return apply_multiplier(f, [s](double k2) { return std::pow(1.0 + k2, s / 2.0); });
  }
  const double r = idx.s, sg = idx.sigma;
  return apply_multiplier(f, [r, sg](double k2) {
    return std::pow(1.0 + std::pow(k2, sg), r / 2.0);
  });
}

Field riesz_convolve(const Field& rho, const KernelSpec& spec) {
  check_finite(rho, "riesz_convolve");
  if (spec.alpha != 0.0)
    throw std::invalid_argument("riesz_convolve: requires alpha = 0");
  if (spec.power != 1)
    throw std::invalid_argument("riesz_convolve: kernel powers need regularized_convolve");
  const int d = rho.grid.dim;
  if (spec.gamma >= d)
    throw std::invalid_argument(
        "riesz_convolve: gamma >= dim has no Riesz symbol; use regularized_convolve");
  const double c = riesz_multiplier_constant(d, spec.gamma);
  const double e = (spec.gamma - d) / 2.0;
  return apply_multiplier(rho, [c, e](double k2) {
    return k2 == 0.0 ? 0.0 : c * std::pow(k2, e);
  });
}

Field regularized_convolve(const Field& rho, const KernelSpec& spec) {
  check_finite(rho, "regularized_convolve");
  spec.validate(rho.grid.dim);
  const Grid& g = rho.grid;
  const int p = 2 * g.m;
  const auto pshape = std::vector<int>(static_cast<std::size_t>(g.dim), p);
  std::size_t n = 1;
  for (int a = 0; a < g.dim; ++a) n *= static_cast<std::size_t>(p);
  if (n > (std::size_t(1) << 28))
    throw std::runtime_error("regularized_convolve: padded grid exceeds capacity");

  std::vector<cplx> buf(n, cplx(0.0));
  int idx[3];
  for (std::size_t i = 0; i < rho.size(); ++i) {
    unravel(i, g.dim, g.m, idx);
    std::size_t j = 0;
    for (int a = 0; a < g.dim; ++a) j = j * p + idx[a];
    buf[j] = rho[i];
  }
  fft::forward(buf, pshape);
  const auto& khat = padded_kernel_hat(g, spec);
  for (std::size_t i = 0; i < n; ++i) buf[i] *= khat[i];
  fft::inverse(buf, pshape);

  Field out(g);
  const double hv = g.cell_volume();
  for (std::size_t i = 0; i < rho.size(); ++i) {
    unravel(i, g.dim, g.m, idx);
    std::size_t j = 0;
    for (int a = 0; a < g.dim; ++a) j = j * p + idx[a];
    out[i] = buf[j] * hv;
  }
  return out;
}

Field kernel_convolve(const Field& rho, const KernelSpec& spec) {
  if (spec.method == ConvMethod::fourier_symbol && spec.alpha == 0.0 && spec.power == 1)
    return riesz_convolve(rho, spec);
  return regularized_convolve(rho, spec);
}

double l2_mass(const Field& f) {
  double s = 0.0;
  for (const auto& v : f.values) s += std::norm(v);
  return s * f.grid.cell_volume();
}

double l2_norm(const Field& f) { return std::sqrt(l2_mass(f)); }

double lp_norm(const Field& f, double p) {
  if (p == kInf) {
    double m = 0.0;
    for (const auto& v : f.values) m = std::max(m, std::abs(v));
    return m;
  }
  if (p < 1.0) throw std::invalid_argument("lp_norm: p must be in [1, inf]");
  double s = 0.0;
  for (const auto& v : f.values) s += std::pow(std::abs(v), p);
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

namespace {

// Sum over modes of w(|k|^2) |F|^2 h^d / M^d  ==  integral of w |f^|^2.
template <typename Fn>
double spectral_quadratic(const Field& f, Fn&& weight) {
  Field tmp = f;
  fft::forward(tmp.values, shape_of(f.grid));
  int idx[3];
  double s = 0.0;
  for (std::size_t i = 0; i < tmp.size(); ++i) {
    unravel(i, f.grid.dim, f.grid.m, idx);
    double k2 = 0.0;
    for (int a = 0; a < f.grid.dim; ++a) {
      const double k = f.grid.wavenumber(idx[a]);
      k2 += k * k;
    }
    s += weight(k2) * std::norm(tmp[i]);
  }
  return s * f.grid.cell_volume() / static_cast<double>(f.size());
}

}  // namespace

double sobolev_norm(const Field& f, const SobolevIndex& idx) {
  if (idx.convention == SobolevConvention::standard_hs) {
    const double s = idx.s;
    return std::sqrt(spectral_quadratic(f, [s](double k2) { return std::pow(1.0 + k2, s); }));
  }
  const double r = idx.s, sg = idx.sigma;
  return std::sqrt(spectral_quadratic(
      f, [r, sg](double k2) { return std::pow(1.0 + std::pow(k2, sg), r); }));
}

double sobolev_norm(const Field& f, double s) {
  return sobolev_norm(f, SobolevIndex{s, 1.0, SobolevConvention::standard_hs});
}

double homogeneous_sobolev_norm(const Field& f, double s) {
  return std::sqrt(spectral_quadratic(
      f, [s](double k2) { return k2 == 0.0 ? 0.0 : std::pow(k2, s); }));
}

double mixed_spacetime_norm(const std::vector<std::pair<double, Field>>& traj,
                            double q, double s, double r) {
  if (traj.empty()) throw std::invalid_argument("mixed_spacetime_norm: empty trajectory");
  if (q < 1.0) throw std::invalid_argument("mixed_spacetime_norm: q must be in [1, inf]");
  std::vector<double> g(traj.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    Field w = sobolev_weight_apply(traj[i].second,
                                   SobolevIndex{s, 1.0, SobolevConvention::standard_hs});
    g[i] = lp_norm(w, r);
  }
  if (q == kInf) return *std::max_element(g.begin(), g.end());
  if (traj.size() == 1) return 0.0;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
    const double dt = traj[i + 1].first - traj[i].first;
    integral += 0.5 * dt * (std::pow(g[i], q) + std::pow(g[i + 1], q));
  }
  return std::pow(integral, 1.0 / q);
}

EnergyBreakdown energy_functionals(const Field& f, const HartreeParams& p) {
  EnergyBreakdown e;
  const double sg = p.sigma;
  e.kinetic = 0.5 * spectral_quadratic(f, [sg](double k2) {
    return k2 == 0.0 ? 0.0 : std::pow(k2, sg);
  });
  if (p.lambda != 0.0) {
    Field rho(f.grid);
    for (std::size_t i = 0; i < f.size(); ++i) rho[i] = std::norm(f[i]);
    Field pot = kernel_convolve(rho, p.kernel());
    double v = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) v += pot[i].real() * std::norm(f[i]);
    e.potential = 0.25 * p.mu * p.lambda * v * f.grid.cell_volume();
  }
  e.total = e.kinetic + e.potential;
  return e;
}

double gns_ratio(const Field& f, const HartreeParams& p) {
  const EnergyBreakdown e = energy_functionals(f, p);
  if (!(e.kinetic > 0.0))
    throw std::invalid_argument("gns_ratio: undefined for vanishing kinetic energy");
  const double mass_exp = 4.0 - p.gamma / p.sigma;
  return std::abs(e.potential) /
         (std::pow(e.kinetic, p.gamma / (2.0 * p.sigma)) *
          std::pow(l2_norm(f), mass_exp));
}

namespace {

// Periodic Catmull-Rom interpolation of f at real index coordinates.
cplx interp_at(const Field& f, const double* pos) {
  const int d = f.grid.dim, m = f.grid.m;
  int base[3];
  double frac[3], w[3][4];
  for (int a = 0; a < d; ++a) {
    double pa = pos[a];
    pa -= std::floor(pa / m) * m;  // wrap into [0, M)
    base[a] = static_cast<int>(std::floor(pa));
    frac[a] = pa - base[a];
    const double t = frac[a], t2 = t * t, t3 = t2 * t;
    w[a][0] = 0.5 * (-t3 + 2 * t2 - t);
    w[a][1] = 0.5 * (3 * t3 - 5 * t2 + 2);
    w[a][2] = 0.5 * (-3 * t3 + 4 * t2 + t);
    w[a][3] = 0.5 * (t3 - t2);
  }
  cplx acc(0.0);
  const int stencil = 1 << (2 * d);  // 4^d points
  for (int s = 0; s < stencil; ++s) {
    int code = s;
    double weight = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const int o = code & 3;
      code >>= 2;
      weight *= w[a][o];
      int j = (base[a] + o - 1) % m;
      if (j < 0) j += m;
      flat = flat * m + static_cast<std::size_t>(j);
    }
    acc += weight * f.values[flat];
  }
  return acc;
}

}  // namespace

Field rescale_field(const Field& f, double ell, double gamma, double sigma) {
  const int d = f.grid.dim;
  const double amp = std::pow(ell, (d - gamma) / 2.0 + sigma);
  Field out(f.grid);
  const double h = f.grid.spacing();
  int idx[3];
  double pos[3];
  for (std::size_t i = 0; i < out.size(); ++i) {
    unravel(i, d, f.grid.m, idx);
    for (int a = 0; a < d; ++a) {
      const double y = ell * f.grid.position(idx[a]);
      pos[a] = (y + f.grid.half_width) / h;
    }
    out[i] = amp * interp_at(f, pos);
  }
  return out;
}

Field stretch_field(const Field& f, double stretch) {
  const int d = f.grid.dim;
  Field out(f.grid);
  const double h = f.grid.spacing();
  int idx[3];
  double pos[3];
  for (std::size_t i = 0; i < out.size(); ++i) {
    unravel(i, d, f.grid.m, idx);
    for (int a = 0; a < d; ++a) {
      const double y = f.grid.position(idx[a]) / stretch;
      pos[a] = (y + f.grid.half_width) / h;
    }
    out[i] = interp_at(f, pos);
  }
  return out;
}

void normalize_mass(Field& f, double mass) {
  const double cur = l2_mass(f);
  if (!(cur > 0.0)) throw std::invalid_argument("normalize_mass: zero field");
  const double s = std::sqrt(mass / cur);
  for (auto& v : f.values) v *= s;
}

}  // namespace fhl
