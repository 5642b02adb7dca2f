#include "fhl/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace fhl::fft {
namespace {

struct PlanKey {
  std::vector<int> shape;
  int sign;
  bool operator<(const PlanKey& o) const {
    if (sign != o.sign) return sign < o.sign;
    return shape < o.shape;
  }
};

// Plans are created once per (shape, sign) with FFTW_ESTIMATE | FFTW_UNALIGNED
// so they can be replayed on any buffer via the new-array interface.
fftw_plan get_plan(const std::vector<int>& shape, int sign) {
  static std::map<PlanKey, fftw_plan> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  PlanKey key{shape, sign};
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  fftw_complex* buf = fftw_alloc_complex(n);
  fftw_plan p = fftw_plan_dft(static_cast<int>(shape.size()), shape.data(), buf,
                              buf, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(buf);
  cache.emplace(key, p);
  return p;
}

void execute(std::complex<double>* data, const std::vector<int>& shape, int sign) {
  fftw_plan p = get_plan(shape, sign);
  auto* d = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(p, d, d);
}

}  // namespace

void forward(std::complex<double>* data, const std::vector<int>& shape) {
  execute(data, shape, FFTW_FORWARD);
}

void inverse(std::complex<double>* data, const std::vector<int>& shape) {
  execute(data, shape, FFTW_BACKWARD);
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  const double inv = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) data[i] *= inv;
}

void forward(std::vector<std::complex<double>>& data, const std::vector<int>& shape) {
  forward(data.data(), shape);
}

void inverse(std::vector<std::complex<double>>& data, const std::vector<int>& shape) {
  inverse(data.data(), shape);
}

}  // namespace fhl::fft
