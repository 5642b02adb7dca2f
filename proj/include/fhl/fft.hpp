#ifndef FHL_FFT_HPP
#define FHL_FFT_HPP

#include <complex>
#include <vector>

namespace fhl::fft {

// In-place complex DFT over a row-major tensor of the given shape.
// forward() is the unnormalized DFT; inverse() divides by the total size.
// Plans are cached per shape; execution is single-threaded and deterministic.
void forward(std::complex<double>* data, const std::vector<int>& shape);
void inverse(std::complex<double>* data, const std::vector<int>& shape);

void forward(std::vector<std::complex<double>>& data, const std::vector<int>& shape);
void inverse(std::vector<std::complex<double>>& data, const std::vector<int>& shape);

}  // namespace fhl::fft

#endif
