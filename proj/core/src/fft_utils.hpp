#pragma once

#include <complex>
#include <vector>

namespace texfuse::detail {

// In-place complex DFTs via FFTW (unnormalized, FFTW sign convention:
// sign = -1 forward, +1 backward). Plan creation is serialized internally;
// concurrent calls on distinct buffers are safe.
void fft_1d(std::vector<std::complex<double>>& data, int sign);
void fft_2d(std::vector<std::complex<double>>& data, int width, int height, int sign);

}  // namespace texfuse::detail
