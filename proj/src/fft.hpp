#pragma once

#include <complex>
#include <vector>

namespace pcactl::detail {

// In-place unnormalized DFT through FFTW. sign = -1 computes
// X_k = sum_j x_j exp(-2 pi i jk/N); sign = +1 the conjugate kernel.
// Plans are cached per (size, sign); execution is safe from any thread.
void fft_inplace(std::vector<std::complex<double>>& data, int sign);

}  // namespace pcactl::detail
