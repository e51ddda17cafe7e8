#pragma once

#include <complex>
#include <vector>

namespace kmgr::dsp {

/// In-place radix-2 iterative FFT. Forward computes
/// X[k] = sum_n x[n] e^(-2*pi*i*k*n/N); inverse additionally scales by
/// 1/N. Length must be a power of two (throws DataError otherwise).
void fft(std::vector<std::complex<double>>& x, bool inverse = false);

/// Out-of-place convenience wrapper.
std::vector<std::complex<double>> fft_copy(const std::vector<std::complex<double>>& x,
                                           bool inverse = false);

}  // namespace kmgr::dsp
