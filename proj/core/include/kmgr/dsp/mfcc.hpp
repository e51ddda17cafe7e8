#pragma once

#include <string>
#include <vector>

#include "kmgr/audio/clip.hpp"
#include "kmgr/dsp/config.hpp"

namespace kmgr::dsp {

/// Periodic Hann window: w[k] = 0.5 - 0.5*cos(2*pi*k/n).
std::vector<double> hann_window(std::size_t n);

/// Power spectrogram, rows = frames, cols = n_fft/2 + 1 bins. With
/// cfg.center the signal is reflect-padded by n_fft/2 on both ends
/// (mirrored without repeating the edge sample, bouncing for short
/// signals) and frame t starts at t*hop in the padded signal, giving
/// 1 + floor(len/hop) frames. Each frame is Hann-windowed and squared
/// in magnitude. Requires clip.sample_rate == cfg.sample_rate.
Mat stft_power(const audio::AudioClip& clip, const DspConfig& cfg);

/// Slaney-scale triangular mel filterbank, (n_mels x (n_fft/2 + 1)),
/// with 2/(f_upper - f_lower) area normalization. The scale is linear
/// below 1000 Hz (mel = hz * 3/200) and logarithmic above with step
/// log(6.4)/27.
Mat mel_filterbank(const DspConfig& cfg);

double hz_to_mel(double hz);
double mel_to_hz(double mel);

/// 10*log10(max(S, 1e-10)), then clipped below at max - 80 dB. The clip
/// threshold is relative to the maximum of the whole matrix.
Mat power_to_db(const Mat& s);

/// Orthonormal DCT-II of x truncated to the first n_out coefficients:
/// c[k] = s(k) * sum_n x[n] cos(pi*k*(2n+1)/(2N)), s(0) = sqrt(1/N),
/// s(k>0) = sqrt(2/N).
std::vector<double> dct_ii_ortho(const std::vector<double>& x, std::size_t n_out);

/// Full MFCC chain: power spectrogram -> mel filterbank -> dB (relative
/// to the global matrix max) -> per-frame orthonormal DCT-II, keeping
/// cfg.n_mfcc coefficients. Output is (frames x n_mfcc).
MfccMatrix mfcc(const audio::AudioClip& clip, const DspConfig& cfg);

// Fixture container for oracle parity tests: a text header line
// "MFCC-FIXTURE v1 <rows> <cols>\n" followed by row-major little-endian
// 64-bit floats.
void write_fixture(const Mat& m, const std::string& path);
Mat read_fixture(const std::string& path);

}  // namespace kmgr::dsp
