#pragma once

#include <cstdint>
#include <vector>

namespace kmgr::dsp {

/// Analysis parameters for the MFCC chain. Defaults are the canonical
/// configuration: 22050 Hz, 2048-point frames, hop 512, 40 mel bands,
/// 13 cepstral coefficients, centered frames with reflect padding. Under
/// these a 1 s clip yields 44 frames and a 551-sample segment yields 2.
struct DspConfig {
  std::uint32_t sample_rate = 22050;
  std::size_t n_fft = 2048;
  std::size_t hop = 512;
  std::size_t n_mels = 40;
  std::size_t n_mfcc = 13;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 means sample_rate / 2
  bool center = true;

  double effective_fmax() const { return fmax > 0.0 ? fmax : sample_rate / 2.0; }

  /// Throws DataError when an invariant is broken (n_fft not a power of
  /// two, hop out of (0, n_fft], n_mfcc > n_mels, bad fmin/fmax band).
  void validate() const;
};

/// Row-major real matrix. For MFCC output rows are analysis frames and
/// columns the cepstral coefficients.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), values(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  const double* row(std::size_t r) const { return values.data() + r * cols; }
  double* row(std::size_t r) { return values.data() + r * cols; }
};

using MfccMatrix = Mat;

}  // namespace kmgr::dsp
