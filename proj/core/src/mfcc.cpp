#include "kmgr/dsp/mfcc.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "kmgr/dsp/fft.hpp"
#include "kmgr/util/binio.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::dsp {

void DspConfig::validate() const {
  if (n_fft == 0 || (n_fft & (n_fft - 1)) != 0)
    throw DataError("DspConfig: n_fft must be a power of two");
  if (hop == 0 || hop > n_fft) throw DataError("DspConfig: hop must be in (0, n_fft]");
  if (n_mfcc == 0 || n_mfcc > n_mels)
    throw DataError("DspConfig: n_mfcc must be in (0, n_mels]");
  if (sample_rate == 0) throw DataError("DspConfig: sample_rate must be positive");
  const double top = effective_fmax();
  if (fmin < 0.0 || fmin >= top || top > sample_rate / 2.0)
    throw DataError("DspConfig: need 0 <= fmin < fmax <= sample_rate/2");
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k)
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
  return w;
}

namespace {

// Mirror an out-of-range position into [0, n) without repeating the edge
// sample, bouncing as often as needed (matches reflect padding of short
// signals).
std::size_t reflect_index(std::ptrdiff_t pos, std::size_t n) {
  if (n == 1) return 0;
  const std::ptrdiff_t period = 2 * (static_cast<std::ptrdiff_t>(n) - 1);
  std::ptrdiff_t q = pos % period;
  if (q < 0) q += period;
  return static_cast<std::size_t>(q < static_cast<std::ptrdiff_t>(n) ? q : period - q);
}

}  // namespace

Mat stft_power(const audio::AudioClip& clip, const DspConfig& cfg) {
  cfg.validate();
  if (clip.samples.empty()) throw DataError("stft_power: empty clip");
  if (clip.sample_rate != cfg.sample_rate)
    throw DataError("stft_power: clip rate " + std::to_string(clip.sample_rate) +
                    " != config rate " + std::to_string(cfg.sample_rate));

  const std::size_t n = clip.samples.size();
  const std::size_t n_bins = cfg.n_fft / 2 + 1;
  std::size_t frames;
  std::ptrdiff_t offset;  // position of frame 0 in the unpadded signal
  if (cfg.center) {
    frames = 1 + n / cfg.hop;
    offset = -static_cast<std::ptrdiff_t>(cfg.n_fft / 2);
  } else {
    if (n < cfg.n_fft) throw DataError("stft_power: clip shorter than one frame");
    frames = 1 + (n - cfg.n_fft) / cfg.hop;
    offset = 0;
  }

  const std::vector<double> window = hann_window(cfg.n_fft);
  Mat out(frames, n_bins);
  std::vector<std::complex<double>> frame(cfg.n_fft);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::ptrdiff_t start = offset + static_cast<std::ptrdiff_t>(t * cfg.hop);
    for (std::size_t k = 0; k < cfg.n_fft; ++k) {
      const std::ptrdiff_t pos = start + static_cast<std::ptrdiff_t>(k);
      double s;
      if (pos >= 0 && pos < static_cast<std::ptrdiff_t>(n))
        s = clip.samples[static_cast<std::size_t>(pos)];
      else if (cfg.center)
        s = clip.samples[reflect_index(pos, n)];
      else
        s = 0.0;
      frame[k] = s * window[k];
    }
    fft(frame);
    for (std::size_t b = 0; b < n_bins; ++b) out.at(t, b) = std::norm(frame[b]);
  }
  return out;
}

double hz_to_mel(double hz) {
  constexpr double kLinStep = 200.0 / 3.0;
  constexpr double kMinLogHz = 1000.0;
  constexpr double kMinLogMel = kMinLogHz / kLinStep;  // 15.0
  const double log_step = std::log(6.4) / 27.0;
  if (hz < kMinLogHz) return hz / kLinStep;
  return kMinLogMel + std::log(hz / kMinLogHz) / log_step;
}

double mel_to_hz(double mel) {
  constexpr double kLinStep = 200.0 / 3.0;
  constexpr double kMinLogMel = 15.0;
  const double log_step = std::log(6.4) / 27.0;
  if (mel < kMinLogMel) return mel * kLinStep;
  return 1000.0 * std::exp(log_step * (mel - kMinLogMel));
}

Mat mel_filterbank(const DspConfig& cfg) {
  cfg.validate();
  const std::size_t n_bins = cfg.n_fft / 2 + 1;
  const double fmax = cfg.effective_fmax();

  // band edges: n_mels + 2 points equally spaced on the mel scale
  std::vector<double> edges(cfg.n_mels + 2);
  const double mel_lo = hz_to_mel(cfg.fmin);
  const double mel_hi = hz_to_mel(fmax);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                      static_cast<double>(cfg.n_mels + 1));

  std::vector<double> bin_hz(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b)
    bin_hz[b] = static_cast<double>(cfg.sample_rate) / 2.0 * static_cast<double>(b) /
                static_cast<double>(n_bins - 1);

  Mat fb(cfg.n_mels, n_bins);
  for (std::size_t m = 0; m < cfg.n_mels; ++m) {
    const double lower = edges[m], center = edges[m + 1], upper = edges[m + 2];
    const double enorm = 2.0 / (upper - lower);  // Slaney area normalization
    for (std::size_t b = 0; b < n_bins; ++b) {
      const double up = (bin_hz[b] - lower) / (center - lower);
      const double down = (upper - bin_hz[b]) / (upper - center);
      fb.at(m, b) = std::max(0.0, std::min(up, down)) * enorm;
    }
  }
  return fb;
}

Mat power_to_db(const Mat& s) {
  constexpr double kAmin = 1e-10;
  constexpr double kTopDb = 80.0;
  Mat d(s.rows, s.cols);
  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    if (s.values[i] < 0.0) throw DataError("power_to_db: negative power value");
    d.values[i] = 10.0 * std::log10(std::max(s.values[i], kAmin));
    peak = std::max(peak, d.values[i]);
  }
  const double floor_db = peak - kTopDb;
  for (double& v : d.values) v = std::max(v, floor_db);
  return d;
}

std::vector<double> dct_ii_ortho(const std::vector<double>& x, std::size_t n_out) {
  const std::size_t n = x.size();
  if (n_out > n) throw DataError("dct_ii_ortho: n_out exceeds input length");
  std::vector<double> c(n_out, 0.0);
  const double norm0 = std::sqrt(1.0 / static_cast<double>(n));
  const double normk = std::sqrt(2.0 / static_cast<double>(n));
  for (std::size_t k = 0; k < n_out; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      acc += x[i] * std::cos(std::numbers::pi * static_cast<double>(k) *
                             (2.0 * static_cast<double>(i) + 1.0) / (2.0 * static_cast<double>(n)));
    c[k] = acc * (k == 0 ? norm0 : normk);
  }
  return c;
}

MfccMatrix mfcc(const audio::AudioClip& clip, const DspConfig& cfg) {
  const Mat spec = stft_power(clip, cfg);
  const Mat fb = mel_filterbank(cfg);

  Mat mel(spec.rows, cfg.n_mels);
  for (std::size_t t = 0; t < spec.rows; ++t) {
    const double* frame = spec.row(t);
    for (std::size_t m = 0; m < cfg.n_mels; ++m) {
      const double* w = fb.row(m);
      double acc = 0.0;
      for (std::size_t b = 0; b < spec.cols; ++b) acc += w[b] * frame[b];
      mel.at(t, m) = acc;
    }
  }

  const Mat db = power_to_db(mel);
  MfccMatrix out(spec.rows, cfg.n_mfcc);
  std::vector<double> band(cfg.n_mels);
  for (std::size_t t = 0; t < db.rows; ++t) {
    std::copy(db.row(t), db.row(t) + cfg.n_mels, band.begin());
    const std::vector<double> coeffs = dct_ii_ortho(band, cfg.n_mfcc);
    std::copy(coeffs.begin(), coeffs.end(), out.row(t));
  }
  return out;
}

void write_fixture(const Mat& m, const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");
  os << "MFCC-FIXTURE v1 " << m.rows << " " << m.cols << "\n";
  for (double v : m.values) {
    const double le = byteswap_if_big(v);
    os.write(reinterpret_cast<const char*>(&le), sizeof(le));
  }
  if (!os) throw DataError(path + ": write failure");
}

Mat read_fixture(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path + ": cannot open fixture");
  std::string header;
  std::getline(is, header);
  std::istringstream hs(header);
  std::string magic, version;
  std::size_t rows = 0, cols = 0;
  hs >> magic >> version >> rows >> cols;
  if (magic != "MFCC-FIXTURE" || version != "v1" || !hs)
    throw DataError(path + ": bad fixture header '" + header + "'");
  Mat m(rows, cols);
  is.read(reinterpret_cast<char*>(m.values.data()),
          static_cast<std::streamsize>(m.values.size() * sizeof(double)));
  if (static_cast<std::size_t>(is.gcount()) != m.values.size() * sizeof(double))
    throw DataError(path + ": truncated fixture");
  if constexpr (std::endian::native == std::endian::big)
    for (double& v : m.values) v = byteswap_if_big(v);
  return m;
}

}  // namespace kmgr::dsp
