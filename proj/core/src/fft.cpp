#include "kmgr/dsp/fft.hpp"

#include <cmath>
#include <numbers>

#include "kmgr/util/error.hpp"

namespace kmgr::dsp {

void fft(std::vector<std::complex<double>>& x, bool inverse) {
  const std::size_t n = x.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw DataError("fft: length " + std::to_string(n) + " is not a power of two");
  if (n == 1) return;

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(x[i], x[j]);
  }

  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = x[i + k];
        const std::complex<double> v = x[i + k + len / 2] * w;
        x[i + k] = u + v;
        x[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }

  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& c : x) c *= scale;
  }
}

std::vector<std::complex<double>> fft_copy(const std::vector<std::complex<double>>& x,
                                           bool inverse) {
  auto y = x;
  fft(y, inverse);
  return y;
}

}  // namespace kmgr::dsp
