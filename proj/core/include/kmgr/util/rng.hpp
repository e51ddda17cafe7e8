#pragma once

#include <cstdint>
#include <vector>

namespace kmgr {

/// Deterministic 64-bit generator (splitmix64). Every randomized code path
/// in the project draws from this generator so that results are repeatable
/// across runs and platforms. Constants are the reference splitmix64 ones:
/// increment 0x9E3779B97F4A7C15, mixers 0xBF58476D1CE4E5B9 and
/// 0x94D049BB133111EB.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). Rejection sampling, no modulo bias.
  std::uint64_t bounded(std::uint64_t bound) {
    if (bound < 2) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - ~std::uint64_t{0} % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return x % bound;
  }

  /// Derives an independent stream for (this seed, stream_id) pairs.
  /// Used to give clips / layers / epochs their own generators without
  /// coupling their draw counts.
  Rng derive(std::uint64_t stream_id) {
    Rng mix(state_ ^ (stream_id * 0x9E3779B97F4A7C15ULL));
    return Rng(mix.next());
  }

  /// In-place Fisher-Yates shuffle.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(bounded(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

}  // namespace kmgr
