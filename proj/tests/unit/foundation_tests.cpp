#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "kmgr/nn/tensor.hpp"
#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

using namespace kmgr;

TEST_SUITE("rng") {
  TEST_CASE("splitmix64 reference vectors") {
    Rng r0(0);
    CHECK(r0.next() == 0xE220A8397B1DCDAFULL);
    CHECK(r0.next() == 0x6E789E6AA1B965F4ULL);
    CHECK(r0.next() == 0x06C45D188009454FULL);

    Rng r42(42);
    CHECK(r42.next() == 0xBDD732262FEB6E95ULL);
    CHECK(r42.next() == 0x28EFE333B266F103ULL);
  }

  TEST_CASE("uniform stays in [0, 1) and fills the range") {
    Rng rng(7);
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 10000; ++i) {
      const double u = rng.uniform();
      CHECK(u >= 0.0);
      CHECK(u < 1.0);
      lo = std::min(lo, u);
      hi = std::max(hi, u);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
  }

  TEST_CASE("uniform(lo, hi) respects bounds") {
    Rng rng(8);
    for (int i = 0; i < 1000; ++i) {
      const double u = rng.uniform(-3.0, 5.0);
      CHECK(u >= -3.0);
      CHECK(u < 5.0);
    }
  }

  TEST_CASE("bounded covers [0, n) without gaps") {
    Rng rng(9);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) ++counts[rng.bounded(7)];
    for (int c : counts) CHECK(c > 700);  // each bucket near 1000
    CHECK(rng.bounded(1) == 0);
    CHECK(rng.bounded(0) == 0);
  }

  TEST_CASE("derive gives reproducible independent streams") {
    Rng a(123), b(123);
    Rng s1 = a.derive(1);
    Rng s1_again = b.derive(1);
    Rng s2 = b.derive(2);
    const std::uint64_t x = s1.next();
    CHECK(x == s1_again.next());  // same (seed, stream) -> same sequence
    CHECK(x != s2.next());        // different stream -> different sequence
    // derive must not advance the parent.
    CHECK(a.next() == b.next());
  }

  TEST_CASE("shuffle is a deterministic permutation") {
    std::vector<int> v(50);
    std::iota(v.begin(), v.end(), 0);
    std::vector<int> w = v;
    Rng r1(11), r2(11);
    r1.shuffle(v);
    r2.shuffle(w);
    CHECK(v == w);

    std::vector<int> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> expect(50);
    std::iota(expect.begin(), expect.end(), 0);
    CHECK(sorted == expect);  // still a permutation
    CHECK(v != expect);       // and actually shuffled
  }
}

TEST_SUITE("tensor") {
  TEST_CASE("shape bookkeeping") {
    nn::Tensor<float> t({2, 3, 4});
    CHECK(t.numel() == 24);
    CHECK(t.rank() == 3);
    CHECK(t.dim(1) == 3);
    CHECK(t.data.size() == 24);
  }

  TEST_CASE("reshape preserves data and checks element count") {
    nn::Tensor<float> t({2, 6});
    std::iota(t.data.begin(), t.data.end(), 0.0f);
    nn::Tensor<float> r = t.reshaped({3, 4});
    CHECK(r.numel() == 12);
    CHECK(r.data == t.data);
    CHECK_THROWS_AS((void)t.reshaped({5, 5}), DataError);
  }

  TEST_CASE("cast converts element type") {
    nn::Tensor<double> t({2, 2});
    t.data = {1.5, -2.5, 0.0, 3.0};
    nn::Tensor<float> f = t.cast<float>();
    CHECK(f.data[0] == 1.5f);
    CHECK(f.data[1] == -2.5f);
    CHECK(f.same_shape(nn::Tensor<float>({2, 2})));
  }
}
