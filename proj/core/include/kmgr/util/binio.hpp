#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "kmgr/util/crc32.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr {

// Little-endian binary stream helpers. All on-disk formats here are
// little-endian; on a big-endian host the byte order is swapped explicitly.

template <typename T>
T byteswap_if_big(T v) {
  static_assert(std::is_trivially_copyable_v<T>);
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char* p = reinterpret_cast<unsigned char*>(&v);
    for (std::size_t i = 0, j = sizeof(T) - 1; i < j; ++i, --j) std::swap(p[i], p[j]);
  }
  return v;
}

/// Writer that mirrors every byte into a CRC-32 accumulator.
class BinWriter {
 public:
  explicit BinWriter(std::ostream& os) : os_(os) {}

  void bytes(const void* data, std::size_t len) {
    os_.write(static_cast<const char*>(data), static_cast<std::streamsize>(len));
    crc_.update(data, len);
  }

  template <typename T>
  void scalar(T v) {
    v = byteswap_if_big(v);
    bytes(&v, sizeof(T));
  }

  void u32(std::uint32_t v) { scalar(v); }
  void u64(std::uint64_t v) { scalar(v); }
  void f32(float v) { scalar(v); }
  void f64(double v) { scalar(v); }

  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s.data(), s.size());
  }

  template <typename T>
  void array(const std::vector<T>& v) {
    if constexpr (std::endian::native == std::endian::big) {
      for (T x : v) scalar(x);
    } else {
      bytes(v.data(), v.size() * sizeof(T));
    }
  }

  std::uint32_t crc() const { return crc_.value(); }

  /// Appends the running CRC itself (not folded into the CRC).
  void seal() {
    std::uint32_t c = byteswap_if_big(crc_.value());
    os_.write(reinterpret_cast<const char*>(&c), sizeof(c));
  }

 private:
  std::ostream& os_;
  Crc32 crc_;
};

/// Reader with the matching CRC mirror; throws DataError on truncation.
class BinReader {
 public:
  BinReader(std::istream& is, std::string what) : is_(is), what_(std::move(what)) {}

  void bytes(void* data, std::size_t len) {
    is_.read(static_cast<char*>(data), static_cast<std::streamsize>(len));
    if (static_cast<std::size_t>(is_.gcount()) != len)
      throw DataError(what_ + ": truncated file");
    crc_.update(data, len);
  }

  template <typename T>
  T scalar() {
    T v;
    bytes(&v, sizeof(T));
    return byteswap_if_big(v);
  }

  std::uint32_t u32() { return scalar<std::uint32_t>(); }
  std::uint64_t u64() { return scalar<std::uint64_t>(); }
  float f32() { return scalar<float>(); }
  double f64() { return scalar<double>(); }

  std::string str(std::size_t max_len = 1 << 20) {
    std::uint32_t n = u32();
    if (n > max_len) throw DataError(what_ + ": unreasonable string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }

  template <typename T>
  void array(std::vector<T>& v, std::size_t count) {
    v.resize(count);
    if constexpr (std::endian::native == std::endian::big) {
      for (auto& x : v) x = scalar<T>();
    } else {
      bytes(v.data(), count * sizeof(T));
    }
  }

  /// Reads the trailing CRC and checks it against the mirrored bytes.
  void check_seal() {
    std::uint32_t expect = crc_.value();
    std::uint32_t stored;
    is_.read(reinterpret_cast<char*>(&stored), sizeof(stored));
    if (static_cast<std::size_t>(is_.gcount()) != sizeof(stored))
      throw DataError(what_ + ": truncated file (missing checksum)");
    stored = byteswap_if_big(stored);
    if (stored != expect) throw DataError(what_ + ": checksum failure");
  }

 private:
  std::istream& is_;
  std::string what_;
  Crc32 crc_;
};

}  // namespace kmgr
