#pragma once

#include <cstddef>
#include <cstdint>

namespace kmgr {

/// Incremental CRC-32 (IEEE 802.3: reflected, polynomial 0xEDB88320,
/// init and final xor 0xFFFFFFFF). Used to seal binary feature files
/// and checkpoints.
class Crc32 {
 public:
  void update(const void* data, std::size_t len);
  std::uint32_t value() const { return state_ ^ 0xFFFFFFFFu; }

 private:
  std::uint32_t state_ = 0xFFFFFFFFu;
};

std::uint32_t crc32(const void* data, std::size_t len);

}  // namespace kmgr
