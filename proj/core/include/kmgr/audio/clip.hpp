#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace kmgr::audio {

/// Mono PCM audio, normalized to [-1, 1]. The unit of ingestion and
/// trimming; immutable by convention once built.
struct AudioClip {
  std::vector<double> samples;
  std::uint32_t sample_rate = 0;
  std::string source_id;

  double duration_seconds() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
  std::size_t size() const { return samples.size(); }
};

}  // namespace kmgr::audio
