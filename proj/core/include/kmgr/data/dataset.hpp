#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmgr/audio/clip.hpp"
#include "kmgr/data/manifest.hpp"
#include "kmgr/dsp/config.hpp"

namespace kmgr::data {

/// One training sample: the MFCC matrix of one segment, stored as 32-bit
/// floats, plus provenance back to its clip.
struct FeatureSample {
  std::uint32_t label = 0;
  std::uint32_t clip_id = 0;
  std::uint32_t segment_index = 0;
  std::vector<float> values;  // frames * n_mfcc, row-major
};

struct FeatureDataset {
  std::uint32_t frames = 0;
  std::uint32_t n_mfcc = 0;
  std::uint32_t num_classes = 0;
  std::vector<FeatureSample> samples;

  std::size_t size() const { return samples.size(); }
  void validate() const;
};

/// Segments every manifest clip into num_segments pieces and extracts
/// MFCCs. Clips are resampled to cfg.sample_rate when they differ. All
/// clips must produce the same feature shape; a mismatch (heterogeneous
/// durations) raises DataError. clip_id is the manifest entry index.
/// threads > 1 parallelizes over clips; sample order is by (clip,
/// segment) regardless of thread count.
FeatureDataset build_feature_dataset(const Manifest& manifest, std::size_t num_segments,
                                     const dsp::DspConfig& cfg, std::size_t threads = 1);

}  // namespace kmgr::data
