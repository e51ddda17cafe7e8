#pragma once

#include <string>

#include "kmgr/data/dataset.hpp"

namespace kmgr::data {

// Feature file layout (all little-endian):
//   magic "KMGRFEAT", u32 version = 1, u32 frames, u32 n_mfcc,
//   u32 num_classes, u64 sample count, then per sample:
//   u32 label, u32 clip_id, u32 segment_index, frames*n_mfcc f32;
//   trailing CRC-32 (IEEE) of every preceding byte.

void save_features(const FeatureDataset& ds, const std::string& path);
FeatureDataset load_features(const std::string& path);

}  // namespace kmgr::data
