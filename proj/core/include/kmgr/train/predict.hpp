#pragma once

#include <cstdint>
#include <vector>

#include "kmgr/audio/clip.hpp"
#include "kmgr/dsp/config.hpp"
#include "kmgr/nn/model.hpp"

namespace kmgr::train {

struct ClipPrediction {
  std::uint32_t genre_index = 0;
  std::vector<double> probabilities;  // one per class, mean over segments
};

/// Clip-level decision: cut the clip into num_segments equal pieces,
/// run each segment's MFCC matrix through the model in inference mode,
/// average the per-segment probability rows, then take the argmax
/// (lowest index on ties). The clip is resampled first if its rate
/// differs from cfg.sample_rate. Throws if the clip is too short to
/// segment or the segment features do not match the model's input shape.
ClipPrediction predict_clip(nn::Model<float>& model, const audio::AudioClip& clip,
                            std::size_t num_segments, const dsp::DspConfig& cfg);

}  // namespace kmgr::train
