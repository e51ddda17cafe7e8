#pragma once

#include <cstdint>
#include <vector>

#include "kmgr/audio/clip.hpp"

namespace kmgr::audio {

/// Linear-interpolation resampling to target_rate. Output length is
/// round(len * target / source); positions past the last source sample
/// hold its value. Identity when the rates already match.
///
/// Linear interpolation aliases above target/2 when downsampling; at
/// MFCC resolution this is acceptable, see the module README.
AudioClip resample(const AudioClip& clip, std::uint32_t target_rate);

/// Cuts every full window_seconds window, packed symmetrically around the
/// clip midpoint. Window length is floor(window_seconds * sample_rate)
/// samples; trailing fractional samples are discarded. Returns an empty
/// vector when the clip is shorter than one window.
std::vector<AudioClip> trim_middle_windows(const AudioClip& clip, double window_seconds);

/// Equal consecutive segments from offset 0, each floor(len/num_segments)
/// samples; the remainder at the tail is discarded. Throws when the clip
/// has fewer samples than segments.
std::vector<AudioClip> segment_clip(const AudioClip& clip, std::size_t num_segments);

}  // namespace kmgr::audio
