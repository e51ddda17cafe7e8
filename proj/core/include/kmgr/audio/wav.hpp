#pragma once

#include <string>

#include "kmgr/audio/clip.hpp"

namespace kmgr::audio {

/// Decodes a RIFF/WAVE file. Accepts PCM 16-bit, PCM 24-bit and
/// IEEE-float-32 payloads with 1 or 2 channels; stereo is mixed down to
/// mono by the per-sample channel mean, integer PCM is scaled by
/// 2^(bits-1). Unknown chunks are skipped. Throws DataError on anything
/// else (bad magic, compressed codecs, zero-length data chunk).
AudioClip read_wav(const std::string& path);

/// Writes a clip as mono 16-bit PCM WAV. Samples are clamped to [-1, 1]
/// and quantized with saturation at the integer limits, so a read-back
/// differs from the source by at most 1/2^15 per sample. Refuses empty
/// clips.
void write_wav(const AudioClip& clip, const std::string& path);

}  // namespace kmgr::audio
