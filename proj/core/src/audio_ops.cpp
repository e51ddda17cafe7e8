#include "kmgr/audio/ops.hpp"

#include <cmath>
#include <string>

#include "kmgr/util/error.hpp"

namespace kmgr::audio {

AudioClip resample(const AudioClip& clip, std::uint32_t target_rate) {
  if (target_rate == 0) throw DataError("resample: target rate must be positive");
  if (target_rate == clip.sample_rate) return clip;

  const std::size_t n = clip.samples.size();
  const auto out_len = static_cast<std::size_t>(std::llround(
      static_cast<double>(n) * target_rate / clip.sample_rate));

  AudioClip out;
  out.sample_rate = target_rate;
  out.source_id = clip.source_id;
  out.samples.resize(out_len);
  if (n == 0) return out;

  const double step = static_cast<double>(clip.sample_rate) / target_rate;
  for (std::size_t i = 0; i < out_len; ++i) {
    const double pos = i * step;
    const auto i0 = static_cast<std::size_t>(pos);
    if (i0 >= n - 1) {
      out.samples[i] = clip.samples[n - 1];  // hold past the last sample
    } else {
      const double frac = pos - static_cast<double>(i0);
      out.samples[i] = clip.samples[i0] * (1.0 - frac) + clip.samples[i0 + 1] * frac;
    }
  }
  return out;
}

std::vector<AudioClip> trim_middle_windows(const AudioClip& clip, double window_seconds) {
  if (window_seconds <= 0) throw DataError("trim_middle_windows: window must be positive");
  const auto win_len = static_cast<std::size_t>(window_seconds * clip.sample_rate);
  std::vector<AudioClip> windows;
  if (win_len == 0 || clip.samples.size() < win_len) return windows;

  const std::size_t n = clip.samples.size() / win_len;
  const std::size_t start = (clip.samples.size() - n * win_len) / 2;
  windows.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    AudioClip w;
    w.sample_rate = clip.sample_rate;
    w.source_id = clip.source_id + "#w" + std::to_string(i);
    const auto begin = clip.samples.begin() + static_cast<std::ptrdiff_t>(start + i * win_len);
    w.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(win_len));
    windows.push_back(std::move(w));
  }
  return windows;
}

std::vector<AudioClip> segment_clip(const AudioClip& clip, std::size_t num_segments) {
  if (num_segments == 0) throw DataError("segment_clip: num_segments must be positive");
  const std::size_t seg_len = clip.samples.size() / num_segments;
  if (seg_len == 0)
    throw DataError("segment_clip: clip of " + std::to_string(clip.samples.size()) +
                    " samples cannot yield " + std::to_string(num_segments) + " segments");

  std::vector<AudioClip> segments;
  segments.reserve(num_segments);
  for (std::size_t i = 0; i < num_segments; ++i) {
    AudioClip s;
    s.sample_rate = clip.sample_rate;
    s.source_id = clip.source_id + "#s" + std::to_string(i);
    const auto begin = clip.samples.begin() + static_cast<std::ptrdiff_t>(i * seg_len);
    s.samples.assign(begin, begin + static_cast<std::ptrdiff_t>(seg_len));
    segments.push_back(std::move(s));
  }
  return segments;
}

}  // namespace kmgr::audio
