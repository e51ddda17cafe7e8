#include "kmgr/data/dataset.hpp"

#include <atomic>
#include <thread>

#include "kmgr/audio/ops.hpp"
#include "kmgr/audio/wav.hpp"
#include "kmgr/dsp/mfcc.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::data {

void FeatureDataset::validate() const {
  const std::size_t want = static_cast<std::size_t>(frames) * n_mfcc;
  for (const auto& s : samples) {
    if (s.values.size() != want)
      throw DataError("FeatureDataset: sample with " + std::to_string(s.values.size()) +
                      " values, expected " + std::to_string(want));
    if (s.label >= num_classes)
      throw DataError("FeatureDataset: label " + std::to_string(s.label) + " out of range");
  }
}

namespace {

std::vector<FeatureSample> extract_clip(const ManifestEntry& entry, std::uint32_t clip_id,
                                        std::size_t num_segments, const dsp::DspConfig& cfg) {
  audio::AudioClip clip = audio::read_wav(entry.path);
  if (clip.sample_rate != cfg.sample_rate) clip = audio::resample(clip, cfg.sample_rate);

  std::vector<FeatureSample> out;
  out.reserve(num_segments);
  const auto segments = audio::segment_clip(clip, num_segments);
  for (std::size_t s = 0; s < segments.size(); ++s) {
    const dsp::MfccMatrix m = dsp::mfcc(segments[s], cfg);
    FeatureSample sample;
    sample.label = entry.genre_index;
    sample.clip_id = clip_id;
    sample.segment_index = static_cast<std::uint32_t>(s);
    sample.values.assign(m.values.begin(), m.values.end());
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace

FeatureDataset build_feature_dataset(const Manifest& manifest, std::size_t num_segments,
                                     const dsp::DspConfig& cfg, std::size_t threads) {
  if (num_segments == 0) throw DataError("build_feature_dataset: num_segments must be positive");
  manifest.validate();
  cfg.validate();

  const std::size_t n_clips = manifest.entries.size();
  std::vector<std::vector<FeatureSample>> per_clip(n_clips);

  if (threads <= 1 || n_clips <= 1) {
    for (std::size_t i = 0; i < n_clips; ++i)
      per_clip[i] = extract_clip(manifest.entries[i], static_cast<std::uint32_t>(i),
                                 num_segments, cfg);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t n_workers = std::min(threads, n_clips);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next.fetch_add(1); i < n_clips; i = next.fetch_add(1))
            per_clip[i] = extract_clip(manifest.entries[i], static_cast<std::uint32_t>(i),
                                       num_segments, cfg);
        } catch (...) {
          errors[w] = std::current_exception();
          next.store(n_clips);  // stop the other workers
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  FeatureDataset ds;
  ds.num_classes = static_cast<std::uint32_t>(manifest.registry.size());
  for (std::size_t i = 0; i < n_clips; ++i) {
    for (auto& sample : per_clip[i]) {
      const auto n_values = sample.values.size();
      if (ds.samples.empty()) {
        // shape fixed by the first sample; all clips must agree
        const std::size_t frames = n_values / cfg.n_mfcc;
        ds.frames = static_cast<std::uint32_t>(frames);
        ds.n_mfcc = static_cast<std::uint32_t>(cfg.n_mfcc);
      }
      if (n_values != static_cast<std::size_t>(ds.frames) * ds.n_mfcc)
        throw DataError("build_feature_dataset: clip '" + manifest.entries[i].path +
                        "' produced a different feature shape (heterogeneous clip durations?)");
      ds.samples.push_back(std::move(sample));
    }
  }
  return ds;
}

}  // namespace kmgr::data
