#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "kmgr/audio/clip.hpp"
#include "kmgr/data/manifest.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::synth {

/// One synthetic genre: a parametric signal family plus the range its main
/// parameter wanders over *within* each clip (a bounded random walk), so
/// two segments of one clip sound as different as two clips of the family.
/// The families are deliberately confusable in pairs — shared fundamental
/// ranges, a common broadband noise bed, overlapping modulation rates — so
/// accuracy saturates below 100% and classification has to lean on
/// temporal structure rather than single-frame spectra. See
/// default_genres() for the overlap map.
struct SynthGenreSpec {
  enum class Family {
    SineChord,      // three-partial chord, re-voiced every few seconds
    NoiseBand,      // band-passed noise, wandering center and width
    AmNoise,        // low-passed noise under a slow tremolo
    ChirpTrain,     // frequency sweeps at random times, gaps up to 1.5 s
    SquareWave,     // odd-harmonic stack on a bass fundamental
    PulseTrain,     // decaying broadband clicks at a wandering rate
    FilteredNoise,  // one-pole low-passed noise (dark rumble)
    HarmonicStack,  // full-harmonic tone, fast shallow vibrato
  };

  std::string name;
  Family family;
  double param_lo = 0.0;  // within-clip wander range of the main parameter
  double param_hi = 0.0;  // (Hz for tonal families, event rate for AM/pulse)
  double noise_floor = 0.0;  // level of the shared broadband bed
};

/// The eight default families, in label order.
std::vector<SynthGenreSpec> default_genres();

struct SynthConfig {
  std::size_t genres = 8;  // first N default families, 2..8
  std::size_t clips_per_genre = 20;
  double clip_seconds = 30.0;
  std::uint32_t sample_rate = 22050;
  std::uint64_t seed = 0;
};

/// One deterministic clip of the given family.
audio::AudioClip synth_clip(const SynthGenreSpec& spec, double seconds, std::uint32_t sample_rate,
                            Rng rng);

/// Write WAV files into out_dir/<genre>/clip_NNN.wav plus a manifest.json,
/// and return the manifest. Byte-identical output for identical configs.
data::Manifest write_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg);

}  // namespace kmgr::synth
