#include "kmgr/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "kmgr/audio/wav.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::synth {

namespace {

constexpr double kTau = 6.283185307179586476925286766559;

double gauss(Rng& rng) {
  const double u1 = 1.0 - rng.uniform();  // (0, 1], keeps the log finite
  const double u2 = rng.uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTau * u2);
}

/// One-pole low-pass: y += a (x - y), a from the cutoff frequency.
struct OnePole {
  double a = 0.0, y = 0.0;
  void set_cutoff(double hz, double sr) { a = 1.0 - std::exp(-kTau * hz / sr); }
  double operator()(double x) { return y += a * (x - y); }
};

/// Chamberlin state-variable filter; the band-pass tap is used for the
/// noise-band family. The coefficient is clamped well inside the filter's
/// stability region for the damping values used here.
struct StateVariable {
  double f = 0.0, q = 0.5, lp = 0.0, bp = 0.0;
  void set_cutoff(double hz, double sr) {
    f = std::min(2.0 * std::sin(kTau * 0.5 * hz / sr), 0.75);
  }
  double band(double x) {
    lp += f * bp;
    const double hp = x - lp - q * bp;
    bp += f * hp;
    return bp;
  }
};

/// Bounded random walk, piecewise linear at a 256-sample control rate.
/// step_frac is the walk sigma per control step as a fraction of the range,
/// so 0.02 lets a parameter cross its whole range within one 30 s clip.
/// This within-clip wandering is deliberate: two segments cut from the same
/// clip land at different parameter values, so memorizing a clip's exact
/// sound generalizes no better than learning its family.
class Wander {
 public:
  Wander(Rng& rng, double lo, double hi, double step_frac, std::size_t hold = 256)
      : lo_(lo), hi_(hi), step_(step_frac * (hi - lo)), hold_(hold) {
    cur_ = rng.uniform(lo, hi);
    nxt_ = advance(rng);
  }

  double operator()(Rng& rng) {
    const double t = static_cast<double>(pos_) / static_cast<double>(hold_);
    const double v = cur_ + (nxt_ - cur_) * t;
    if (++pos_ == hold_) {
      pos_ = 0;
      cur_ = nxt_;
      nxt_ = advance(rng);
    }
    return v;
  }

  /// One event-driven step (for per-event rather than per-sample use).
  double step_event(Rng& rng) { return cur_ = nxt_ = advance(rng); }

 private:
  double advance(Rng& rng) {
    double v = nxt_ + step_ * gauss(rng);
    while (v < lo_ || v > hi_) {  // reflect at the range edges
      if (v < lo_) v = 2.0 * lo_ - v;
      if (v > hi_) v = 2.0 * hi_ - v;
    }
    return v;
  }

  double lo_, hi_, step_, cur_ = 0.0, nxt_ = 0.0;
  std::size_t hold_, pos_ = 0;
};

/// Shared broadband background: low-passed white noise whose cutoff and
/// level wander. Every family sits on this bed at a family-tuned level, so
/// a stretch whose foreground is weak (shallow tremolo, buried band, the
/// gap between chirps or clicks) collapses toward the same distribution
/// regardless of genre. That overlap is what keeps the task from being
/// solvable by clip memorization or single-frame spectra.
class NoiseBed {
 public:
  NoiseBed(Rng& rng, double sr, double level)
      : sr_(sr),
        cut_(rng, 1500.0, 4800.0, 0.01),
        lvl_(rng, 0.6 * level, 1.4 * level, 0.006) {}

  double operator()(Rng& rng) {
    lp_.set_cutoff(cut_(rng), sr_);
    return lvl_(rng) * 2.2 * lp_(gauss(rng));
  }

 private:
  double sr_;
  Wander cut_, lvl_;
  OnePole lp_;
};

using Family = SynthGenreSpec::Family;

void gen_sine_chord(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander root(rng, spec.param_lo, spec.param_hi, 0.02);
  const double vib_rate = rng.uniform(2.0, 6.0);
  const double vib_depth = rng.uniform(0.004, 0.02);
  const double vib_phase = rng.uniform(0.0, kTau);
  // The voicing (interval set and partial balance) changes every few
  // seconds, so different segments of one clip carry different chords.
  static constexpr double kVoicings[3][3] = {
      {1.0, 1.25, 1.5}, {1.0, 1.2, 1.5}, {1.0, 1.333333333333, 2.0}};
  const double* ratios = kVoicings[rng.bounded(3)];
  double amps[3] = {1.0, rng.uniform(0.3, 0.9), rng.uniform(0.2, 0.7)};
  double phase[3] = {rng.uniform(0.0, kTau), rng.uniform(0.0, kTau), rng.uniform(0.0, kTau)};
  std::size_t revoice_at = static_cast<std::size_t>(rng.uniform(2.0, 5.0) * sr);
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n == revoice_at) {
      ratios = kVoicings[rng.bounded(3)];
      amps[1] = rng.uniform(0.3, 0.9);
      amps[2] = rng.uniform(0.2, 0.7);
      revoice_at += static_cast<std::size_t>(rng.uniform(2.0, 5.0) * sr);
    }
    const double t = static_cast<double>(n) / sr;
    const double f =
        root(rng) * (1.0 + vib_depth * std::sin(kTau * vib_rate * t + vib_phase));
    double v = 0.0;
    for (int k = 0; k < 3; ++k) {
      phase[k] += kTau * f * ratios[k] / sr;
      v += amps[k] * std::sin(phase[k]);
    }
    s[n] = v + bed(rng);
  }
}

void gen_noise_band(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander center(rng, spec.param_lo, spec.param_hi, 0.02);
  Wander damping(rng, 0.3, 1.2, 0.012);   // band narrows and widens
  Wander level(rng, 0.8, 2.2, 0.01);      // band sinks into the bed at the low end
  StateVariable svf;
  for (std::size_t n = 0; n < s.size(); ++n) {
    svf.q = damping(rng);
    svf.set_cutoff(center(rng), sr);
    s[n] = level(rng) * svf.band(gauss(rng)) + bed(rng);
  }
}

void gen_am_noise(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander rate(rng, spec.param_lo, spec.param_hi, 0.015);
  Wander depth(rng, 0.25, 0.95, 0.01);  // shallow stretches degrade toward the plain bed
  Wander cut(rng, 1200.0, 4800.0, 0.012);
  OnePole lp;
  double phase = rng.uniform(0.0, kTau);
  for (std::size_t n = 0; n < s.size(); ++n) {
    phase += kTau * rate(rng) / sr;
    const double env = 1.0 - depth(rng) * 0.5 * (1.0 + std::sin(phase));
    lp.set_cutoff(cut(rng), sr);
    s[n] = (env + 0.05) * 2.2 * lp(gauss(rng)) + bed(rng);
  }
}

void gen_chirp_train(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  for (auto& v : s) v = bed(rng);
  Wander f_hi_w(rng, spec.param_lo, spec.param_hi, 0.02);
  Wander f_lo_w(rng, 250.0, 900.0, 0.02);
  // Event-driven: gaps run up to 1.5 s, so a fair share of 1 s segments
  // catch little or no chirp energy and read as bed-only.
  std::size_t cursor = static_cast<std::size_t>(rng.uniform(0.0, 0.8) * sr);
  while (cursor < s.size()) {
    const double f_lo = f_lo_w.step_event(rng);
    const double f_hi = f_hi_w.step_event(rng);
    const bool upward = rng.uniform() < 0.75;
    const double amp = rng.uniform(0.4, 1.0);
    const std::size_t len = static_cast<std::size_t>(rng.uniform(0.1, 0.35) * sr);
    double phase = rng.uniform(0.0, kTau);
    for (std::size_t i = 0; i < len && cursor + i < s.size(); ++i) {
      const double tau = static_cast<double>(i) / static_cast<double>(len);
      const double x = upward ? tau : 1.0 - tau;
      const double f = f_lo + (f_hi - f_lo) * x;
      phase += kTau * f / sr;
      // raised-cosine fade over the first/last 15% keeps edges click-free
      const double edge = std::min({1.0, tau / 0.15, (1.0 - tau) / 0.15});
      const double env = 0.5 - 0.5 * std::cos(std::numbers::pi * std::clamp(edge, 0.0, 1.0));
      s[cursor + i] += amp * env * std::sin(phase);
    }
    cursor += len + static_cast<std::size_t>(rng.uniform(0.3, 1.5) * sr);
  }
}

void gen_square_wave(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander f0(rng, spec.param_lo, spec.param_hi, 0.015);
  Wander rolloff(rng, 0.7, 1.7, 0.008);  // brightness breathes within the clip
  double phase = rng.uniform(0.0, kTau);
  double w[8] = {};
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n % 256 == 0) {  // harmonic weights follow the wandering rolloff
      const double r = rolloff(rng);
      for (int k = 0; k < 8; ++k) w[k] = std::pow(2 * k + 1, -r);
    }
    phase += kTau * f0(rng) / sr;
    double v = 0.0;
    for (int k = 0; k < 8; ++k) v += w[k] * std::sin((2 * k + 1) * phase);
    s[n] = v + bed(rng);
  }
}

void gen_pulse_train(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  for (auto& v : s) v = bed(rng);
  Wander rate(rng, spec.param_lo, spec.param_hi, 0.012);
  Wander click_amp(rng, 0.4, 1.0, 0.01);  // weak stretches sink clicks into the bed
  OnePole color;
  std::size_t cursor = static_cast<std::size_t>(rng.uniform(0.0, 0.2) * sr);
  while (cursor < s.size()) {
    const double r = rate.step_event(rng);
    const double amp = click_amp.step_event(rng);
    const double decay = rng.uniform(0.0025, 0.009);
    color.set_cutoff(rng.uniform(2000.0, 6000.0), sr);
    const std::size_t click_samples = static_cast<std::size_t>(5.0 * decay * sr);
    for (std::size_t i = 0; i < click_samples && cursor + i < s.size(); ++i) {
      const double t = static_cast<double>(i) / sr;
      s[cursor + i] += amp * 2.0 * color(gauss(rng)) * std::exp(-t / decay);
    }
    cursor += static_cast<std::size_t>((1.0 / r) * rng.uniform(0.75, 1.3) * sr);
  }
}

void gen_filtered_noise(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander cutoff(rng, spec.param_lo, spec.param_hi, 0.015);
  Wander level(rng, 2.0, 3.5, 0.008);
  OnePole lp;
  for (std::size_t n = 0; n < s.size(); ++n) {
    lp.set_cutoff(cutoff(rng), sr);
    s[n] = level(rng) * lp(gauss(rng)) + bed(rng);
  }
}

void gen_harmonic_stack(std::vector<double>& s, double sr, const SynthGenreSpec& spec, Rng& rng) {
  NoiseBed bed(rng, sr, spec.noise_floor);
  Wander f0(rng, spec.param_lo, spec.param_hi, 0.015);
  Wander rolloff(rng, 0.5, 1.2, 0.008);
  const double vib_rate = rng.uniform(3.0, 7.0);
  const double vib_depth = rng.uniform(0.004, 0.015);
  const double vib_phase = rng.uniform(0.0, kTau);
  const int n_harm = 4 + static_cast<int>(rng.bounded(5));
  double phase = rng.uniform(0.0, kTau);
  double w[8] = {};
  for (std::size_t n = 0; n < s.size(); ++n) {
    if (n % 256 == 0) {
      const double r = rolloff(rng);
      for (int k = 0; k < n_harm; ++k) w[k] = std::pow(k + 1, -r);
    }
    const double t = static_cast<double>(n) / sr;
    const double f =
        f0(rng) * (1.0 + vib_depth * std::sin(kTau * vib_rate * t + vib_phase));
    phase += kTau * f / sr;
    double v = 0.0;
    for (int k = 0; k < n_harm; ++k) v += w[k] * std::sin((k + 1) * phase);
    s[n] = v + bed(rng);
  }
}

}  // namespace

std::vector<SynthGenreSpec> default_genres() {
  using F = Family;
  // Difficulty is tuned on purpose. The main parameter wanders across its
  // whole range within every clip, and the families overlap pairwise:
  //   - square-wave / harmonic-stack / sine-chord share fundamentals in
  //     110-600 Hz and differ only in partial structure;
  //   - noise-band / filtered-noise / shallow am-noise converge on the
  //     same low-passed broadband shape;
  //   - pulse-train and am-noise overlap in modulation rate (5-9 Hz) and
  //     differ in envelope shape (sharp transient vs smooth tremolo);
  //   - chirp gaps leave bed-only segments that carry no genre cue at all.
  // noise_floor sets the shared NoiseBed level (a +/-40% wander around it).
  return {
      {"sine-chord", F::SineChord, 150.0, 400.0, 0.30},
      {"noise-band", F::NoiseBand, 600.0, 2400.0, 0.35},
      {"am-noise", F::AmNoise, 2.0, 9.0, 0.05},
      {"chirp-train", F::ChirpTrain, 2000.0, 4500.0, 0.45},
      {"square-wave", F::SquareWave, 110.0, 260.0, 0.30},
      {"pulse-train", F::PulseTrain, 5.0, 16.0, 0.35},
      {"filtered-noise", F::FilteredNoise, 400.0, 2000.0, 0.22},
      {"harmonic-stack", F::HarmonicStack, 200.0, 600.0, 0.30},
  };
}

audio::AudioClip synth_clip(const SynthGenreSpec& spec, double seconds, std::uint32_t sample_rate,
                            Rng rng) {
  if (seconds <= 0.0) throw DataError("synth: clip length must be positive");
  const double sr = static_cast<double>(sample_rate);
  const std::size_t n = static_cast<std::size_t>(std::llround(seconds * sr));
  if (n == 0) throw DataError("synth: clip length rounds to zero samples");

  audio::AudioClip clip;
  clip.sample_rate = sample_rate;
  clip.samples.resize(n);

  switch (spec.family) {
    case Family::SineChord: gen_sine_chord(clip.samples, sr, spec, rng); break;
    case Family::NoiseBand: gen_noise_band(clip.samples, sr, spec, rng); break;
    case Family::AmNoise: gen_am_noise(clip.samples, sr, spec, rng); break;
    case Family::ChirpTrain: gen_chirp_train(clip.samples, sr, spec, rng); break;
    case Family::SquareWave: gen_square_wave(clip.samples, sr, spec, rng); break;
    case Family::PulseTrain: gen_pulse_train(clip.samples, sr, spec, rng); break;
    case Family::FilteredNoise: gen_filtered_noise(clip.samples, sr, spec, rng); break;
    case Family::HarmonicStack: gen_harmonic_stack(clip.samples, sr, spec, rng); break;
  }

  double peak = 0.0;
  for (double v : clip.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0) {
    const double scale = 0.7 / peak;
    for (double& v : clip.samples) v *= scale;
  }
  return clip;
}

data::Manifest write_corpus(const std::filesystem::path& out_dir, const SynthConfig& cfg) {
  const std::vector<SynthGenreSpec> families = default_genres();
  if (cfg.genres < 2 || cfg.genres > families.size())
    throw DataError("synth: genres must be 2.." + std::to_string(families.size()));
  if (cfg.clips_per_genre == 0) throw DataError("synth: need at least one clip per genre");

  std::filesystem::create_directories(out_dir);
  Rng master(cfg.seed);

  std::vector<std::string> names;
  data::Manifest manifest;
  std::vector<data::ManifestEntry> entries;
  for (std::size_t g = 0; g < cfg.genres; ++g) {
    const SynthGenreSpec& spec = families[g];
    names.push_back(spec.name);
    std::filesystem::create_directories(out_dir / spec.name);
    for (std::size_t c = 0; c < cfg.clips_per_genre; ++c) {
      char file[32];
      std::snprintf(file, sizeof(file), "clip_%03zu.wav", c);
      const std::string rel = spec.name + "/" + file;
      const audio::AudioClip clip =
          synth_clip(spec, cfg.clip_seconds, cfg.sample_rate, master.derive(g * 65536 + c + 1));
      audio::write_wav(clip, (out_dir / rel).string());
      entries.push_back({rel, static_cast<std::uint32_t>(g), rel});
    }
  }
  manifest.registry = data::GenreRegistry(std::move(names));
  manifest.entries = std::move(entries);

  const std::string manifest_path = (out_dir / "manifest.json").string();
  data::save_manifest(manifest, manifest_path);
  return data::load_manifest(manifest_path);
}

}  // namespace kmgr::synth
