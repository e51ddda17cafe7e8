#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "kmgr/audio/ops.hpp"
#include "kmgr/audio/wav.hpp"
#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

using namespace kmgr;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "kmgr-audio-tests";
    fs::create_directories(d);
    return d;
  }();
  return dir / name;
}

void append_u32(std::string& s, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void append_u16(std::string& s, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

/// Minimal RIFF/WAVE assembler for decoder edge cases.
std::string make_wav_bytes(std::uint16_t format, std::uint16_t channels, std::uint32_t rate,
                           std::uint16_t bits, const std::string& payload,
                           const std::string& extra_chunk = "") {
  std::string fmt;
  append_u16(fmt, format);
  append_u16(fmt, channels);
  append_u32(fmt, rate);
  append_u32(fmt, rate * channels * bits / 8);  // byte rate
  append_u16(fmt, static_cast<std::uint16_t>(channels * bits / 8));
  append_u16(fmt, bits);

  std::string body = "WAVE";
  body += "fmt ";
  append_u32(body, static_cast<std::uint32_t>(fmt.size()));
  body += fmt;
  body += extra_chunk;
  body += "data";
  append_u32(body, static_cast<std::uint32_t>(payload.size()));
  body += payload;
  if (payload.size() % 2) body.push_back('\0');

  std::string out = "RIFF";
  append_u32(out, static_cast<std::uint32_t>(body.size()));
  out += body;
  return out;
}

fs::path write_bytes(const std::string& name, const std::string& bytes) {
  const fs::path p = temp_file(name);
  std::ofstream os(p, std::ios::binary);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  return p;
}

std::string pcm16(const std::vector<int>& samples) {
  std::string s;
  for (int v : samples) append_u16(s, static_cast<std::uint16_t>(static_cast<std::int16_t>(v)));
  return s;
}

}  // namespace

TEST_SUITE("wav") {
  TEST_CASE("write/read round-trip within one quantization step") {
    audio::AudioClip clip;
    clip.sample_rate = 22050;
    Rng rng(3);
    clip.samples.resize(2000);
    for (auto& s : clip.samples) s = rng.uniform(-1.0, 1.0);

    const fs::path p = temp_file("roundtrip.wav");
    audio::write_wav(clip, p.string());
    const audio::AudioClip back = audio::read_wav(p.string());

    REQUIRE(back.samples.size() == clip.samples.size());
    CHECK(back.sample_rate == 22050);
    double max_err = 0.0;
    for (std::size_t i = 0; i < clip.samples.size(); ++i)
      max_err = std::max(max_err, std::abs(back.samples[i] - clip.samples[i]));
    CHECK(max_err <= 1.0 / 32768.0);
  }

  TEST_CASE("write clamps out-of-range samples instead of wrapping") {
    audio::AudioClip clip;
    clip.sample_rate = 8000;
    clip.samples = {1.5, -1.5, 1.0, -1.0};
    const fs::path p = temp_file("clamp.wav");
    audio::write_wav(clip, p.string());
    const audio::AudioClip back = audio::read_wav(p.string());
    CHECK(back.samples[0] == doctest::Approx(back.samples[2]).epsilon(1e-9));
    CHECK(back.samples[1] == doctest::Approx(-1.0).epsilon(1e-3));
  }

  TEST_CASE("stereo is mixed down by channel mean") {
    // L = +8192, R = -8192 -> 0; L = 8192, R = 8192 -> 0.25.
    const std::string payload = pcm16({8192, -8192, 8192, 8192});
    const fs::path p = write_bytes("stereo.wav", make_wav_bytes(1, 2, 44100, 16, payload));
    const audio::AudioClip clip = audio::read_wav(p.string());
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.sample_rate == 44100);
    CHECK(clip.samples[0] == doctest::Approx(0.0));
    CHECK(clip.samples[1] == doctest::Approx(0.25));
  }

  TEST_CASE("24-bit PCM is scaled by 2^23") {
    std::string payload;
    auto push24 = [&](std::int32_t v) {
      payload.push_back(static_cast<char>(v & 0xFF));
      payload.push_back(static_cast<char>((v >> 8) & 0xFF));
      payload.push_back(static_cast<char>((v >> 16) & 0xFF));
    };
    push24(1 << 22);      // +0.5
    push24(-(1 << 22));   // -0.5
    const fs::path p = write_bytes("pcm24.wav", make_wav_bytes(1, 1, 22050, 24, payload));
    const audio::AudioClip clip = audio::read_wav(p.string());
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.samples[0] == doctest::Approx(0.5));
    CHECK(clip.samples[1] == doctest::Approx(-0.5));
  }

  TEST_CASE("float32 payload passes through") {
    std::string payload;
    auto pushf = [&](float f) {
      char buf[4];
      std::memcpy(buf, &f, 4);
      payload.append(buf, 4);
    };
    pushf(0.3f);
    pushf(-0.7f);
    const fs::path p = write_bytes("f32.wav", make_wav_bytes(3, 1, 16000, 32, payload));
    const audio::AudioClip clip = audio::read_wav(p.string());
    REQUIRE(clip.samples.size() == 2);
    CHECK(clip.samples[0] == doctest::Approx(0.3).epsilon(1e-6));
    CHECK(clip.samples[1] == doctest::Approx(-0.7).epsilon(1e-6));
  }

  TEST_CASE("unknown chunks before data are skipped") {
    std::string extra = "LIST";
    append_u32(extra, 4);
    extra += "junk";
    const std::string payload = pcm16({100, 200});
    const fs::path p = write_bytes("extra.wav", make_wav_bytes(1, 1, 22050, 16, payload, extra));
    const audio::AudioClip clip = audio::read_wav(p.string());
    CHECK(clip.samples.size() == 2);
  }

  TEST_CASE("decoder rejects malformed input") {
    CHECK_THROWS_AS((void)audio::read_wav(temp_file("missing.wav").string()), DataError);

    const fs::path bad_magic = write_bytes("bad_magic.wav", "NOTARIFFFILE AT ALL.....");
    CHECK_THROWS_AS((void)audio::read_wav(bad_magic.string()), DataError);

    // Compressed format code (2 = ADPCM) is not supported.
    const fs::path adpcm =
        write_bytes("adpcm.wav", make_wav_bytes(2, 1, 22050, 16, pcm16({1, 2})));
    CHECK_THROWS_AS((void)audio::read_wav(adpcm.string()), DataError);

    // Truncated payload: header promises more bytes than the file holds.
    std::string whole = make_wav_bytes(1, 1, 22050, 16, pcm16({1, 2, 3, 4}));
    const fs::path truncated = write_bytes("trunc.wav", whole.substr(0, whole.size() - 5));
    CHECK_THROWS_AS((void)audio::read_wav(truncated.string()), DataError);

    // Zero-length data chunk.
    const fs::path empty = write_bytes("empty.wav", make_wav_bytes(1, 1, 22050, 16, ""));
    CHECK_THROWS_AS((void)audio::read_wav(empty.string()), DataError);

    // Three channels.
    const fs::path three =
        write_bytes("three.wav", make_wav_bytes(1, 3, 22050, 16, pcm16({1, 2, 3})));
    CHECK_THROWS_AS((void)audio::read_wav(three.string()), DataError);
  }

  TEST_CASE("write_wav refuses an empty clip") {
    audio::AudioClip empty;
    empty.sample_rate = 22050;
    CHECK_THROWS_AS(audio::write_wav(empty, temp_file("none.wav").string()), DataError);
  }
}

TEST_SUITE("audio_ops") {
  TEST_CASE("resample at the same rate is the identity") {
    audio::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples = {0.1, 0.2, 0.3};
    const audio::AudioClip out = audio::resample(clip, 22050);
    CHECK(out.samples == clip.samples);
    CHECK(out.sample_rate == 22050);
  }

  TEST_CASE("resample length follows round(len * target / source)") {
    audio::AudioClip clip;
    clip.sample_rate = 44100;
    clip.samples.assign(44100, 0.0);
    CHECK(audio::resample(clip, 22050).samples.size() == 22050);

    clip.samples.assign(1001, 0.0);
    // round(1001 * 22050 / 44100) = round(500.5) -> 500 or 501; must match
    // the documented round() convention.
    const std::size_t n = audio::resample(clip, 22050).samples.size();
    CHECK(n == static_cast<std::size_t>(std::llround(1001.0 * 22050.0 / 44100.0)));
  }

  TEST_CASE("linear interpolation reproduces a linear ramp exactly") {
    audio::AudioClip clip;
    clip.sample_rate = 100;
    clip.samples.resize(101);
    for (std::size_t i = 0; i <= 100; ++i) clip.samples[i] = static_cast<double>(i) / 100.0;
    const audio::AudioClip up = audio::resample(clip, 300);
    // Interior points of a ramp stay on the line under linear interpolation.
    for (std::size_t i = 0; i + 3 < up.samples.size(); ++i) {
      const double t = static_cast<double>(i) * 100.0 / 300.0 / 100.0;
      CHECK(up.samples[i] == doctest::Approx(t).epsilon(1e-9));
    }
    CHECK(up.sample_rate == 300);
  }

  TEST_CASE("trim_middle_windows packs full windows around the midpoint") {
    audio::AudioClip clip;
    clip.sample_rate = 10;
    clip.samples = {0, 1, 2, 3, 4, 5, 6};  // 0.7 s
    // window = 0.2 s = 2 samples -> 3 windows, 1 leftover sample, offset 0.
    const auto windows = audio::trim_middle_windows(clip, 0.2);
    REQUIRE(windows.size() == 3);
    CHECK(windows[0].samples == std::vector<double>{0, 1});
    CHECK(windows[1].samples == std::vector<double>{2, 3});
    CHECK(windows[2].samples == std::vector<double>{4, 5});

    // 9 samples, window 2 -> 4 windows, offset floor(1/2) = 0.
    clip.samples = {0, 1, 2, 3, 4, 5, 6, 7, 8};
    const auto w9 = audio::trim_middle_windows(clip, 0.2);
    REQUIRE(w9.size() == 4);

    // 8 samples, window 3 -> 2 windows, offset floor(2/2) = 1: [1..3], [4..6].
    clip.samples = {0, 1, 2, 3, 4, 5, 6, 7};
    const auto w8 = audio::trim_middle_windows(clip, 0.3);
    REQUIRE(w8.size() == 2);
    CHECK(w8[0].samples == std::vector<double>{1, 2, 3});
    CHECK(w8[1].samples == std::vector<double>{4, 5, 6});
  }

  TEST_CASE("trim of a too-short clip is empty") {
    audio::AudioClip clip;
    clip.sample_rate = 10;
    clip.samples = {0.5};
    CHECK(audio::trim_middle_windows(clip, 1.0).empty());
  }

  TEST_CASE("segment_clip cuts equal consecutive pieces from offset zero") {
    audio::AudioClip clip;
    clip.sample_rate = 10;
    clip.samples = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    const auto segs = audio::segment_clip(clip, 3);
    REQUIRE(segs.size() == 3);
    for (const auto& s : segs) CHECK(s.samples.size() == 3);  // floor(10/3), tail discarded
    CHECK(segs[0].samples == std::vector<double>{0, 1, 2});
    CHECK(segs[2].samples == std::vector<double>{6, 7, 8});
  }

  TEST_CASE("one second at 22050 Hz cut 40 ways gives 551-sample segments") {
    audio::AudioClip clip;
    clip.sample_rate = 22050;
    clip.samples.assign(22050, 0.25);
    const auto segs = audio::segment_clip(clip, 40);
    REQUIRE(segs.size() == 40);
    for (const auto& s : segs) CHECK(s.samples.size() == 551);
  }

  TEST_CASE("segment_clip rejects more segments than samples") {
    audio::AudioClip clip;
    clip.sample_rate = 10;
    clip.samples = {1, 2, 3};
    CHECK_THROWS_AS((void)audio::segment_clip(clip, 4), DataError);
  }
}
