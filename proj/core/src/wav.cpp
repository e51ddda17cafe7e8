#include "kmgr/audio/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "kmgr/util/binio.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatIeeeFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct FmtChunk {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

template <typename T>
T read_le(std::istream& is, const std::string& path) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (static_cast<std::size_t>(is.gcount()) != sizeof(T))
    throw DataError(path + ": truncated WAV file");
  return byteswap_if_big(v);
}

double decode_sample(const unsigned char* p, const FmtChunk& fmt) {
  switch (fmt.bits) {
    case 16: {
      std::int16_t v;
      std::memcpy(&v, p, 2);
      v = byteswap_if_big(v);
      return static_cast<double>(v) / 32768.0;
    }
    case 24: {
      std::int32_t v = static_cast<std::int32_t>(p[0]) |
                       (static_cast<std::int32_t>(p[1]) << 8) |
                       (static_cast<std::int32_t>(p[2]) << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign-extend
      return static_cast<double>(v) / 8388608.0;
    }
    case 32: {
      float v;
      std::memcpy(&v, p, 4);
      v = byteswap_if_big(v);
      return std::clamp(static_cast<double>(v), -1.0, 1.0);
    }
    default:
      throw DataError("unsupported bit depth");
  }
}

}  // namespace

AudioClip read_wav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path + ": cannot open file");

  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, "RIFF", 4) != 0)
    throw DataError(path + ": malformed RIFF header");
  (void)read_le<std::uint32_t>(is, path);  // overall size, unused
  is.read(magic, 4);
  if (is.gcount() != 4 || std::memcmp(magic, "WAVE", 4) != 0)
    throw DataError(path + ": not a WAVE container");

  FmtChunk fmt;
  bool have_fmt = false;
  std::vector<unsigned char> data;
  bool have_data = false;

  while (is.read(magic, 4) && is.gcount() == 4) {
    std::uint32_t chunk_size = read_le<std::uint32_t>(is, path);
    if (std::memcmp(magic, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw DataError(path + ": malformed fmt chunk");
      std::vector<unsigned char> buf(chunk_size);
      is.read(reinterpret_cast<char*>(buf.data()), chunk_size);
      if (static_cast<std::uint32_t>(is.gcount()) != chunk_size)
        throw DataError(path + ": truncated fmt chunk");
      auto u16 = [&](std::size_t off) {
        return static_cast<std::uint16_t>(buf[off] | (buf[off + 1] << 8));
      };
      auto u32at = [&](std::size_t off) {
        return static_cast<std::uint32_t>(buf[off]) | (static_cast<std::uint32_t>(buf[off + 1]) << 8) |
               (static_cast<std::uint32_t>(buf[off + 2]) << 16) | (static_cast<std::uint32_t>(buf[off + 3]) << 24);
      };
      fmt.format = u16(0);
      fmt.channels = u16(2);
      fmt.sample_rate = u32at(4);
      fmt.bits = u16(14);
      if (fmt.format == kFormatExtensible) {
        // actual format lives in the first two bytes of the subformat GUID
        if (chunk_size < 40) throw DataError(path + ": malformed extensible fmt chunk");
        fmt.format = u16(24);
      }
      have_fmt = true;
    } else if (std::memcmp(magic, "data", 4) == 0) {
      if (!have_fmt) throw DataError(path + ": data chunk precedes fmt chunk");
      data.resize(chunk_size);
      is.read(reinterpret_cast<char*>(data.data()), chunk_size);
      if (static_cast<std::uint32_t>(is.gcount()) != chunk_size)
        throw DataError(path + ": truncated data chunk");
      have_data = true;
    } else {
      // unknown chunk: skip payload (chunks are word-aligned)
      is.seekg(chunk_size + (chunk_size & 1), std::ios::cur);
      continue;
    }
    if (chunk_size & 1) is.seekg(1, std::ios::cur);
  }

  if (!have_fmt) throw DataError(path + ": missing fmt chunk");
  if (!have_data) throw DataError(path + ": missing data chunk");
  if (data.empty()) throw DataError(path + ": zero-length data chunk");
  if (fmt.sample_rate == 0) throw DataError(path + ": zero sample rate");
  if (fmt.channels != 1 && fmt.channels != 2)
    throw DataError(path + ": unsupported channel count " + std::to_string(fmt.channels));
  if (fmt.format != kFormatPcm && fmt.format != kFormatIeeeFloat)
    throw DataError(path + ": unsupported codec (format tag " + std::to_string(fmt.format) + ")");
  if (fmt.format == kFormatPcm && fmt.bits != 16 && fmt.bits != 24)
    throw DataError(path + ": unsupported PCM bit depth " + std::to_string(fmt.bits));
  if (fmt.format == kFormatIeeeFloat && fmt.bits != 32)
    throw DataError(path + ": unsupported float bit depth " + std::to_string(fmt.bits));

  const std::size_t bytes_per_sample = fmt.bits / 8;
  const std::size_t frame_bytes = bytes_per_sample * fmt.channels;
  const std::size_t frames = data.size() / frame_bytes;
  if (frames == 0) throw DataError(path + ": zero-length data chunk");

  AudioClip clip;
  clip.sample_rate = fmt.sample_rate;
  clip.source_id = path;
  clip.samples.resize(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    const unsigned char* p = data.data() + i * frame_bytes;
    double acc = 0.0;
    for (std::uint16_t c = 0; c < fmt.channels; ++c)
      acc += decode_sample(p + c * bytes_per_sample, fmt);
    clip.samples[i] = acc / fmt.channels;
  }
  return clip;
}

void write_wav(const AudioClip& clip, const std::string& path) {
  if (clip.samples.empty()) throw DataError(path + ": refusing to write zero-length data chunk");
  if (clip.sample_rate == 0) throw DataError(path + ": zero sample rate");

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");

  const std::uint32_t n = static_cast<std::uint32_t>(clip.samples.size());
  const std::uint32_t data_bytes = 2 * n;

  auto w16 = [&](std::uint16_t v) {
    v = byteswap_if_big(v);
    os.write(reinterpret_cast<const char*>(&v), 2);
  };
  auto w32 = [&](std::uint32_t v) {
    v = byteswap_if_big(v);
    os.write(reinterpret_cast<const char*>(&v), 4);
  };

  os.write("RIFF", 4);
  w32(36 + data_bytes);
  os.write("WAVE", 4);
  os.write("fmt ", 4);
  w32(16);
  w16(1);  // PCM
  w16(1);  // mono
  w32(clip.sample_rate);
  w32(clip.sample_rate * 2);
  w16(2);
  w16(16);
  os.write("data", 4);
  w32(data_bytes);
  for (double s : clip.samples) {
    double scaled = std::round(s * 32768.0);
    auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
    w16(static_cast<std::uint16_t>(q));
  }
  if (!os) throw DataError(path + ": write failure");
}

}  // namespace kmgr::audio
