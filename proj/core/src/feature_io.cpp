#include "kmgr/data/feature_io.hpp"

#include <cstring>
#include <fstream>

#include "kmgr/util/binio.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::data {

namespace {
constexpr char kMagic[8] = {'K', 'M', 'G', 'R', 'F', 'E', 'A', 'T'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_features(const FeatureDataset& ds, const std::string& path) {
  ds.validate();
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");

  BinWriter w(os);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.u32(ds.frames);
  w.u32(ds.n_mfcc);
  w.u32(ds.num_classes);
  w.u64(ds.samples.size());
  for (const auto& s : ds.samples) {
    w.u32(s.label);
    w.u32(s.clip_id);
    w.u32(s.segment_index);
    w.array(s.values);
  }
  w.seal();
  if (!os) throw DataError(path + ": write failure");
}

FeatureDataset load_features(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError(path + ": cannot open feature file");

  BinReader r(is, path);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw DataError(path + ": not a feature file (bad magic)");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw DataError(path + ": version mismatch (file " + std::to_string(version) +
                    ", expected " + std::to_string(kVersion) + ")");

  FeatureDataset ds;
  ds.frames = r.u32();
  ds.n_mfcc = r.u32();
  ds.num_classes = r.u32();
  const std::uint64_t count = r.u64();
  const std::size_t per_sample = static_cast<std::size_t>(ds.frames) * ds.n_mfcc;
  ds.samples.resize(count);
  for (auto& s : ds.samples) {
    s.label = r.u32();
    s.clip_id = r.u32();
    s.segment_index = r.u32();
    r.array(s.values, per_sample);
  }
  r.check_seal();
  ds.validate();
  return ds;
}

}  // namespace kmgr::data
