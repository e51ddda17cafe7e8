#include "kmgr/nn/checkpoint.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>

#include "kmgr/util/binio.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::nn {

namespace {

constexpr char kMagic[8] = {'K', 'M', 'G', 'R', 'M', 'O', 'D', 'L'};
constexpr std::uint32_t kVersion = 1;

void write_named_tensors(BinWriter& w, const std::vector<std::pair<std::string, Tensor<float>>>& ts) {
  w.u32(static_cast<std::uint32_t>(ts.size()));
  for (const auto& [name, t] : ts) {
    w.str(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (std::size_t d : t.shape) w.u64(d);
    w.array(t.data);
  }
}

std::vector<std::pair<std::string, Tensor<float>>> read_named_tensors(BinReader& r, const std::string& what) {
  std::vector<std::pair<std::string, Tensor<float>>> out;
  const std::uint32_t n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    std::string name = r.str();
    const std::uint32_t rank = r.u32();
    if (rank > 8) throw DataError(what + ": unreasonable tensor rank");
    std::vector<std::size_t> shape(rank);
    std::size_t numel = 1;
    for (auto& d : shape) {
      d = static_cast<std::size_t>(r.u64());
      numel *= d;
    }
    Tensor<float> t;
    t.shape = std::move(shape);
    r.array(t.data, numel);
    out.emplace_back(std::move(name), std::move(t));
  }
  return out;
}

}  // namespace

void write_checkpoint(std::ostream& os, const CheckpointData& data) {
  BinWriter w(os);
  w.bytes(kMagic, sizeof(kMagic));
  w.u32(kVersion);
  w.str(data.topology);
  write_named_tensors(w, data.params);

  std::vector<std::pair<std::string, std::string>> sections;
  if (!data.state.empty()) {
    std::ostringstream body;
    BinWriter bw(body);
    write_named_tensors(bw, data.state);
    sections.emplace_back("RSTA", body.str());
  }
  if (data.has_optimizer) {
    std::ostringstream body;
    BinWriter bw(body);
    bw.u64(data.opt_step);
    bw.u32(static_cast<std::uint32_t>(data.opt_m.size()));
    for (std::size_t i = 0; i < data.opt_m.size(); ++i) {
      bw.u64(data.opt_m[i].size());
      bw.array(data.opt_m[i]);
      bw.array(data.opt_v[i]);
    }
    sections.emplace_back("OPTM", body.str());
  }

  w.u32(static_cast<std::uint32_t>(sections.size()));
  for (const auto& [tag, body] : sections) {
    w.bytes(tag.data(), 4);
    w.u64(body.size());
    w.bytes(body.data(), body.size());
  }
  w.seal();
}

CheckpointData read_checkpoint(std::istream& is, const std::string& what) {
  BinReader r(is, what);
  char magic[8];
  r.bytes(magic, sizeof(magic));
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) throw DataError(what + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != kVersion)
    throw DataError(what + ": unsupported version " + std::to_string(version));

  CheckpointData data;
  data.topology = r.str();
  data.params = read_named_tensors(r, what);

  const std::uint32_t n_sections = r.u32();
  for (std::uint32_t s = 0; s < n_sections; ++s) {
    char tag[4];
    r.bytes(tag, 4);
    const std::uint64_t len = r.u64();
    if (std::memcmp(tag, "RSTA", 4) == 0) {
      data.state = read_named_tensors(r, what);
    } else if (std::memcmp(tag, "OPTM", 4) == 0) {
      data.has_optimizer = true;
      data.opt_step = r.u64();
      const std::uint32_t n = r.u32();
      data.opt_m.resize(n);
      data.opt_v.resize(n);
      for (std::uint32_t i = 0; i < n; ++i) {
        const std::uint64_t numel = r.u64();
        r.array(data.opt_m[i], numel);
        r.array(data.opt_v[i], numel);
      }
    } else {
      std::vector<char> skipped(len);
      if (len) r.bytes(skipped.data(), len);
    }
  }
  r.check_seal();
  return data;
}

void save_checkpoint(const std::filesystem::path& path, Model<float>& model,
                     const Adam<float>* optimizer) {
  CheckpointData data;
  data.topology = model.meta;
  for (const auto& np : model.named_params()) data.params.emplace_back(np.name, np.param->value);
  for (const auto& np : model.named_all())
    if (std::none_of(data.params.begin(), data.params.end(),
                     [&](const auto& p) { return p.first == np.name; }))
      data.state.emplace_back(np.name, np.param->value);
  if (optimizer) {
    data.has_optimizer = true;
    data.opt_step = optimizer->steps_taken();
    data.opt_m = optimizer->first_moments();
    data.opt_v = optimizer->second_moments();
  }

  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write checkpoint: " + path.string());
  write_checkpoint(os, data);
  if (!os) throw DataError("write failure: " + path.string());
}

CheckpointData load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint: " + path.string());
  return read_checkpoint(is, path.filename().string());
}

void apply_checkpoint(Model<float>& model, const CheckpointData& data, bool restore_state) {
  auto copy_into = [&](const std::vector<NamedParam<float>>& targets,
                       const std::vector<std::pair<std::string, Tensor<float>>>& source,
                       const char* kind) {
    for (const auto& np : targets) {
      const Tensor<float>* found = nullptr;
      for (const auto& [name, t] : source)
        if (name == np.name) {
          found = &t;
          break;
        }
      if (!found) throw DataError(std::string("checkpoint missing ") + kind + " " + np.name);
      if (found->shape != np.param->value.shape)
        throw DataError("checkpoint shape mismatch for " + np.name + ": file has " +
                        shape_str(found->shape) + ", model has " + shape_str(np.param->value.shape));
      np.param->value = *found;
    }
  };
  copy_into(model.named_params(), data.params, "parameter");
  if (restore_state) {
    std::vector<NamedParam<float>> state_only;
    auto trainable = model.named_params();
    for (const auto& np : model.named_all()) {
      const bool is_trainable = std::any_of(trainable.begin(), trainable.end(),
                                            [&](const auto& p) { return p.name == np.name; });
      if (!is_trainable) state_only.push_back(np);
    }
    if (!state_only.empty()) copy_into(state_only, data.state, "state buffer");
  }
}

void restore_optimizer(Adam<float>& optimizer, const CheckpointData& data) {
  if (!data.has_optimizer) throw DataError("checkpoint has no optimizer section");
  optimizer.restore(data.opt_step, data.opt_m, data.opt_v);
}

}  // namespace kmgr::nn
