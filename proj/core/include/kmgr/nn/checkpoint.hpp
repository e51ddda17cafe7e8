#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "kmgr/nn/adam.hpp"
#include "kmgr/nn/model.hpp"

namespace kmgr::nn {

/// In-memory image of a model checkpoint file.
///
/// File layout (all little-endian, length-prefixed strings):
///   magic "KMGRMODL", u32 version (1),
///   topology JSON text,
///   u32 n_params, then per parameter: name, u32 rank, u64 dims, f32 data;
///   u32 n_sections, then per section: 4-byte tag, u64 body length, body —
///     "RSTA" carries persistent buffers (batch-norm running statistics),
///     "OPTM" carries the optimizer step counter and moment accumulators;
///   trailing CRC-32 of every preceding byte.
/// Unknown section tags are skipped on read.
struct CheckpointData {
  std::string topology;  // JSON model description, stored verbatim
  std::vector<std::pair<std::string, Tensor<float>>> params;
  std::vector<std::pair<std::string, Tensor<float>>> state;
  bool has_optimizer = false;
  std::uint64_t opt_step = 0;
  std::vector<std::vector<float>> opt_m, opt_v;
};

void write_checkpoint(std::ostream& os, const CheckpointData& data);
CheckpointData read_checkpoint(std::istream& is, const std::string& what = "checkpoint");

/// Snapshot a model (optionally with optimizer state) to disk.
void save_checkpoint(const std::filesystem::path& path, Model<float>& model,
                     const Adam<float>* optimizer = nullptr);
CheckpointData load_checkpoint(const std::filesystem::path& path);

/// Copy checkpoint tensors into a compatible model by parameter name.
/// Every model parameter must be present with a matching shape; when
/// restore_state is set the same applies to persistent buffers.
void apply_checkpoint(Model<float>& model, const CheckpointData& data, bool restore_state = true);

/// Rebuild optimizer moments from the OPTM section.
void restore_optimizer(Adam<float>& optimizer, const CheckpointData& data);

}  // namespace kmgr::nn
