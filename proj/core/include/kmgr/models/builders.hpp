#pragma once

#include <string>
#include <vector>

#include "kmgr/nn/checkpoint.hpp"
#include "kmgr/nn/model.hpp"

namespace kmgr::models {

enum class ModelKind { Dnn, Cnn };

ModelKind parse_model_kind(const std::string& text);  // "dnn" | "cnn"
std::string to_string(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::Dnn;
  /// Per-sample shape: (frames, n_mfcc) for the DNN, (frames, n_mfcc, 1)
  /// for the CNN.
  std::vector<std::size_t> input_shape;
  std::size_t num_classes = 8;
  /// Sixth-experiment variant: one more dropout(0.3) after the 64-unit
  /// dense layer.
  bool extra_dropout = false;

  void validate() const;
};

/// Flatten -> Dense 512 ReLU -> Dense 256 ReLU -> Dropout .3 ->
/// Dense 64 ReLU -> [Dropout .3] -> Dense C -> Softmax.
template <typename T>
nn::Model<T> build_dnn(const ModelSpec& spec);

/// [Conv 32@3x3 ReLU -> MaxPool 3x3/2 -> BatchNorm] x2 ->
/// Conv 32@2x2 ReLU -> MaxPool 2x2/2 -> BatchNorm ->
/// Flatten -> Dense 64 ReLU -> [Dropout .3] -> Dense C -> Softmax.
/// All convolutions and pools use SAME padding.
template <typename T>
nn::Model<T> build_cnn(const ModelSpec& spec);

template <typename T>
nn::Model<T> build_model(const ModelSpec& spec);

/// Reconstruct an uninitialized model from a checkpoint's topology JSON.
template <typename T>
nn::Model<T> model_from_topology(const std::string& topology_json);

/// Load checkpoint, rebuild the model from its stored topology, and apply
/// weights and persistent buffers.
nn::Model<float> load_model(const std::filesystem::path& path);

}  // namespace kmgr::models
