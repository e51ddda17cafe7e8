#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "kmgr/data/dataset.hpp"
#include "kmgr/data/split.hpp"
#include "kmgr/nn/adam.hpp"
#include "kmgr/nn/model.hpp"
#include "kmgr/train/metrics.hpp"

namespace kmgr::train {

struct EpochStats {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double valid_loss = 0.0;
  double valid_accuracy = 0.0;
  double seconds = 0.0;  // wall clock; excluded from determinism comparisons
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  std::uint64_t seed = 0;
  std::size_t batch_size = 0;
  double learning_rate = 0.0;
  std::string model_kind;       // "dnn" | "cnn"
  std::string experiment_json;  // experiment spec echo, empty if ad hoc
};

struct TrainConfig {
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 1e-4;
  std::uint64_t seed = 0;
  std::size_t eval_batch = 256;
  /// Called after each epoch's metric pass (progress reporting).
  std::function<void(std::size_t epoch, const EpochStats&)> on_epoch;
};

/// Train a model on the split's train part and record per-epoch metrics.
///
/// Deterministic given (model topology, dataset, split, config): parameter
/// init, batch shuffles, and dropout masks all derive from config.seed, and
/// the model is (re)initialized here. Per epoch: seeded shuffle, mini-batches
/// (last partial batch kept), train-mode forward, fused softmax+CE backward,
/// one Adam step per batch; then inference-mode metric passes over the train
/// and validation parts. A non-finite loss aborts with NumericError naming
/// the epoch and batch. With epochs = 0 only the test metrics are computed.
/// When optimizer_out is given the optimizer's final state is moved there
/// (for checkpointing).
TrainReport train(nn::Model<float>& model, const data::FeatureDataset& ds,
                  const data::SplitAssignment& split, const TrainConfig& cfg,
                  nn::Adam<float>* optimizer_out = nullptr);

}  // namespace kmgr::train
