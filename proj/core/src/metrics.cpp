#include "kmgr/train/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "kmgr/nn/loss.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::train {

double accuracy(const std::vector<std::uint32_t>& predictions,
                const std::vector<std::uint32_t>& labels) {
  if (predictions.empty()) throw DataError("accuracy: empty prediction list");
  if (predictions.size() != labels.size())
    throw DataError("accuracy: " + std::to_string(predictions.size()) + " predictions vs " +
                    std::to_string(labels.size()) + " labels");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i)
    if (predictions[i] == labels[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(predictions.size());
}

std::uint32_t argmax_row(const float* row, std::size_t n) {
  std::uint32_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (row[i] > row[best]) best = static_cast<std::uint32_t>(i);
  return best;
}

nn::Tensor<float> gather_batch(const data::FeatureDataset& ds,
                               const std::vector<std::uint32_t>& indices, std::size_t start,
                               std::size_t count, const std::vector<std::size_t>& input_shape) {
  const std::size_t sample_len = nn::Tensor<float>::count(input_shape);
  if (sample_len != static_cast<std::size_t>(ds.frames) * ds.n_mfcc)
    throw DataError("batch: model input shape " + nn::shape_str(input_shape) +
                    " does not match feature shape (" + std::to_string(ds.frames) + ", " +
                    std::to_string(ds.n_mfcc) + ")");
  std::vector<std::size_t> shape;
  shape.reserve(input_shape.size() + 1);
  shape.push_back(count);
  shape.insert(shape.end(), input_shape.begin(), input_shape.end());
  nn::Tensor<float> batch(std::move(shape));
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t idx = indices[start + i];
    if (idx >= ds.size()) throw DataError("batch: sample index out of range");
    const auto& values = ds.samples[idx].values;
    std::copy(values.begin(), values.end(), batch.data.begin() + i * sample_len);
  }
  return batch;
}

EvalResult evaluate(nn::Model<float>& model, const data::FeatureDataset& ds,
                    const std::vector<std::uint32_t>& indices, std::size_t batch_size) {
  if (indices.empty()) throw DataError("evaluate: empty index set");
  if (batch_size == 0) throw DataError("evaluate: zero batch size");
  double log_loss_sum = 0.0;
  std::size_t hits = 0;
  const std::size_t C = model.num_classes;
  for (std::size_t start = 0; start < indices.size(); start += batch_size) {
    const std::size_t count = std::min(batch_size, indices.size() - start);
    nn::Tensor<float> x = gather_batch(ds, indices, start, count, model.input_shape);
    const nn::Tensor<float> probs = model.forward(x, nn::Mode::Infer);
    for (std::size_t i = 0; i < count; ++i) {
      const std::uint32_t label = ds.samples[indices[start + i]].label;
      if (label >= C) throw DataError("evaluate: label out of range");
      const float* row = probs.data.data() + i * C;
      log_loss_sum -= std::log(std::max(static_cast<double>(row[label]), 1e-12));
      if (argmax_row(row, C) == label) ++hits;
    }
  }
  EvalResult r;
  r.loss = log_loss_sum / static_cast<double>(indices.size());
  r.accuracy = static_cast<double>(hits) / static_cast<double>(indices.size());
  return r;
}

}  // namespace kmgr::train
