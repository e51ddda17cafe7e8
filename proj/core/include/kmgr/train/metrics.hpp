#pragma once

#include <cstdint>
#include <vector>

#include "kmgr/data/dataset.hpp"
#include "kmgr/nn/model.hpp"

namespace kmgr::train {

/// Fraction of predictions equal to labels. Throws on empty or
/// length-mismatched input.
double accuracy(const std::vector<std::uint32_t>& predictions,
                const std::vector<std::uint32_t>& labels);

/// Index of the row maximum; the lowest index wins ties.
std::uint32_t argmax_row(const float* row, std::size_t n);

struct EvalResult {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Copy samples indices[start, start+count) into one batch tensor of shape
/// {count} + input_shape. Sample values must match prod(input_shape).
nn::Tensor<float> gather_batch(const data::FeatureDataset& ds,
                               const std::vector<std::uint32_t>& indices, std::size_t start,
                               std::size_t count, const std::vector<std::size_t>& input_shape);

/// Inference-mode full pass over the given sample indices: mean
/// cross-entropy and Formula-1 accuracy. Never mutates model state.
EvalResult evaluate(nn::Model<float>& model, const data::FeatureDataset& ds,
                    const std::vector<std::uint32_t>& indices, std::size_t batch_size = 256);

}  // namespace kmgr::train
