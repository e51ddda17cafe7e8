#pragma once

#include <cstdint>
#include <vector>

#include "kmgr/nn/tensor.hpp"

namespace kmgr::nn {

/// Row-wise stable softmax over the last dimension.
template <typename T>
Tensor<T> softmax(const Tensor<T>& logits);

/// Mean categorical cross-entropy of already-softmaxed probabilities
/// against integer labels. Probabilities are floored at 1e-12 before the
/// log so a confidently wrong prediction yields a large finite loss.
template <typename T>
double cross_entropy(const Tensor<T>& probs, const std::vector<std::uint32_t>& labels);

/// Gradient of mean cross-entropy w.r.t. the logits feeding the softmax:
/// (p - onehot) / batch. Pairing this with the identity backward of the
/// trailing softmax layer implements the usual fused softmax+CE rule.
template <typename T>
Tensor<T> softmax_ce_backward(const Tensor<T>& probs, const std::vector<std::uint32_t>& labels);

}  // namespace kmgr::nn
