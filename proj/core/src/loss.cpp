#include "kmgr/nn/loss.hpp"

#include <algorithm>
#include <cmath>

namespace kmgr::nn {

template <typename T>
Tensor<T> softmax(const Tensor<T>& logits) {
  const std::size_t cols = logits.shape.back();
  const std::size_t rows = logits.numel() / cols;
  Tensor<T> y = logits;
  for (std::size_t r = 0; r < rows; ++r) {
    T* row = y.data.data() + r * cols;
    T mx = row[0];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
    T sum{0};
    for (std::size_t c = 0; c < cols; ++c) {
      row[c] = std::exp(row[c] - mx);
      sum += row[c];
    }
    for (std::size_t c = 0; c < cols; ++c) row[c] /= sum;
  }
  return y;
}

template <typename T>
double cross_entropy(const Tensor<T>& probs, const std::vector<std::uint32_t>& labels) {
  if (probs.rank() != 2) throw DataError("cross_entropy: probabilities must be rank 2");
  const std::size_t B = probs.shape[0], C = probs.shape[1];
  if (labels.size() != B) throw DataError("cross_entropy: label count does not match batch");
  double total = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    if (labels[b] >= C) throw DataError("cross_entropy: label out of range");
    const double p = std::max(static_cast<double>(probs.data[b * C + labels[b]]), 1e-12);
    total -= std::log(p);
  }
  return total / static_cast<double>(B);
}

template <typename T>
Tensor<T> softmax_ce_backward(const Tensor<T>& probs, const std::vector<std::uint32_t>& labels) {
  const std::size_t B = probs.shape[0], C = probs.shape[1];
  Tensor<T> g = probs;
  const T inv_b = T{1} / static_cast<T>(B);
  for (std::size_t b = 0; b < B; ++b) {
    g.data[b * C + labels[b]] -= T{1};
    for (std::size_t c = 0; c < C; ++c) g.data[b * C + c] *= inv_b;
  }
  return g;
}

template Tensor<float> softmax<float>(const Tensor<float>&);
template Tensor<double> softmax<double>(const Tensor<double>&);
template double cross_entropy<float>(const Tensor<float>&, const std::vector<std::uint32_t>&);
template double cross_entropy<double>(const Tensor<double>&, const std::vector<std::uint32_t>&);
template Tensor<float> softmax_ce_backward<float>(const Tensor<float>&, const std::vector<std::uint32_t>&);
template Tensor<double> softmax_ce_backward<double>(const Tensor<double>&, const std::vector<std::uint32_t>&);

}  // namespace kmgr::nn
