#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kmgr/nn/layers.hpp"

namespace kmgr::nn {

/// A parameter with its model-wide name ("dense0.W", "bn1.gamma", ...).
/// Names are <kind><occurrence>.<local>: occurrence counts instances of the
/// same layer kind in layer order, so two models built from the same
/// topology agree on every name regardless of interleaved stateless layers.
template <typename T>
struct NamedParam {
  std::string name;
  Param<T>* param;
};

/// An ordered stack of layers with a single forward/backward chain.
template <typename T>
class Model {
 public:
  /// Free-form topology description (JSON text) written by the builder and
  /// stored verbatim in checkpoints.
  std::string meta;
  /// Per-sample input shape, e.g. {44, 13} or {44, 13, 1}.
  std::vector<std::size_t> input_shape;
  std::size_t num_classes = 0;

  Model() = default;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  void add(LayerPtr<T> layer) { layers_.push_back(std::move(layer)); }
  const std::vector<LayerPtr<T>>& layers() const { return layers_; }

  /// Initialize every layer's parameters from one generator. Layers draw in
  /// order, so the full parameter vector is a pure function of the seed.
  void init(Rng& rng) {
    for (auto& l : layers_) l->init(rng);
  }

  Tensor<T> forward(const Tensor<T>& x, Mode mode) {
    Tensor<T> h = x;
    for (auto& l : layers_) h = l->forward(h, mode);
    return h;
  }

  /// Full backward chain from d(loss)/d(output).
  void backward(const Tensor<T>& grad_out) {
    Tensor<T> g = grad_out;
    for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  }

  /// Backward for the fused softmax + cross-entropy rule: the caller passes
  /// (probs - onehot)/B, which already includes the trailing softmax layer's
  /// jacobian, so that layer is skipped.
  void backward_from_logits(const Tensor<T>& grad_logits) {
    if (layers_.empty() || layers_.back()->kind() != "softmax")
      throw DataError("backward_from_logits: model must end in a softmax layer");
    Tensor<T> g = grad_logits;
    for (auto it = layers_.rbegin() + 1; it != layers_.rend(); ++it) g = (*it)->backward(g);
  }

  void zero_grad() {
    for (auto* p : trainable()) p->zero_grad();
  }

  std::vector<Param<T>*> trainable() {
    std::vector<Param<T>*> out;
    for (auto& l : layers_)
      for (auto* p : l->params()) out.push_back(p);
    return out;
  }

  std::vector<NamedParam<T>> named_params() { return collect(false); }
  /// Trainable parameters followed by persistent state buffers.
  std::vector<NamedParam<T>> named_all() { return collect(true); }

  std::size_t param_count() {
    std::size_t n = 0;
    for (auto* p : trainable()) n += p->value.numel();
    return n;
  }

  /// Give each dropout layer a fresh private stream derived from (seed,
  /// layer position); called by the trainer before every training batch.
  void reseed_dropout(std::uint64_t seed) {
    Rng base(seed);
    for (std::size_t i = 0; i < layers_.size(); ++i)
      layers_[i]->reseed(base.derive(i).next());
  }

 private:
  std::vector<NamedParam<T>> collect(bool include_state) {
    std::vector<NamedParam<T>> out;
    std::vector<std::pair<std::string, std::size_t>> kind_counts;
    for (auto& l : layers_) {
      std::size_t occurrence = 0;
      bool found = false;
      for (auto& [kind, count] : kind_counts)
        if (kind == l->kind()) {
          occurrence = count++;
          found = true;
          break;
        }
      if (!found) {
        kind_counts.emplace_back(l->kind(), 1);
        occurrence = 0;
      }
      const std::string prefix = l->kind() + std::to_string(occurrence) + ".";
      for (auto* p : l->params()) out.push_back({prefix + p->name, p});
      if (include_state)
        for (auto* p : l->state()) out.push_back({prefix + p->name, p});
    }
    return out;
  }

  std::vector<LayerPtr<T>> layers_;
};

}  // namespace kmgr::nn
