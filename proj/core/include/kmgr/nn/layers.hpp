#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "kmgr/nn/tensor.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::nn {

enum class Mode { Train, Infer };

/// A named trainable tensor (or persistent buffer) with its gradient.
template <typename T>
struct Param {
  std::string name;  // local name; the model prefixes the layer instance
  Tensor<T> value;
  Tensor<T> grad;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> shape)
      : name(std::move(n)), value(shape), grad(std::move(shape)) {}

  void zero_grad() { std::fill(grad.data.begin(), grad.data.end(), T{0}); }
};

/// Base class for differentiable layers. forward() caches whatever
/// backward() needs, so a layer instance is not reentrant.
template <typename T>
class Layer {
 public:
  virtual ~Layer() = default;
  /// Short stable identifier ("dense", "conv", ...) used for parameter
  /// naming and topology descriptions.
  virtual std::string kind() const = 0;
  virtual Tensor<T> forward(const Tensor<T>& x, Mode mode) = 0;
  /// Gradient w.r.t. input given gradient w.r.t. output; accumulates into
  /// parameter grads (callers zero them first).
  virtual Tensor<T> backward(const Tensor<T>& gy) = 0;
  /// Initialize trainable parameters.
  virtual void init(Rng& /*rng*/) {}
  /// Trainable parameters (empty for stateless layers).
  virtual std::vector<Param<T>*> params() { return {}; }
  /// Persistent non-trainable buffers (batch-norm running stats).
  virtual std::vector<Param<T>*> state() { return {}; }
  /// Reset the layer's private random stream (dropout masks).
  virtual void reseed(std::uint64_t /*seed*/) {}
};

template <typename T>
using LayerPtr = std::unique_ptr<Layer<T>>;

/// Fully connected: y = x W + b, x of shape (B, in).
template <typename T>
class Dense : public Layer<T> {
 public:
  Dense(std::size_t in_features, std::size_t out_features);
  std::string kind() const override { return "dense"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override { return {&W_, &b_}; }

  std::size_t in_features() const { return in_; }
  std::size_t out_features() const { return out_; }

 private:
  std::size_t in_, out_;
  Param<T> W_, b_;
  Tensor<T> x_;  // cached input
};

/// Elementwise max(0, x).
template <typename T>
class ReLU : public Layer<T> {
 public:
  std::string kind() const override { return "relu"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;

 private:
  Tensor<T> x_;
};

/// Row-wise softmax over the last dimension.
template <typename T>
class Softmax : public Layer<T> {
 public:
  std::string kind() const override { return "softmax"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;

 private:
  Tensor<T> y_;
};

/// Inverted dropout: scales kept activations by 1/(1-rate) during
/// training, identity at inference. Mask randomness comes from a private
/// stream that the trainer reseeds deterministically every step.
template <typename T>
class Dropout : public Layer<T> {
 public:
  explicit Dropout(double rate);
  std::string kind() const override { return "dropout"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;
  void reseed(std::uint64_t seed) override { rng_ = Rng(seed); }

  double rate() const { return rate_; }

 private:
  double rate_;
  Rng rng_;
  Tensor<T> mask_;
  bool train_pass_ = false;
};

/// Collapses every non-batch dimension: (B, ...) -> (B, prod).
template <typename T>
class Flatten : public Layer<T> {
 public:
  std::string kind() const override { return "flatten"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;

 private:
  std::vector<std::size_t> in_shape_;
};

/// 2-D convolution, stride 1, SAME padding, channel-last layout
/// (B, H, W, C). SAME keeps H and W: total padding k-1 per axis with
/// floor((k-1)/2) before. Implemented as im2col + GEMM.
template <typename T>
class Conv2D : public Layer<T> {
 public:
  Conv2D(std::size_t kernel_h, std::size_t kernel_w, std::size_t in_channels,
         std::size_t out_channels);
  std::string kind() const override { return "conv"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override { return {&W_, &b_}; }

  std::size_t out_channels() const { return cout_; }

 private:
  std::size_t kh_, kw_, cin_, cout_;
  Param<T> W_;  // (kh, kw, cin, cout)
  Param<T> b_;  // (cout)
  std::vector<std::size_t> x_shape_;
  std::vector<T> col_;  // cached im2col matrix, (B*H*W) x (kh*kw*cin)
};

/// Max pooling with SAME padding: out = ceil(in / stride); padded cells
/// never win. Ties go to the first element in window scan order.
template <typename T>
class MaxPool2D : public Layer<T> {
 public:
  MaxPool2D(std::size_t pool_h, std::size_t pool_w, std::size_t stride);
  std::string kind() const override { return "pool"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;

  /// SAME output extent for one axis.
  static std::size_t out_extent(std::size_t in, std::size_t stride);

 private:
  std::size_t ph_, pw_, stride_;
  std::vector<std::size_t> x_shape_;
  std::vector<std::size_t> argmax_;  // flat input index per output element
};

/// Batch normalization over every axis except the trailing channel axis.
/// Biased batch variance; running stats updated as
/// running = momentum * running + (1 - momentum) * batch.
template <typename T>
class BatchNorm : public Layer<T> {
 public:
  explicit BatchNorm(std::size_t channels, double eps = 1e-3, double momentum = 0.99);
  std::string kind() const override { return "bn"; }
  Tensor<T> forward(const Tensor<T>& x, Mode mode) override;
  Tensor<T> backward(const Tensor<T>& gy) override;
  void init(Rng& rng) override;
  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  std::vector<Param<T>*> state() override { return {&running_mean_, &running_var_}; }

 private:
  std::size_t channels_;
  double eps_, momentum_;
  Param<T> gamma_, beta_;
  Param<T> running_mean_, running_var_;
  Tensor<T> xhat_;
  std::vector<T> inv_std_;
  std::size_t rows_ = 0;
};

}  // namespace kmgr::nn
