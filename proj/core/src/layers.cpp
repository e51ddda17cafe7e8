#include "kmgr/nn/layers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>

namespace kmgr::nn {

namespace {

template <typename T>
using EMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using EMap = Eigen::Map<EMat<T>>;
template <typename T>
using ECMap = Eigen::Map<const EMat<T>>;

template <typename T>
void require_rank(const Tensor<T>& x, std::size_t rank, const char* layer) {
  if (x.rank() != rank)
    throw DataError(std::string(layer) + ": expected rank " + std::to_string(rank) +
                    " input, got " + shape_str(x.shape));
}

}  // namespace

// ---------------------------------------------------------------- Dense

template <typename T>
Dense<T>::Dense(std::size_t in_features, std::size_t out_features)
    : in_(in_features), out_(out_features), W_("W", {in_features, out_features}), b_("b", {out_features}) {}

template <typename T>
void Dense<T>::init(Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_ + out_));
  for (auto& w : W_.value.data) w = static_cast<T>(rng.uniform(-limit, limit));
  std::fill(b_.value.data.begin(), b_.value.data.end(), T{0});
}

template <typename T>
Tensor<T> Dense<T>::forward(const Tensor<T>& x, Mode) {
  require_rank(x, 2, "dense");
  if (x.shape[1] != in_)
    throw DataError("dense: expected " + std::to_string(in_) + " input features, got " +
                    std::to_string(x.shape[1]));
  x_ = x;
  const std::size_t B = x.shape[0];
  Tensor<T> y({B, out_});
  ECMap<T> X(x.data.data(), B, in_);
  ECMap<T> W(W_.value.data.data(), in_, out_);
  EMap<T> Y(y.data.data(), B, out_);
  Y.noalias() = X * W;
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(b_.value.data.data(), out_);
  Y.rowwise() += bias;
  return y;
}

template <typename T>
Tensor<T> Dense<T>::backward(const Tensor<T>& gy) {
  const std::size_t B = x_.shape[0];
  Tensor<T> gx({B, in_});
  ECMap<T> X(x_.data.data(), B, in_);
  ECMap<T> W(W_.value.data.data(), in_, out_);
  ECMap<T> GY(gy.data.data(), B, out_);
  EMap<T> GX(gx.data.data(), B, in_);
  EMap<T> GW(W_.grad.data.data(), in_, out_);
  GX.noalias() = GY * W.transpose();
  GW.noalias() += X.transpose() * GY;
  // Fixed-order accumulation: a vectorized column reduction reassociates the
  // sum depending on the buffer's runtime alignment, which breaks bit-level
  // training determinism across otherwise identical runs.
  T* gb = b_.grad.data.data();
  for (std::size_t i = 0; i < B; ++i)
    for (std::size_t j = 0; j < out_; ++j) gb[j] += gy.data[i * out_ + j];
  return gx;
}

// ----------------------------------------------------------------- ReLU

template <typename T>
Tensor<T> ReLU<T>::forward(const Tensor<T>& x, Mode) {
  x_ = x;
  Tensor<T> y = x;
  for (auto& v : y.data) v = v > T{0} ? v : T{0};
  return y;
}

template <typename T>
Tensor<T> ReLU<T>::backward(const Tensor<T>& gy) {
  Tensor<T> gx = gy;
  for (std::size_t i = 0; i < gx.numel(); ++i)
    if (x_.data[i] <= T{0}) gx.data[i] = T{0};
  return gx;
}

// -------------------------------------------------------------- Softmax

template <typename T>
Tensor<T> Softmax<T>::forward(const Tensor<T>& x, Mode) {
  const std::size_t cols = x.shape.back();
  const std::size_t rows = x.numel() / cols;
  Tensor<T> y = x;
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
  y_ = y;
  return y;
}

template <typename T>
Tensor<T> Softmax<T>::backward(const Tensor<T>& gy) {
  const std::size_t cols = y_.shape.back();
  const std::size_t rows = y_.numel() / cols;
  Tensor<T> gx(y_.shape);
  for (std::size_t r = 0; r < rows; ++r) {
    const T* y = y_.data.data() + r * cols;
    const T* g = gy.data.data() + r * cols;
    T dot{0};
    for (std::size_t c = 0; c < cols; ++c) dot += y[c] * g[c];
    T* out = gx.data.data() + r * cols;
    for (std::size_t c = 0; c < cols; ++c) out[c] = y[c] * (g[c] - dot);
  }
  return gx;
}

// -------------------------------------------------------------- Dropout

template <typename T>
Dropout<T>::Dropout(double rate) : rate_(rate), rng_(0) {
  if (rate < 0.0 || rate >= 1.0) throw DataError("dropout: rate must lie in [0, 1)");
}

template <typename T>
Tensor<T> Dropout<T>::forward(const Tensor<T>& x, Mode mode) {
  if (mode == Mode::Infer) {
    train_pass_ = false;
    return x;
  }
  train_pass_ = true;
  const T scale = static_cast<T>(1.0 / (1.0 - rate_));
  mask_ = Tensor<T>(x.shape);
  Tensor<T> y = x;
  for (std::size_t i = 0; i < y.numel(); ++i) {
    const T m = rng_.uniform() >= rate_ ? scale : T{0};
    mask_.data[i] = m;
    y.data[i] *= m;
  }
  return y;
}

template <typename T>
Tensor<T> Dropout<T>::backward(const Tensor<T>& gy) {
  if (!train_pass_) return gy;
  Tensor<T> gx = gy;
  for (std::size_t i = 0; i < gx.numel(); ++i) gx.data[i] *= mask_.data[i];
  return gx;
}

// -------------------------------------------------------------- Flatten

template <typename T>
Tensor<T> Flatten<T>::forward(const Tensor<T>& x, Mode) {
  if (x.rank() < 2) throw DataError("flatten: expected rank >= 2 input, got " + shape_str(x.shape));
  in_shape_ = x.shape;
  return x.reshaped({x.shape[0], x.numel() / x.shape[0]});
}

template <typename T>
Tensor<T> Flatten<T>::backward(const Tensor<T>& gy) {
  return gy.reshaped(in_shape_);
}

// --------------------------------------------------------------- Conv2D

template <typename T>
Conv2D<T>::Conv2D(std::size_t kernel_h, std::size_t kernel_w, std::size_t in_channels,
                  std::size_t out_channels)
    : kh_(kernel_h),
      kw_(kernel_w),
      cin_(in_channels),
      cout_(out_channels),
      W_("W", {kernel_h, kernel_w, in_channels, out_channels}),
      b_("b", {out_channels}) {}

template <typename T>
void Conv2D<T>::init(Rng& rng) {
  const double fan_in = static_cast<double>(kh_ * kw_ * cin_);
  const double fan_out = static_cast<double>(kh_ * kw_ * cout_);
  const double limit = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& w : W_.value.data) w = static_cast<T>(rng.uniform(-limit, limit));
  std::fill(b_.value.data.begin(), b_.value.data.end(), T{0});
}

template <typename T>
Tensor<T> Conv2D<T>::forward(const Tensor<T>& x, Mode) {
  require_rank(x, 4, "conv");
  if (x.shape[3] != cin_)
    throw DataError("conv: expected " + std::to_string(cin_) + " input channels, got " +
                    std::to_string(x.shape[3]));
  x_shape_ = x.shape;
  const std::size_t B = x.shape[0], H = x.shape[1], W = x.shape[2];
  const std::size_t pad_top = (kh_ - 1) / 2, pad_left = (kw_ - 1) / 2;
  const std::size_t K = kh_ * kw_ * cin_;
  const std::size_t R = B * H * W;

  col_.assign(R * K, T{0});
  for (std::size_t b = 0; b < B; ++b) {
    const T* img = x.data.data() + b * H * W * cin_;
    for (std::size_t oh = 0; oh < H; ++oh) {
      for (std::size_t ow = 0; ow < W; ++ow) {
        T* row = col_.data() + ((b * H + oh) * W + ow) * K;
        for (std::size_t ki = 0; ki < kh_; ++ki) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh + ki) - static_cast<std::ptrdiff_t>(pad_top);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
          for (std::size_t kj = 0; kj < kw_; ++kj) {
            const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow + kj) - static_cast<std::ptrdiff_t>(pad_left);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) continue;
            std::memcpy(row + (ki * kw_ + kj) * cin_,
                        img + (static_cast<std::size_t>(ih) * W + static_cast<std::size_t>(iw)) * cin_,
                        cin_ * sizeof(T));
          }
        }
      }
    }
  }

  Tensor<T> y({B, H, W, cout_});
  ECMap<T> C(col_.data(), R, K);
  ECMap<T> Wm(W_.value.data.data(), K, cout_);
  EMap<T> Y(y.data.data(), R, cout_);
  Y.noalias() = C * Wm;
  Eigen::Map<const Eigen::Matrix<T, 1, Eigen::Dynamic>> bias(b_.value.data.data(), cout_);
  Y.rowwise() += bias;
  return y;
}

template <typename T>
Tensor<T> Conv2D<T>::backward(const Tensor<T>& gy) {
  const std::size_t B = x_shape_[0], H = x_shape_[1], W = x_shape_[2];
  const std::size_t pad_top = (kh_ - 1) / 2, pad_left = (kw_ - 1) / 2;
  const std::size_t K = kh_ * kw_ * cin_;
  const std::size_t R = B * H * W;

  ECMap<T> GY(gy.data.data(), R, cout_);
  ECMap<T> C(col_.data(), R, K);
  ECMap<T> Wm(W_.value.data.data(), K, cout_);
  EMap<T> GW(W_.grad.data.data(), K, cout_);
  GW.noalias() += C.transpose() * GY;
  // Fixed-order accumulation; see the matching note in Dense::backward.
  T* gb = b_.grad.data.data();
  for (std::size_t r = 0; r < R; ++r)
    for (std::size_t j = 0; j < cout_; ++j) gb[j] += gy.data[r * cout_ + j];

  std::vector<T> gcol(R * K);
  EMap<T> GC(gcol.data(), R, K);
  GC.noalias() = GY * Wm.transpose();

  Tensor<T> gx({B, H, W, cin_});
  for (std::size_t b = 0; b < B; ++b) {
    T* img = gx.data.data() + b * H * W * cin_;
    for (std::size_t oh = 0; oh < H; ++oh) {
      for (std::size_t ow = 0; ow < W; ++ow) {
        const T* row = gcol.data() + ((b * H + oh) * W + ow) * K;
        for (std::size_t ki = 0; ki < kh_; ++ki) {
          const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh + ki) - static_cast<std::ptrdiff_t>(pad_top);
          if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
          for (std::size_t kj = 0; kj < kw_; ++kj) {
            const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow + kj) - static_cast<std::ptrdiff_t>(pad_left);
            if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) continue;
            T* dst = img + (static_cast<std::size_t>(ih) * W + static_cast<std::size_t>(iw)) * cin_;
            const T* src = row + (ki * kw_ + kj) * cin_;
            for (std::size_t c = 0; c < cin_; ++c) dst[c] += src[c];
          }
        }
      }
    }
  }
  return gx;
}

// ------------------------------------------------------------ MaxPool2D

template <typename T>
MaxPool2D<T>::MaxPool2D(std::size_t pool_h, std::size_t pool_w, std::size_t stride)
    : ph_(pool_h), pw_(pool_w), stride_(stride) {
  if (stride == 0 || pool_h == 0 || pool_w == 0) throw DataError("pool: zero pool size or stride");
}

template <typename T>
std::size_t MaxPool2D<T>::out_extent(std::size_t in, std::size_t stride) {
  return (in + stride - 1) / stride;
}

template <typename T>
Tensor<T> MaxPool2D<T>::forward(const Tensor<T>& x, Mode) {
  require_rank(x, 4, "pool");
  x_shape_ = x.shape;
  const std::size_t B = x.shape[0], H = x.shape[1], W = x.shape[2], C = x.shape[3];
  const std::size_t OH = out_extent(H, stride_), OW = out_extent(W, stride_);
  const std::size_t pad_h = std::max<std::ptrdiff_t>(
      0, static_cast<std::ptrdiff_t>((OH - 1) * stride_ + ph_) - static_cast<std::ptrdiff_t>(H));
  const std::size_t pad_w = std::max<std::ptrdiff_t>(
      0, static_cast<std::ptrdiff_t>((OW - 1) * stride_ + pw_) - static_cast<std::ptrdiff_t>(W));
  const std::size_t pad_top = pad_h / 2, pad_left = pad_w / 2;

  Tensor<T> y({B, OH, OW, C});
  argmax_.assign(y.numel(), std::numeric_limits<std::size_t>::max());
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t oh = 0; oh < OH; ++oh) {
      for (std::size_t ow = 0; ow < OW; ++ow) {
        for (std::size_t c = 0; c < C; ++c) {
          T best{};
          std::size_t best_idx = std::numeric_limits<std::size_t>::max();
          for (std::size_t ki = 0; ki < ph_; ++ki) {
            const std::ptrdiff_t ih =
                static_cast<std::ptrdiff_t>(oh * stride_ + ki) - static_cast<std::ptrdiff_t>(pad_top);
            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(H)) continue;
            for (std::size_t kj = 0; kj < pw_; ++kj) {
              const std::ptrdiff_t iw =
                  static_cast<std::ptrdiff_t>(ow * stride_ + kj) - static_cast<std::ptrdiff_t>(pad_left);
              if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(W)) continue;
              const std::size_t idx =
                  ((b * H + static_cast<std::size_t>(ih)) * W + static_cast<std::size_t>(iw)) * C + c;
              if (best_idx == std::numeric_limits<std::size_t>::max() || x.data[idx] > best) {
                best = x.data[idx];
                best_idx = idx;
              }
            }
          }
          const std::size_t out_idx = ((b * OH + oh) * OW + ow) * C + c;
          y.data[out_idx] = best;
          argmax_[out_idx] = best_idx;
        }
      }
    }
  }
  return y;
}

template <typename T>
Tensor<T> MaxPool2D<T>::backward(const Tensor<T>& gy) {
  Tensor<T> gx(x_shape_);
  for (std::size_t i = 0; i < gy.numel(); ++i) {
    const std::size_t src = argmax_[i];
    if (src != std::numeric_limits<std::size_t>::max()) gx.data[src] += gy.data[i];
  }
  return gx;
}

// ------------------------------------------------------------ BatchNorm

template <typename T>
BatchNorm<T>::BatchNorm(std::size_t channels, double eps, double momentum)
    : channels_(channels),
      eps_(eps),
      momentum_(momentum),
      gamma_("gamma", {channels}),
      beta_("beta", {channels}),
      running_mean_("running_mean", {channels}),
      running_var_("running_var", {channels}) {
  std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), T{1});
  std::fill(running_var_.value.data.begin(), running_var_.value.data.end(), T{1});
}

template <typename T>
void BatchNorm<T>::init(Rng&) {
  std::fill(gamma_.value.data.begin(), gamma_.value.data.end(), T{1});
  std::fill(beta_.value.data.begin(), beta_.value.data.end(), T{0});
  std::fill(running_mean_.value.data.begin(), running_mean_.value.data.end(), T{0});
  std::fill(running_var_.value.data.begin(), running_var_.value.data.end(), T{1});
}

template <typename T>
Tensor<T> BatchNorm<T>::forward(const Tensor<T>& x, Mode mode) {
  if (x.shape.back() != channels_)
    throw DataError("bn: expected " + std::to_string(channels_) + " channels, got " +
                    std::to_string(x.shape.back()));
  const std::size_t C = channels_;
  const std::size_t rows = x.numel() / C;
  Tensor<T> y(x.shape);

  if (mode == Mode::Infer) {
    std::vector<T> scale(C), shift(C);
    for (std::size_t c = 0; c < C; ++c) {
      const T is = T{1} / std::sqrt(running_var_.value.data[c] + static_cast<T>(eps_));
      scale[c] = gamma_.value.data[c] * is;
      shift[c] = beta_.value.data[c] - running_mean_.value.data[c] * scale[c];
    }
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < C; ++c)
        y.data[r * C + c] = x.data[r * C + c] * scale[c] + shift[c];
    return y;
  }

  if (rows < 2)
    throw DataError("bn: train mode needs at least 2 values per channel to estimate variance");

  std::vector<T> mu(C, T{0}), var(C, T{0});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) mu[c] += x.data[r * C + c];
  for (std::size_t c = 0; c < C; ++c) mu[c] /= static_cast<T>(rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const T d = x.data[r * C + c] - mu[c];
      var[c] += d * d;
    }
  for (std::size_t c = 0; c < C; ++c) var[c] /= static_cast<T>(rows);

  inv_std_.resize(C);
  for (std::size_t c = 0; c < C; ++c) inv_std_[c] = T{1} / std::sqrt(var[c] + static_cast<T>(eps_));

  xhat_ = Tensor<T>(x.shape);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const T xh = (x.data[r * C + c] - mu[c]) * inv_std_[c];
      xhat_.data[r * C + c] = xh;
      y.data[r * C + c] = gamma_.value.data[c] * xh + beta_.value.data[c];
    }
  rows_ = rows;

  const T m = static_cast<T>(momentum_);
  for (std::size_t c = 0; c < C; ++c) {
    running_mean_.value.data[c] = m * running_mean_.value.data[c] + (T{1} - m) * mu[c];
    running_var_.value.data[c] = m * running_var_.value.data[c] + (T{1} - m) * var[c];
  }
  return y;
}

template <typename T>
Tensor<T> BatchNorm<T>::backward(const Tensor<T>& gy) {
  const std::size_t C = channels_;
  const std::size_t rows = rows_;
  std::vector<T> sum_gy(C, T{0}), sum_gy_xhat(C, T{0});
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const T g = gy.data[r * C + c];
      sum_gy[c] += g;
      sum_gy_xhat[c] += g * xhat_.data[r * C + c];
    }
  for (std::size_t c = 0; c < C; ++c) {
    gamma_.grad.data[c] += sum_gy_xhat[c];
    beta_.grad.data[c] += sum_gy[c];
  }
  Tensor<T> gx(xhat_.shape);
  const T n = static_cast<T>(rows);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t i = r * C + c;
      gx.data[i] = gamma_.value.data[c] * inv_std_[c] / n *
                   (n * gy.data[i] - sum_gy[c] - xhat_.data[i] * sum_gy_xhat[c]);
    }
  return gx;
}

template class Dense<float>;
template class Dense<double>;
template class ReLU<float>;
template class ReLU<double>;
template class Softmax<float>;
template class Softmax<double>;
template class Dropout<float>;
template class Dropout<double>;
template class Flatten<float>;
template class Flatten<double>;
template class Conv2D<float>;
template class Conv2D<double>;
template class MaxPool2D<float>;
template class MaxPool2D<double>;
template class BatchNorm<float>;
template class BatchNorm<double>;

}  // namespace kmgr::nn
