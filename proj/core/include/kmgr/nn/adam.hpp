#pragma once

#include <cstdint>
#include <vector>

#include "kmgr/nn/layers.hpp"

namespace kmgr::nn {

struct AdamConfig {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-7;  // added outside the square root
};

/// Adam with bias correction. Per-parameter moment buffers are keyed by
/// position, so the parameter list must be identical on every call.
template <typename T>
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {}

  /// Apply one update from the accumulated gradients.
  void step(const std::vector<Param<T>*>& params);

  std::uint64_t steps_taken() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

  /// Moment buffers, exposed for checkpointing.
  const std::vector<std::vector<T>>& first_moments() const { return m_; }
  const std::vector<std::vector<T>>& second_moments() const { return v_; }
  void restore(std::uint64_t t, std::vector<std::vector<T>> m, std::vector<std::vector<T>> v) {
    t_ = t;
    m_ = std::move(m);
    v_ = std::move(v);
  }

 private:
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
  std::vector<std::vector<T>> m_, v_;
};

}  // namespace kmgr::nn
