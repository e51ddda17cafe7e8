#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmgr/nn/model.hpp"

namespace kmgr::nn {

struct GradCheckEntry {
  std::string name;  // parameter name, or "input"
  double max_rel_err = 0.0;
  std::size_t coords_checked = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> entries;
  double max_rel_err = 0.0;
  bool passed(double tolerance) const { return max_rel_err <= tolerance; }
};

/// Compare a layer's analytic gradients against central finite differences
/// (step 1e-5) at 64-bit precision. The scalar objective is a fixed random
/// projection of the layer output. Tensors with more than max_coords
/// coordinates are spot-checked on a random sample. Relative error is
/// |a - n| / max(|a|, |n|, 1e-8). ReLU input coordinates equal to exactly 0
/// are skipped: the subgradient there is ambiguous.
GradCheckReport grad_check(Layer<double>& layer, Tensor<double> input, std::uint64_t seed,
                           std::size_t max_coords = 10000);

/// Same check through a whole model with the fused softmax + cross-entropy
/// objective. Dropout masks are frozen per evaluation by reseeding.
GradCheckReport grad_check_model(Model<double>& model, Tensor<double> input,
                                 const std::vector<std::uint32_t>& labels, std::uint64_t seed,
                                 std::size_t max_coords = 10000);

}  // namespace kmgr::nn
