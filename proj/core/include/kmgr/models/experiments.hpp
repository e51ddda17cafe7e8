#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kmgr/data/split.hpp"
#include "kmgr/models/builders.hpp"

namespace kmgr::models {

enum class Randomization { RandomSplit, StratifiedKFold };

std::string to_string(Randomization r);

/// One row of the six-experiment matrix. Feature shape is the
/// model-agnostic (frames, n_mfcc); the CNN variant appends a channel axis.
struct ExperimentSpec {
  int number = 0;
  std::vector<std::size_t> feature_shape;  // (frames, 13)
  std::size_t total_samples = 0;
  Randomization randomization = Randomization::RandomSplit;
  std::size_t epochs = 0;
  data::SplitRatios ratios;
  double sample_length_seconds = 0.0;
  bool extra_dropout = false;
  std::size_t kfold = 0;       // 0 = split the whole dataset
  std::size_t fold_index = 0;  // "last distributed group": fold k-1
  std::uint64_t seed = 0;

  /// Input shape for a model kind: (frames, 13) or (frames, 13, 1).
  std::vector<std::size_t> input_shape(ModelKind kind) const;

  std::string to_json() const;
};

/// The experiment registry:
///   1: (2,13)  1,056,000  random split   30 epochs  7:1:2      25 ms
///   2: (2,13)    200,000  random split   30 epochs  5:2.5:2.5  25 ms
///   3: (2,13)  1,056,000  10-fold        30 epochs  7:1:2      25 ms
///   4: (2,13)  1,056,000  10-fold       100 epochs  7:1:2      25 ms
///   5: (44,13)    26,400  10-fold        30 epochs  8:1:1      1 s
///   6: same as 5 plus one extra dropout(0.3) in both models
ExperimentSpec experiment(int n);

}  // namespace kmgr::models
