#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "kmgr/data/dataset.hpp"

namespace kmgr::data {

/// train/valid/test fractions; must be positive and sum to 1 within 1e-9.
struct SplitRatios {
  double train = 0.7;
  double valid = 0.1;
  double test = 0.2;

  void validate() const;
};

/// Parses "a:b:c" and normalizes by the sum (so "7:1:2" works as written).
SplitRatios parse_ratios(const std::string& text);

struct SplitAssignment {
  std::vector<std::uint32_t> train;
  std::vector<std::uint32_t> valid;
  std::vector<std::uint32_t> test;

  std::size_t total() const { return train.size() + valid.size() + test.size(); }
};

/// Part sizes by largest-remainder rounding: floor each quota n*ratio,
/// then hand out the remaining slots by descending fractional part
/// (ties resolved in train, valid, test order).
std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios);

/// Fisher-Yates shuffles `indices` with the seeded generator, then cuts
/// it into contiguous train/valid/test parts sized by `apportion`.
SplitAssignment split_index_list(std::vector<std::uint32_t> indices, const SplitRatios& ratios,
                                 std::uint64_t seed);

/// Split over 0..n-1.
SplitAssignment random_split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);
SplitAssignment random_split(const FeatureDataset& ds, const SplitRatios& ratios,
                             std::uint64_t seed);

/// Stratified k-fold partition: per class, indices are shuffled and dealt
/// into k folds so per-class counts differ by at most one (lower-numbered
/// folds take the extras). Throws when a class has fewer than k samples.
std::vector<std::vector<std::uint32_t>> stratified_kfold(const FeatureDataset& ds, std::size_t k,
                                                         std::uint64_t seed);

/// Splits one fold's indices by random_split with the given ratios.
SplitAssignment select_fold_split(const std::vector<std::vector<std::uint32_t>>& folds,
                                  std::size_t fold_index, const SplitRatios& ratios,
                                  std::uint64_t seed);

/// Checks disjointness and index range; throws DataError on violation.
void validate_split(const SplitAssignment& split, std::size_t dataset_size);

// Split-file JSON: {"version":1, "seed":..., "train":[...], "valid":[...], "test":[...]}
void save_split(const SplitAssignment& split, std::uint64_t seed, const std::string& path);
SplitAssignment load_split(const std::string& path);

}  // namespace kmgr::data
