#include "kmgr/data/split.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::data {

void SplitRatios::validate() const {
  if (train <= 0.0 || valid <= 0.0 || test <= 0.0)
    throw DataError("SplitRatios: all parts must be positive");
  if (std::abs(train + valid + test - 1.0) > 1e-9)
    throw DataError("SplitRatios: parts must sum to 1");
}

SplitRatios parse_ratios(const std::string& text) {
  std::istringstream is(text);
  double a, b, c;
  char s1, s2;
  if (!(is >> a >> s1 >> b >> s2 >> c) || s1 != ':' || s2 != ':' || !(is >> std::ws).eof())
    throw DataError("ratios: expected 'a:b:c', got '" + text + "'");
  const double sum = a + b + c;
  if (sum <= 0.0 || a <= 0.0 || b <= 0.0 || c <= 0.0)
    throw DataError("ratios: parts must be positive, got '" + text + "'");
  return SplitRatios{a / sum, b / sum, c / sum};
}

std::array<std::size_t, 3> apportion(std::size_t n, const SplitRatios& ratios) {
  ratios.validate();
  const std::array<double, 3> r{ratios.train, ratios.valid, ratios.test};
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> frac{};
  std::size_t assigned = 0;
  for (int i = 0; i < 3; ++i) {
    const double quota = static_cast<double>(n) * r[i];
    sizes[i] = static_cast<std::size_t>(std::floor(quota));
    frac[i] = quota - std::floor(quota);
    assigned += sizes[i];
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return frac[a] > frac[b]; });
  for (std::size_t left = n - assigned, i = 0; left > 0; --left, ++i) sizes[order[i % 3]] += 1;
  return sizes;
}

SplitAssignment split_index_list(std::vector<std::uint32_t> indices, const SplitRatios& ratios,
                                 std::uint64_t seed) {
  if (indices.empty()) throw DataError("split: empty dataset");
  Rng rng(seed);
  rng.shuffle(indices);
  const auto sizes = apportion(indices.size(), ratios);
  SplitAssignment out;
  auto it = indices.begin();
  out.train.assign(it, it + static_cast<std::ptrdiff_t>(sizes[0]));
  it += static_cast<std::ptrdiff_t>(sizes[0]);
  out.valid.assign(it, it + static_cast<std::ptrdiff_t>(sizes[1]));
  it += static_cast<std::ptrdiff_t>(sizes[1]);
  out.test.assign(it, it + static_cast<std::ptrdiff_t>(sizes[2]));
  return out;
}

SplitAssignment random_split(std::size_t n, const SplitRatios& ratios, std::uint64_t seed) {
  std::vector<std::uint32_t> indices(n);
  std::iota(indices.begin(), indices.end(), 0u);
  return split_index_list(std::move(indices), ratios, seed);
}

SplitAssignment random_split(const FeatureDataset& ds, const SplitRatios& ratios,
                             std::uint64_t seed) {
  return random_split(ds.size(), ratios, seed);
}

std::vector<std::vector<std::uint32_t>> stratified_kfold(const FeatureDataset& ds, std::size_t k,
                                                         std::uint64_t seed) {
  if (k == 0) throw DataError("stratified_kfold: k must be positive");
  if (ds.samples.empty()) throw DataError("stratified_kfold: empty dataset");

  std::vector<std::vector<std::uint32_t>> by_class(ds.num_classes);
  for (std::size_t i = 0; i < ds.samples.size(); ++i)
    by_class[ds.samples[i].label].push_back(static_cast<std::uint32_t>(i));

  for (std::size_t c = 0; c < by_class.size(); ++c)
    if (by_class[c].size() < k)
      throw DataError("stratified_kfold: class " + std::to_string(c) + " has " +
                      std::to_string(by_class[c].size()) + " samples, need >= " +
                      std::to_string(k));

  Rng rng(seed);
  std::vector<std::vector<std::uint32_t>> folds(k);
  for (auto& members : by_class) {
    rng.shuffle(members);
    const std::size_t base = members.size() / k;
    const std::size_t extra = members.size() % k;
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t take = base + (f < extra ? 1 : 0);
      folds[f].insert(folds[f].end(), members.begin() + static_cast<std::ptrdiff_t>(pos),
                      members.begin() + static_cast<std::ptrdiff_t>(pos + take));
      pos += take;
    }
  }
  return folds;
}

SplitAssignment select_fold_split(const std::vector<std::vector<std::uint32_t>>& folds,
                                  std::size_t fold_index, const SplitRatios& ratios,
                                  std::uint64_t seed) {
  if (fold_index >= folds.size())
    throw DataError("select_fold_split: fold index " + std::to_string(fold_index) +
                    " out of range (k = " + std::to_string(folds.size()) + ")");
  return split_index_list(folds[fold_index], ratios, seed);
}

void validate_split(const SplitAssignment& split, std::size_t dataset_size) {
  std::vector<bool> seen(dataset_size, false);
  auto check = [&](const std::vector<std::uint32_t>& part, const char* name) {
    for (std::uint32_t i : part) {
      if (i >= dataset_size)
        throw DataError(std::string("split: ") + name + " index " + std::to_string(i) +
                        " out of range");
      if (seen[i])
        throw DataError(std::string("split: index ") + std::to_string(i) +
                        " appears in two parts");
      seen[i] = true;
    }
  };
  check(split.train, "train");
  check(split.valid, "valid");
  check(split.test, "test");
}

void save_split(const SplitAssignment& split, std::uint64_t seed, const std::string& path) {
  nlohmann::json j;
  j["version"] = 1;
  j["seed"] = seed;
  j["train"] = split.train;
  j["valid"] = split.valid;
  j["test"] = split.test;
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw DataError(path + ": cannot open for writing");
  os << j.dump() << "\n";
  if (!os) throw DataError(path + ": write failure");
}

SplitAssignment load_split(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError(path + ": cannot open split file");
  nlohmann::json j;
  try {
    is >> j;
    if (j.at("version").get<int>() != 1) throw DataError(path + ": unsupported split version");
    SplitAssignment s;
    s.train = j.at("train").get<std::vector<std::uint32_t>>();
    s.valid = j.at("valid").get<std::vector<std::uint32_t>>();
    s.test = j.at("test").get<std::vector<std::uint32_t>>();
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(path + ": split schema mismatch: " + e.what());
  }
}

}  // namespace kmgr::data
