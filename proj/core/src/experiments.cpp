#include "kmgr/models/experiments.hpp"

#include <nlohmann/json.hpp>

#include "kmgr/util/error.hpp"

namespace kmgr::models {

using nlohmann::json;

std::string to_string(Randomization r) {
  return r == Randomization::RandomSplit ? "random_split" : "stratified_kfold";
}

std::vector<std::size_t> ExperimentSpec::input_shape(ModelKind kind) const {
  std::vector<std::size_t> shape = feature_shape;
  if (kind == ModelKind::Cnn) shape.push_back(1);
  return shape;
}

std::string ExperimentSpec::to_json() const {
  json j{{"number", number},
         {"feature_shape", feature_shape},
         {"total_samples", total_samples},
         {"randomization", to_string(randomization)},
         {"epochs", epochs},
         {"ratios", {ratios.train, ratios.valid, ratios.test}},
         {"sample_length_seconds", sample_length_seconds},
         {"extra_dropout", extra_dropout},
         {"kfold", kfold},
         {"fold_index", fold_index},
         {"seed", seed}};
  return j.dump(2);
}

ExperimentSpec experiment(int n) {
  if (n < 1 || n > 6) throw DataError("experiment number must be 1..6, got " + std::to_string(n));
  ExperimentSpec spec;
  spec.number = n;
  spec.feature_shape = (n >= 5) ? std::vector<std::size_t>{44, 13} : std::vector<std::size_t>{2, 13};
  spec.sample_length_seconds = (n >= 5) ? 1.0 : 0.025;
  spec.total_samples = (n == 2) ? 200'000 : (n >= 5 ? 26'400 : 1'056'000);
  spec.randomization = (n <= 2) ? Randomization::RandomSplit : Randomization::StratifiedKFold;
  spec.epochs = (n == 4) ? 100 : 30;
  if (n == 2)
    spec.ratios = {0.5, 0.25, 0.25};
  else if (n >= 5)
    spec.ratios = {0.8, 0.1, 0.1};
  else
    spec.ratios = {0.7, 0.1, 0.2};
  spec.extra_dropout = (n == 6);
  if (spec.randomization == Randomization::StratifiedKFold) {
    spec.kfold = 10;
    spec.fold_index = 9;
  }
  return spec;
}

}  // namespace kmgr::models
