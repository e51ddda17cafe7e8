#include "kmgr/train/trainer.hpp"

#include <chrono>
#include <cmath>

#include "kmgr/nn/loss.hpp"
#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::train {

namespace {

std::vector<std::uint32_t> batch_labels(const data::FeatureDataset& ds,
                                        const std::vector<std::uint32_t>& indices, std::size_t start,
                                        std::size_t count) {
  std::vector<std::uint32_t> labels(count);
  for (std::size_t i = 0; i < count; ++i) labels[i] = ds.samples[indices[start + i]].label;
  return labels;
}

}  // namespace

TrainReport train(nn::Model<float>& model, const data::FeatureDataset& ds,
                  const data::SplitAssignment& split, const TrainConfig& cfg,
                  nn::Adam<float>* optimizer_out) {
  if (cfg.batch_size == 0) throw DataError("train: batch size must be >= 1");
  if (split.train.empty()) throw DataError("train: empty train split part");
  if (split.valid.empty()) throw DataError("train: empty valid split part");
  if (split.test.empty()) throw DataError("train: empty test split part");
  data::validate_split(split, ds.size());

  Rng master(cfg.seed);
  Rng init_rng = master.derive(1);
  Rng shuffle_rng = master.derive(2);
  Rng dropout_rng = master.derive(3);

  model.init(init_rng);
  nn::Adam<float> optimizer({cfg.lr});

  TrainReport report;
  report.seed = cfg.seed;
  report.batch_size = cfg.batch_size;
  report.learning_rate = cfg.lr;
  report.epochs.reserve(cfg.epochs);

  std::vector<std::uint32_t> order = split.train;
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    const auto t0 = std::chrono::steady_clock::now();
    shuffle_rng.shuffle(order);
    for (std::size_t start = 0, batch = 0; start < order.size(); start += cfg.batch_size, ++batch) {
      const std::size_t count = std::min(cfg.batch_size, order.size() - start);
      nn::Tensor<float> x = gather_batch(ds, order, start, count, model.input_shape);
      const std::vector<std::uint32_t> labels = batch_labels(ds, order, start, count);

      model.reseed_dropout(dropout_rng.next());
      const nn::Tensor<float> probs = model.forward(x, nn::Mode::Train);
      const double loss = nn::cross_entropy(probs, labels);
      if (!std::isfinite(loss))
        throw NumericError("train: non-finite loss at epoch " + std::to_string(epoch) + " batch " +
                           std::to_string(batch));

      model.zero_grad();
      model.backward_from_logits(nn::softmax_ce_backward(probs, labels));
      optimizer.step(model.trainable());
    }

    EpochStats stats;
    const EvalResult tr = evaluate(model, ds, split.train, cfg.eval_batch);
    const EvalResult va = evaluate(model, ds, split.valid, cfg.eval_batch);
    stats.train_loss = tr.loss;
    stats.train_accuracy = tr.accuracy;
    stats.valid_loss = va.loss;
    stats.valid_accuracy = va.accuracy;
    stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cfg.on_epoch) cfg.on_epoch(epoch, stats);
    report.epochs.push_back(stats);
  }

  const EvalResult te = evaluate(model, ds, split.test, cfg.eval_batch);
  report.test_loss = te.loss;
  report.test_accuracy = te.accuracy;
  if (optimizer_out) *optimizer_out = std::move(optimizer);
  return report;
}

}  // namespace kmgr::train
