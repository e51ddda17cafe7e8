// Microbenchmarks for the pipeline's hot paths: the FFT that dominates
// feature extraction, the full MFCC chain, the convolution that dominates
// CNN training, and one optimizer step of each model.
#include <benchmark/benchmark.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "kmgr/audio/clip.hpp"
#include "kmgr/dsp/fft.hpp"
#include "kmgr/dsp/mfcc.hpp"
#include "kmgr/models/builders.hpp"
#include "kmgr/nn/adam.hpp"
#include "kmgr/nn/layers.hpp"
#include "kmgr/nn/loss.hpp"
#include "kmgr/nn/model.hpp"
#include "kmgr/util/rng.hpp"

using namespace kmgr;

namespace {

audio::AudioClip test_tone(double seconds) {
  audio::AudioClip clip;
  clip.sample_rate = 22050;
  clip.samples.resize(static_cast<std::size_t>(seconds * 22050));
  for (std::size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = 0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * i / 22050.0) +
                      0.2 * std::sin(2.0 * std::numbers::pi * 1330.0 * i / 22050.0);
  return clip;
}

void BM_fft(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  std::vector<std::complex<double>> x(n);
  for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
  for (auto _ : state) {
    auto copy = x;
    dsp::fft(copy);
    benchmark::DoNotOptimize(copy.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * n);
}
BENCHMARK(BM_fft)->Arg(256)->Arg(2048)->Arg(4096);

void BM_mfcc_one_second(benchmark::State& state) {
  const audio::AudioClip clip = test_tone(1.0);
  const dsp::DspConfig cfg;
  for (auto _ : state) {
    const dsp::MfccMatrix m = dsp::mfcc(clip, cfg);
    benchmark::DoNotOptimize(m.values.data());
  }
}
BENCHMARK(BM_mfcc_one_second);

nn::Tensor<float> random_batch(const std::vector<std::size_t>& shape, std::uint64_t seed) {
  nn::Tensor<float> x(shape);
  Rng rng(seed);
  for (auto& v : x.data) v = static_cast<float>(rng.uniform(-1.0, 1.0));
  return x;
}

void BM_conv_forward(benchmark::State& state) {
  nn::Conv2D<float> conv(3, 3, 32, 32);
  Rng rng(2);
  conv.init(rng);
  const nn::Tensor<float> x = random_batch({32, 22, 7, 32}, 3);
  for (auto _ : state) {
    auto y = conv.forward(x, nn::Mode::Train);
    benchmark::DoNotOptimize(y.data.data());
  }
}
BENCHMARK(BM_conv_forward);

void BM_conv_backward(benchmark::State& state) {
  nn::Conv2D<float> conv(3, 3, 32, 32);
  Rng rng(4);
  conv.init(rng);
  const nn::Tensor<float> x = random_batch({32, 22, 7, 32}, 5);
  const nn::Tensor<float> y = conv.forward(x, nn::Mode::Train);
  const nn::Tensor<float> gy = random_batch(y.shape, 6);
  for (auto _ : state) {
    for (auto* p : conv.params()) p->zero_grad();
    auto gx = conv.backward(gy);
    benchmark::DoNotOptimize(gx.data.data());
  }
}
BENCHMARK(BM_conv_backward);

void BM_train_step(benchmark::State& state, models::ModelKind kind) {
  models::ModelSpec spec;
  spec.kind = kind;
  spec.input_shape = kind == models::ModelKind::Cnn ? std::vector<std::size_t>{44, 13, 1}
                                                    : std::vector<std::size_t>{44, 13};
  spec.num_classes = 8;
  nn::Model<float> model = models::build_model<float>(spec);
  Rng rng(7);
  model.init(rng);
  model.reseed_dropout(8);

  std::vector<std::size_t> batch_shape = {32};
  batch_shape.insert(batch_shape.end(), spec.input_shape.begin(), spec.input_shape.end());
  const nn::Tensor<float> x = random_batch(batch_shape, 9);
  std::vector<std::uint32_t> labels(32);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<std::uint32_t>(i % 8);

  nn::Adam<float> optimizer;
  for (auto _ : state) {
    model.zero_grad();
    const nn::Tensor<float> probs = model.forward(x, nn::Mode::Train);
    double loss = nn::cross_entropy(probs, labels);
    model.backward_from_logits(nn::softmax_ce_backward(probs, labels));
    optimizer.step(model.trainable());
    benchmark::DoNotOptimize(loss);
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * 32);
}
BENCHMARK_CAPTURE(BM_train_step, dnn, models::ModelKind::Dnn);
BENCHMARK_CAPTURE(BM_train_step, cnn, models::ModelKind::Cnn);

}  // namespace

BENCHMARK_MAIN();
