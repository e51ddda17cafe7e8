#include "kmgr/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "kmgr/nn/loss.hpp"
#include "kmgr/util/rng.hpp"

namespace kmgr::nn {

namespace {

constexpr double kStep = 1e-5;

double rel_err(double a, double n) {
  return std::abs(a - n) / std::max({std::abs(a), std::abs(n), 1e-8});
}

/// Coordinates to probe: everything when small, a random sample otherwise.
std::vector<std::size_t> pick_coords(std::size_t n, std::size_t max_coords, Rng& rng) {
  std::vector<std::size_t> idx;
  if (n <= max_coords) {
    idx.resize(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  } else {
    idx.reserve(max_coords);
    for (std::size_t i = 0; i < max_coords; ++i) idx.push_back(static_cast<std::size_t>(rng.bounded(n)));
  }
  return idx;
}

/// Core loop shared by the layer and model checks. `loss` re-evaluates the
/// scalar objective from current parameter/input values; `targets` pairs
/// each value tensor with its analytic gradient.
struct Target {
  std::string name;
  Tensor<double>* value;
  const Tensor<double>* grad;
  bool skip_zero;  // exclude coordinates whose current value is exactly 0
};

GradCheckReport run_check(const std::vector<Target>& targets, const std::function<double()>& loss,
                          std::size_t max_coords, Rng& rng) {
  GradCheckReport report;
  for (const auto& t : targets) {
    GradCheckEntry entry;
    entry.name = t.name;
    for (std::size_t i : pick_coords(t.value->numel(), max_coords, rng)) {
      double& v = t.value->data[i];
      if (t.skip_zero && v == 0.0) continue;
      const double saved = v;
      v = saved + kStep;
      const double up = loss();
      v = saved - kStep;
      const double down = loss();
      v = saved;
      const double numeric = (up - down) / (2.0 * kStep);
      entry.max_rel_err = std::max(entry.max_rel_err, rel_err(t.grad->data[i], numeric));
      ++entry.coords_checked;
    }
    report.max_rel_err = std::max(report.max_rel_err, entry.max_rel_err);
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace

GradCheckReport grad_check(Layer<double>& layer, Tensor<double> input, std::uint64_t seed,
                           std::size_t max_coords) {
  Rng rng(seed);
  const std::uint64_t mask_seed = rng.next();

  // Shape discovery + random projection coefficients for the objective.
  layer.reseed(mask_seed);
  const Tensor<double> probe = layer.forward(input, Mode::Train);
  Tensor<double> coeff(probe.shape);
  for (auto& c : coeff.data) c = rng.uniform(-1.0, 1.0);

  auto loss = [&]() {
    layer.reseed(mask_seed);
    const Tensor<double> y = layer.forward(input, Mode::Train);
    double acc = 0.0;
    for (std::size_t i = 0; i < y.numel(); ++i) acc += coeff.data[i] * y.data[i];
    return acc;
  };

  for (auto* p : layer.params()) p->zero_grad();
  layer.reseed(mask_seed);
  layer.forward(input, Mode::Train);
  const Tensor<double> gx = layer.backward(coeff);

  std::vector<Target> targets;
  targets.push_back({"input", &input, &gx, layer.kind() == "relu"});
  for (auto* p : layer.params()) targets.push_back({p->name, &p->value, &p->grad, false});
  return run_check(targets, loss, max_coords, rng);
}

GradCheckReport grad_check_model(Model<double>& model, Tensor<double> input,
                                 const std::vector<std::uint32_t>& labels, std::uint64_t seed,
                                 std::size_t max_coords) {
  Rng rng(seed);
  const std::uint64_t mask_seed = rng.next();

  auto loss = [&]() {
    model.reseed_dropout(mask_seed);
    return cross_entropy(model.forward(input, Mode::Train), labels);
  };

  model.zero_grad();
  model.reseed_dropout(mask_seed);
  const Tensor<double> probs = model.forward(input, Mode::Train);
  model.backward_from_logits(softmax_ce_backward(probs, labels));

  // Input gradient is not exposed by backward_from_logits; check parameters.
  std::vector<Target> targets;
  for (const auto& np : model.named_params())
    targets.push_back({np.name, &np.param->value, &np.param->grad, false});
  return run_check(targets, loss, max_coords, rng);
}

}  // namespace kmgr::nn
