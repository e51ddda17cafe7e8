#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "kmgr/models/builders.hpp"
#include "kmgr/models/experiments.hpp"
#include "kmgr/nn/adam.hpp"
#include "kmgr/nn/checkpoint.hpp"
#include "kmgr/nn/gradcheck.hpp"
#include "kmgr/nn/layers.hpp"
#include "kmgr/nn/loss.hpp"
#include "kmgr/nn/model.hpp"
#include "kmgr/util/binio.hpp"
#include "kmgr/util/error.hpp"
#include "kmgr/util/rng.hpp"

using namespace kmgr;
using nn::Mode;
using nn::Tensor;

namespace {

namespace fs = std::filesystem;

fs::path temp_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "kmgr-nn-tests" / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

template <typename T>
Tensor<T> random_tensor(std::vector<std::size_t> shape, std::uint64_t seed, double lo = -1.0,
                        double hi = 1.0) {
  Tensor<T> t(std::move(shape));
  Rng rng(seed);
  for (auto& v : t.data) v = static_cast<T>(rng.uniform(lo, hi));
  return t;
}

models::ModelSpec dnn_spec(bool extra = false) {
  models::ModelSpec s;
  s.kind = models::ModelKind::Dnn;
  s.input_shape = {44, 13};
  s.num_classes = 8;
  s.extra_dropout = extra;
  return s;
}

models::ModelSpec cnn_spec(std::vector<std::size_t> shape = {44, 13, 1}, bool extra = false) {
  models::ModelSpec s;
  s.kind = models::ModelKind::Cnn;
  s.input_shape = std::move(shape);
  s.num_classes = 8;
  s.extra_dropout = extra;
  return s;
}

std::string file_bytes(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("dnn parameter count matches the architecture arithmetic") {
    auto model = models::build_dnn<float>(dnn_spec());
    // 572*512+512 + 512*256+256 + 256*64+64 + 64*8+8
    CHECK(model.param_count() == 441672);
    CHECK(model.input_shape == std::vector<std::size_t>{44, 13});
    CHECK(model.num_classes == 8);
  }

  TEST_CASE("cnn parameter count for both experiment input shapes") {
    CHECK(models::build_cnn<float>(cnn_spec({44, 13, 1})).param_count() == 39048);
    CHECK(models::build_cnn<float>(cnn_spec({2, 13, 1})).param_count() == 18568);
  }

  TEST_CASE("forward produces one probability row per sample") {
    for (bool cnn : {false, true}) {
      auto model = cnn ? models::build_cnn<float>(cnn_spec()) : models::build_dnn<float>(dnn_spec());
      Rng rng(3);
      model.init(rng);
      const auto x = cnn ? random_tensor<float>({5, 44, 13, 1}, 11)
                         : random_tensor<float>({5, 44, 13}, 11);
      const Tensor<float> y = model.forward(x, Mode::Infer);
      REQUIRE(y.shape == std::vector<std::size_t>{5, 8});
      for (std::size_t r = 0; r < 5; ++r) {
        double sum = 0.0;
        for (std::size_t c = 0; c < 8; ++c) {
          sum += y.data[r * 8 + c];
          CHECK(y.data[r * 8 + c] >= 0.0f);
        }
        CHECK(sum == doctest::Approx(1.0));
      }
    }
  }

  TEST_CASE("the pooling trace survives the short-segment input") {
    // (2,13): pools 3/3/2 with stride 2 give 1x7 -> 1x4 -> 1x2; flatten 64.
    auto model = models::build_cnn<float>(cnn_spec({2, 13, 1}));
    Rng rng(1);
    model.init(rng);
    const Tensor<float> y = model.forward(random_tensor<float>({3, 2, 13, 1}, 2), Mode::Infer);
    CHECK(y.shape == std::vector<std::size_t>{3, 8});
  }

  TEST_CASE("parameter names follow <kind><occurrence>.<local>") {
    auto dnn = models::build_dnn<float>(dnn_spec());
    std::vector<std::string> names;
    for (const auto& np : dnn.named_params()) names.push_back(np.name);
    CHECK(names == std::vector<std::string>{"dense0.W", "dense0.b", "dense1.W", "dense1.b",
                                            "dense2.W", "dense2.b", "dense3.W", "dense3.b"});

    auto cnn = models::build_cnn<float>(cnn_spec());
    std::vector<std::string> all;
    for (const auto& np : cnn.named_all()) all.push_back(np.name);
    // Spot-check structure: three convs, three bns with running stats.
    CHECK(std::count(all.begin(), all.end(), "conv0.W") == 1);
    CHECK(std::count(all.begin(), all.end(), "conv2.b") == 1);
    CHECK(std::count(all.begin(), all.end(), "bn0.gamma") == 1);
    CHECK(std::count(all.begin(), all.end(), "bn2.running_var") == 1);
    CHECK(std::count(all.begin(), all.end(), "dense0.W") == 1);
    CHECK(std::count(all.begin(), all.end(), "dense1.b") == 1);
  }

  TEST_CASE("extra-dropout variants keep identical parameter names") {
    // The sixth experiment adds a dropout layer; dropout owns no parameters
    // and occurrence counting is per kind, so checkpoints stay compatible.
    for (bool cnn : {false, true}) {
      auto base = cnn ? models::build_cnn<float>(cnn_spec({44, 13, 1}, false))
                      : models::build_dnn<float>(dnn_spec(false));
      auto extra = cnn ? models::build_cnn<float>(cnn_spec({44, 13, 1}, true))
                       : models::build_dnn<float>(dnn_spec(true));
      auto a = base.named_all();
      auto b = extra.named_all();
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].name == b[i].name);
        CHECK(a[i].param->value.shape == b[i].param->value.shape);
      }
      CHECK(extra.layers().size() == base.layers().size() + 1);
    }
  }

  TEST_CASE("topology JSON round-trips into an identical skeleton") {
    auto model = models::build_cnn<float>(cnn_spec());
    auto rebuilt = models::model_from_topology<float>(model.meta);
    CHECK(rebuilt.meta == model.meta);
    CHECK(rebuilt.input_shape == model.input_shape);
    CHECK(rebuilt.num_classes == model.num_classes);
    CHECK(rebuilt.param_count() == model.param_count());
    auto a = model.named_all();
    auto b = rebuilt.named_all();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].name == b[i].name);
      CHECK(a[i].param->value.shape == b[i].param->value.shape);
    }

    CHECK_THROWS_AS((void)models::model_from_topology<float>("{ nope"), DataError);
    CHECK_THROWS_AS((void)models::model_from_topology<float>(R"({"version":1})"), DataError);
  }

  TEST_CASE("initialization is a pure function of the seed") {
    auto a = models::build_dnn<float>(dnn_spec());
    auto b = models::build_dnn<float>(dnn_spec());
    Rng ra(9), rb(9);
    a.init(ra);
    b.init(rb);
    auto pa = a.trainable();
    auto pb = b.trainable();
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) CHECK(pa[i]->value.data == pb[i]->value.data);

    Rng rc(10);
    b.init(rc);
    bool any_differs = false;
    for (std::size_t i = 0; i < pa.size(); ++i)
      if (pa[i]->value.data != pb[i]->value.data) any_differs = true;
    CHECK(any_differs);
  }

  TEST_CASE("backward_from_logits requires the trailing softmax") {
    nn::Model<double> model;
    model.add(std::make_unique<nn::Dense<double>>(4, 2));
    const auto x = random_tensor<double>({3, 4}, 1);
    model.forward(x, Mode::Train);
    CHECK_THROWS_AS(model.backward_from_logits(Tensor<double>({3, 2})), DataError);
  }

  TEST_CASE("reseed_dropout makes training-mode masks reproducible") {
    nn::Model<double> model;
    model.add(std::make_unique<nn::Dropout<double>>(0.5));
    model.add(std::make_unique<nn::Dropout<double>>(0.5));
    const auto x = random_tensor<double>({4, 32}, 5, 0.5, 1.5);  // never exactly 0

    model.reseed_dropout(77);
    const auto a = model.forward(x, Mode::Train);
    model.reseed_dropout(77);
    const auto b = model.forward(x, Mode::Train);
    CHECK(a.data == b.data);

    model.reseed_dropout(78);
    const auto c = model.forward(x, Mode::Train);
    CHECK(a.data != c.data);
  }

  TEST_CASE("model spec validation") {
    CHECK_THROWS_AS(models::build_dnn<float>(models::ModelSpec{}), DataError);  // empty shape

    auto bad = dnn_spec();
    bad.num_classes = 1;
    CHECK_THROWS_AS(models::build_dnn<float>(bad), DataError);

    auto flat = cnn_spec({44, 13});  // cnn needs (H, W, C)
    CHECK_THROWS_AS(models::build_cnn<float>(flat), DataError);

    auto tiny = cnn_spec({1, 1, 1});  // too small to pool three times
    CHECK_THROWS_AS(models::build_cnn<float>(tiny), DataError);

    CHECK(models::parse_model_kind("dnn") == models::ModelKind::Dnn);
    CHECK(models::parse_model_kind("cnn") == models::ModelKind::Cnn);
    CHECK_THROWS_AS((void)models::parse_model_kind("rnn"), DataError);
  }

  TEST_CASE("the experiment registry matches the published matrix") {
    using models::Randomization;
    const struct {
      int n;
      std::vector<std::size_t> shape;
      std::size_t total;
      Randomization rand;
      std::size_t epochs;
      double train, valid, test;
      bool extra;
    } rows[] = {
        {1, {2, 13}, 1056000, Randomization::RandomSplit, 30, 0.7, 0.1, 0.2, false},
        {2, {2, 13}, 200000, Randomization::RandomSplit, 30, 0.5, 0.25, 0.25, false},
        {3, {2, 13}, 1056000, Randomization::StratifiedKFold, 30, 0.7, 0.1, 0.2, false},
        {4, {2, 13}, 1056000, Randomization::StratifiedKFold, 100, 0.7, 0.1, 0.2, false},
        {5, {44, 13}, 26400, Randomization::StratifiedKFold, 30, 0.8, 0.1, 0.1, false},
        {6, {44, 13}, 26400, Randomization::StratifiedKFold, 30, 0.8, 0.1, 0.1, true},
    };
    for (const auto& row : rows) {
      const auto e = models::experiment(row.n);
      INFO("experiment ", row.n);
      CHECK(e.number == row.n);
      CHECK(e.feature_shape == row.shape);
      CHECK(e.total_samples == row.total);
      CHECK(e.randomization == row.rand);
      CHECK(e.epochs == row.epochs);
      CHECK(e.ratios.train == doctest::Approx(row.train));
      CHECK(e.ratios.valid == doctest::Approx(row.valid));
      CHECK(e.ratios.test == doctest::Approx(row.test));
      CHECK(e.extra_dropout == row.extra);
      if (row.rand == Randomization::StratifiedKFold) {
        CHECK(e.kfold == 10);
        CHECK(e.fold_index == 9);
      } else {
        CHECK(e.kfold == 0);
      }
      // Model input shapes: the CNN variant appends a channel axis.
      CHECK(e.input_shape(models::ModelKind::Dnn) == row.shape);
      auto with_channel = row.shape;
      with_channel.push_back(1);
      CHECK(e.input_shape(models::ModelKind::Cnn) == with_channel);
    }
    CHECK_THROWS_AS((void)models::experiment(0), DataError);
    CHECK_THROWS_AS((void)models::experiment(7), DataError);
  }
}

TEST_SUITE("adam") {
  TEST_CASE("zero gradient leaves parameters untouched") {
    nn::Param<double> p("w", {4});
    for (auto& v : p.value.data) v = 1.5;
    nn::Adam<double> opt;
    opt.step({&p});
    for (double v : p.value.data) CHECK(v == 1.5);
    CHECK(opt.steps_taken() == 1);
  }

  TEST_CASE("first step moves by about lr toward minus the gradient sign") {
    for (double g : {1.0, 1e6, -3.0}) {
      nn::Param<double> p("w", {1});
      p.value.data[0] = 0.0;
      p.grad.data[0] = g;
      nn::AdamConfig cfg;
      cfg.lr = 1e-3;
      nn::Adam<double> opt(cfg);
      opt.step({&p});
      // m_hat = g, v_hat = g^2 -> step ~ lr * sign(g) while |g| >> eps.
      CHECK(p.value.data[0] == doctest::Approx(g > 0 ? -1e-3 : 1e-3).epsilon(0.01));
    }
  }

  TEST_CASE("converges on a quadratic bowl") {
    nn::Param<double> p("x", {1});
    p.value.data[0] = 5.0;
    nn::AdamConfig cfg;
    cfg.lr = 0.1;
    nn::Adam<double> opt(cfg);
    for (int i = 0; i < 500; ++i) {
      p.zero_grad();
      p.grad.data[0] = 2.0 * (p.value.data[0] - 3.0);  // d/dx (x-3)^2
      opt.step({&p});
    }
    CHECK(p.value.data[0] == doctest::Approx(3.0).epsilon(0.01));
  }

  TEST_CASE("rejects a changed parameter list") {
    nn::Param<double> a("a", {2}), b("b", {2});
    nn::Adam<double> opt;
    opt.step({&a});
    CHECK_THROWS_AS(opt.step({&a, &b}), DataError);

    nn::Adam<double> opt2;
    opt2.step({&a});
    nn::Param<double> a_bigger("a", {3});
    CHECK_THROWS_AS(opt2.step({&a_bigger}), DataError);
  }

  TEST_CASE("restore reproduces the exact trajectory") {
    auto run_steps = [](nn::Adam<double>& opt, nn::Param<double>& p, int n) {
      for (int i = 0; i < n; ++i) {
        p.zero_grad();
        p.grad.data[0] = std::sin(static_cast<double>(i) + p.value.data[0]);
        opt.step({&p});
      }
    };

    nn::Param<double> p("w", {1});
    p.value.data[0] = 1.0;
    nn::Adam<double> opt;
    run_steps(opt, p, 5);

    // Snapshot, continue 5 more on the original.
    const std::uint64_t t = opt.steps_taken();
    const auto m = opt.first_moments();
    const auto v = opt.second_moments();
    const double w_snapshot = p.value.data[0];
    run_steps(opt, p, 5);
    const double w_final = p.value.data[0];

    // Restore into a fresh optimizer and replay.
    nn::Param<double> q("w", {1});
    q.value.data[0] = w_snapshot;
    nn::Adam<double> opt2;
    opt2.restore(t, m, v);
    run_steps(opt2, q, 5);
    CHECK(q.value.data[0] == w_final);  // bit-identical arithmetic
  }
}

TEST_SUITE("gradcheck") {
  TEST_CASE("every layer kind passes finite differences on a few seeds") {
    const double tol = 1e-4;
    for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
      {
        nn::Dense<double> l(7, 5);
        auto r = nn::grad_check(l, random_tensor<double>({4, 7}, seed), seed);
        INFO("dense seed ", seed, " err ", r.max_rel_err);
        CHECK(r.passed(tol));
      }
      {
        nn::ReLU<double> l;
        // Keep inputs away from the kink; exact zeros are skipped anyway.
        auto x = random_tensor<double>({4, 9}, seed);
        for (auto& v : x.data)
          if (std::abs(v) < 0.05) v = v < 0 ? v - 0.05 : v + 0.05;
        auto r = nn::grad_check(l, x, seed);
        CHECK(r.passed(tol));
      }
      {
        nn::Softmax<double> l;
        CHECK(nn::grad_check(l, random_tensor<double>({4, 6}, seed), seed).passed(tol));
      }
      {
        nn::Dropout<double> l(0.3);
        CHECK(nn::grad_check(l, random_tensor<double>({4, 50}, seed, 0.5, 1.5), seed).passed(tol));
      }
      {
        nn::Flatten<double> l;
        CHECK(nn::grad_check(l, random_tensor<double>({3, 4, 5}, seed), seed).passed(tol));
      }
      {
        nn::Conv2D<double> l(3, 3, 3, 4);
        Rng rng(seed);
        l.init(rng);
        CHECK(nn::grad_check(l, random_tensor<double>({2, 6, 5, 3}, seed), seed).passed(tol));
      }
      {
        nn::MaxPool2D<double> l(3, 3, 2);
        CHECK(nn::grad_check(l, random_tensor<double>({2, 7, 6, 3}, seed), seed).passed(tol));
      }
      {
        nn::BatchNorm<double> l(5);
        CHECK(nn::grad_check(l, random_tensor<double>({4, 3, 2, 5}, seed), seed).passed(tol));
      }
    }
  }

  TEST_CASE("a corrupted backward implementation is caught") {
    // y = 2x with a backward off by 0.05%: the check must flag it.
    struct BadScale : nn::Layer<double> {
      std::string kind() const override { return "bad"; }
      Tensor<double> forward(const Tensor<double>& x, Mode) override {
        Tensor<double> y = x;
        for (auto& v : y.data) v *= 2.0;
        return y;
      }
      Tensor<double> backward(const Tensor<double>& gy) override {
        Tensor<double> gx = gy;
        for (auto& v : gx.data) v *= 2.001;
        return gx;
      }
    };
    BadScale l;
    const auto r = nn::grad_check(l, random_tensor<double>({4, 6}, 1), 1);
    CHECK_FALSE(r.passed(1e-4));
    CHECK(r.max_rel_err > 1e-4);
    CHECK(r.max_rel_err < 1e-2);  // and it measures the right magnitude
  }

  TEST_CASE("whole-model check exercises the fused loss gradient") {
    nn::Model<double> model;
    model.add(std::make_unique<nn::Flatten<double>>());
    model.add(std::make_unique<nn::Dense<double>>(10, 4));
    model.add(std::make_unique<nn::Softmax<double>>());
    Rng rng(5);
    model.init(rng);
    const auto r =
        nn::grad_check_model(model, random_tensor<double>({3, 2, 5}, 6), {0, 3, 1}, 7);
    INFO("max rel err ", r.max_rel_err);
    CHECK(r.passed(1e-4));
    CHECK(r.entries.size() >= 3);  // W, b, input at least
  }

  TEST_CASE("frozen dropout masks keep the model check deterministic") {
    nn::Model<double> model;
    model.add(std::make_unique<nn::Flatten<double>>());
    model.add(std::make_unique<nn::Dense<double>>(12, 6));
    model.add(std::make_unique<nn::Dropout<double>>(0.3));
    model.add(std::make_unique<nn::Dense<double>>(6, 3));
    model.add(std::make_unique<nn::Softmax<double>>());
    Rng rng(8);
    model.init(rng);
    const auto r =
        nn::grad_check_model(model, random_tensor<double>({4, 12}, 9, 0.2, 1.2), {0, 1, 2, 0}, 3);
    INFO("max rel err ", r.max_rel_err);
    CHECK(r.passed(1e-4));
  }
}

TEST_SUITE("checkpoint") {
  TEST_CASE("stream round-trip preserves every field") {
    auto model = models::build_cnn<float>(cnn_spec({2, 13, 1}));
    Rng rng(21);
    model.init(rng);

    // Push some training through so running stats and moments are nonzero.
    nn::Adam<float> opt;
    for (int step = 0; step < 3; ++step) {
      model.reseed_dropout(step);
      const auto x = random_tensor<float>({4, 2, 13, 1}, 100 + step);
      const auto probs = model.forward(x, Mode::Train);
      model.zero_grad();
      model.backward_from_logits(nn::softmax_ce_backward(probs, {0, 1, 2, 3}));
      opt.step(model.trainable());
    }

    std::stringstream ss;
    nn::CheckpointData out;
    out.topology = model.meta;
    for (const auto& np : model.named_params()) out.params.emplace_back(np.name, np.param->value);
    for (const auto& np : model.named_all()) {
      bool trainable = false;
      for (const auto& np2 : model.named_params()) trainable |= np2.name == np.name;
      if (!trainable) out.state.emplace_back(np.name, np.param->value);
    }
    out.has_optimizer = true;
    out.opt_step = opt.steps_taken();
    out.opt_m = opt.first_moments();
    out.opt_v = opt.second_moments();
    nn::write_checkpoint(ss, out);

    const nn::CheckpointData in = nn::read_checkpoint(ss);
    CHECK(in.topology == out.topology);
    REQUIRE(in.params.size() == out.params.size());
    for (std::size_t i = 0; i < in.params.size(); ++i) {
      CHECK(in.params[i].first == out.params[i].first);
      CHECK(in.params[i].second.shape == out.params[i].second.shape);
      CHECK(in.params[i].second.data == out.params[i].second.data);  // float-exact
    }
    REQUIRE(in.state.size() == out.state.size());
    for (std::size_t i = 0; i < in.state.size(); ++i)
      CHECK(in.state[i].second.data == out.state[i].second.data);
    CHECK(in.has_optimizer);
    CHECK(in.opt_step == 3);
    CHECK(in.opt_m == out.opt_m);
    CHECK(in.opt_v == out.opt_v);
  }

  TEST_CASE("file save/apply restores a model that predicts identically") {
    const fs::path dir = temp_dir("apply");
    auto model = models::build_dnn<float>(dnn_spec());
    Rng rng(31);
    model.init(rng);
    nn::save_checkpoint(dir / "m.kmgrmodl", model);

    auto data = nn::load_checkpoint(dir / "m.kmgrmodl");
    auto restored = models::model_from_topology<float>(data.topology);
    nn::apply_checkpoint(restored, data);

    const auto x = random_tensor<float>({6, 44, 13}, 32);
    const auto a = model.forward(x, Mode::Infer);
    const auto b = restored.forward(x, Mode::Infer);
    CHECK(a.data == b.data);  // bit-identical inference

    // Two saves of the same model are byte-identical.
    nn::save_checkpoint(dir / "m2.kmgrmodl", model);
    CHECK(file_bytes(dir / "m.kmgrmodl") == file_bytes(dir / "m2.kmgrmodl"));
  }

  TEST_CASE("weights from the plain variant drive the extra-dropout variant") {
    // Dropout is inference-identity, so an extra dropout layer must not
    // change what restored weights predict.
    for (bool cnn : {false, true}) {
      auto base = cnn ? models::build_cnn<float>(cnn_spec({44, 13, 1}, false))
                      : models::build_dnn<float>(dnn_spec(false));
      Rng rng(41);
      base.init(rng);
      std::stringstream ss;
      nn::CheckpointData data;
      data.topology = base.meta;
      for (const auto& np : base.named_params()) data.params.emplace_back(np.name, np.param->value);
      for (const auto& np : base.named_all()) {
        bool trainable = false;
        for (const auto& np2 : base.named_params()) trainable |= np2.name == np.name;
        if (!trainable) data.state.emplace_back(np.name, np.param->value);
      }

      auto extra = cnn ? models::build_cnn<float>(cnn_spec({44, 13, 1}, true))
                       : models::build_dnn<float>(dnn_spec(true));
      nn::apply_checkpoint(extra, data);

      const auto x = cnn ? random_tensor<float>({5, 44, 13, 1}, 42)
                         : random_tensor<float>({5, 44, 13}, 42);
      const auto a = base.forward(x, Mode::Infer);
      const auto b = extra.forward(x, Mode::Infer);
      CHECK(a.data == b.data);
    }
  }

  TEST_CASE("unknown sections are skipped") {
    std::stringstream ss;
    {
      BinWriter w(ss);
      const char magic[8] = {'K', 'M', 'G', 'R', 'M', 'O', 'D', 'L'};
      w.bytes(magic, 8);
      w.u32(1);              // version
      w.str("{}");           // topology
      w.u32(1);              // one parameter
      w.str("dense0.W");
      w.u32(2);              // rank
      w.u64(2);
      w.u64(2);
      w.array(std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f});
      w.u32(1);              // one section, but of an unknown kind
      w.bytes("XTRA", 4);
      const std::vector<char> body{'f', 'u', 't', 'u', 'r', 'e'};
      w.u64(body.size());
      w.bytes(body.data(), body.size());
      w.seal();
    }
    const nn::CheckpointData data = nn::read_checkpoint(ss, "test");
    CHECK(data.topology == "{}");
    REQUIRE(data.params.size() == 1);
    CHECK(data.params[0].first == "dense0.W");
    CHECK(data.params[0].second.data == std::vector<float>{1.0f, 2.0f, 3.0f, 4.0f});
    CHECK_FALSE(data.has_optimizer);
    CHECK(data.state.empty());
  }

  TEST_CASE("corruption and wrong files are rejected") {
    const fs::path dir = temp_dir("corrupt");
    auto model = models::build_dnn<float>(dnn_spec());
    Rng rng(51);
    model.init(rng);
    const fs::path path = dir / "m.kmgrmodl";
    nn::save_checkpoint(path, model);

    // Bit flip in the middle -> checksum failure.
    {
      std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
      f.seekg(1000);
      char b;
      f.read(&b, 1);
      b = static_cast<char>(b ^ 0x40);
      f.seekp(1000);
      f.write(&b, 1);
    }
    CHECK_THROWS_WITH_AS((void)nn::load_checkpoint(path), doctest::Contains("checksum"),
                         DataError);

    nn::save_checkpoint(path, model);
    fs::resize_file(path, fs::file_size(path) / 2);
    CHECK_THROWS_WITH_AS((void)nn::load_checkpoint(path), doctest::Contains("truncated"),
                         DataError);

    {
      std::ofstream f(path, std::ios::binary);
      f << "KMGRFEATnot a model";
    }
    CHECK_THROWS_AS((void)nn::load_checkpoint(path), DataError);

    // Future version number.
    {
      std::ofstream os(path, std::ios::binary | std::ios::trunc);
      BinWriter w(os);
      const char magic[8] = {'K', 'M', 'G', 'R', 'M', 'O', 'D', 'L'};
      w.bytes(magic, 8);
      w.u32(2);
      w.seal();
    }
    CHECK_THROWS_WITH_AS((void)nn::load_checkpoint(path), doctest::Contains("version"),
                         DataError);

    CHECK_THROWS_AS((void)nn::load_checkpoint(dir / "missing.kmgrmodl"), DataError);
  }

  TEST_CASE("applying to an incompatible model is a data error") {
    auto dnn = models::build_dnn<float>(dnn_spec());
    Rng rng(61);
    dnn.init(rng);

    nn::CheckpointData data;
    data.topology = dnn.meta;
    for (const auto& np : dnn.named_params()) data.params.emplace_back(np.name, np.param->value);

    // A CNN wants conv0.W, which the DNN checkpoint lacks.
    auto cnn = models::build_cnn<float>(cnn_spec());
    CHECK_THROWS_WITH_AS(nn::apply_checkpoint(cnn, data), doctest::Contains("missing"),
                         DataError);

    // Same names but a different dense geometry -> shape mismatch.
    auto other = models::build_dnn<float>([] {
      auto s = dnn_spec();
      s.input_shape = {2, 13};
      return s;
    }());
    CHECK_THROWS_WITH_AS(nn::apply_checkpoint(other, data), doctest::Contains("shape"),
                         DataError);

    // restore_optimizer demands an OPTM section.
    nn::Adam<float> opt;
    CHECK_THROWS_AS(nn::restore_optimizer(opt, data), DataError);
  }
}
