#include "kmgr/models/builders.hpp"

#include <nlohmann/json.hpp>

#include <numeric>

#include "kmgr/util/error.hpp"

namespace kmgr::models {

using nlohmann::json;
using namespace nn;

ModelKind parse_model_kind(const std::string& text) {
  if (text == "dnn") return ModelKind::Dnn;
  if (text == "cnn") return ModelKind::Cnn;
  throw DataError("unknown model kind '" + text + "' (expected dnn or cnn)");
}

std::string to_string(ModelKind kind) { return kind == ModelKind::Dnn ? "dnn" : "cnn"; }

void ModelSpec::validate() const {
  if (input_shape.empty()) throw DataError("model spec: empty input shape");
  for (std::size_t d : input_shape)
    if (d == 0) throw DataError("model spec: input shape must be positive");
  if (num_classes < 2) throw DataError("model spec: need at least 2 classes");
  if (kind == ModelKind::Cnn && input_shape.size() != 3)
    throw DataError("model spec: cnn input shape must be (H, W, C)");
}

namespace {

constexpr double kDropoutRate = 0.3;

/// Builder that appends layers and records their hyperparameters so the
/// model's topology JSON can rebuild it exactly.
template <typename T>
struct TopologyBuilder {
  Model<T> model;
  json layers = json::array();

  void dense(std::size_t in, std::size_t out) {
    model.add(std::make_unique<Dense<T>>(in, out));
    layers.push_back({{"kind", "dense"}, {"in", in}, {"out", out}});
  }
  void relu() {
    model.add(std::make_unique<ReLU<T>>());
    layers.push_back({{"kind", "relu"}});
  }
  void softmax() {
    model.add(std::make_unique<Softmax<T>>());
    layers.push_back({{"kind", "softmax"}});
  }
  void dropout(double rate) {
    model.add(std::make_unique<Dropout<T>>(rate));
    layers.push_back({{"kind", "dropout"}, {"rate", rate}});
  }
  void flatten() {
    model.add(std::make_unique<Flatten<T>>());
    layers.push_back({{"kind", "flatten"}});
  }
  void conv(std::size_t kh, std::size_t kw, std::size_t cin, std::size_t cout) {
    model.add(std::make_unique<Conv2D<T>>(kh, kw, cin, cout));
    layers.push_back({{"kind", "conv"}, {"kh", kh}, {"kw", kw}, {"cin", cin}, {"cout", cout}});
  }
  void pool(std::size_t ph, std::size_t pw, std::size_t stride) {
    model.add(std::make_unique<MaxPool2D<T>>(ph, pw, stride));
    layers.push_back({{"kind", "pool"}, {"ph", ph}, {"pw", pw}, {"stride", stride}});
  }
  void bn(std::size_t channels) {
    model.add(std::make_unique<BatchNorm<T>>(channels));
    layers.push_back({{"kind", "bn"}, {"channels", channels}, {"eps", 1e-3}, {"momentum", 0.99}});
  }

  Model<T> finish(const ModelSpec& spec) {
    model.input_shape = spec.input_shape;
    model.num_classes = spec.num_classes;
    json meta{{"version", 1},
              {"kind", to_string(spec.kind)},
              {"input_shape", spec.input_shape},
              {"num_classes", spec.num_classes},
              {"extra_dropout", spec.extra_dropout},
              {"layers", std::move(layers)}};
    model.meta = meta.dump();
    return std::move(model);
  }
};

}  // namespace

template <typename T>
Model<T> build_dnn(const ModelSpec& spec) {
  spec.validate();
  if (spec.kind != ModelKind::Dnn) throw DataError("build_dnn: spec kind is not dnn");
  const std::size_t in_features = std::accumulate(spec.input_shape.begin(), spec.input_shape.end(),
                                                  std::size_t{1}, std::multiplies<>());
  TopologyBuilder<T> b;
  b.flatten();
  b.dense(in_features, 512);
  b.relu();
  b.dense(512, 256);
  b.relu();
  b.dropout(kDropoutRate);
  b.dense(256, 64);
  b.relu();
  if (spec.extra_dropout) b.dropout(kDropoutRate);
  b.dense(64, spec.num_classes);
  b.softmax();
  return b.finish(spec);
}

template <typename T>
Model<T> build_cnn(const ModelSpec& spec) {
  spec.validate();
  if (spec.kind != ModelKind::Cnn) throw DataError("build_cnn: spec kind is not cnn");
  std::size_t h = spec.input_shape[0], w = spec.input_shape[1];
  std::size_t channels = spec.input_shape[2];

  struct Stage {
    std::size_t conv_k, pool_k, stride;
  };
  const Stage stages[3] = {{3, 3, 2}, {3, 3, 2}, {2, 2, 2}};

  TopologyBuilder<T> b;
  for (std::size_t s = 0; s < 3; ++s) {
    if (h == 0 || w == 0)
      throw DataError("cnn input too small for pooling stage " + std::to_string(s + 1));
    b.conv(stages[s].conv_k, stages[s].conv_k, channels, 32);
    b.relu();
    b.pool(stages[s].pool_k, stages[s].pool_k, stages[s].stride);
    b.bn(32);
    channels = 32;
    h = MaxPool2D<T>::out_extent(h, stages[s].stride);
    w = MaxPool2D<T>::out_extent(w, stages[s].stride);
  }
  b.flatten();
  b.dense(h * w * 32, 64);
  b.relu();
  if (spec.extra_dropout) b.dropout(kDropoutRate);
  b.dense(64, spec.num_classes);
  b.softmax();
  return b.finish(spec);
}

template <typename T>
Model<T> build_model(const ModelSpec& spec) {
  return spec.kind == ModelKind::Dnn ? build_dnn<T>(spec) : build_cnn<T>(spec);
}

template <typename T>
Model<T> model_from_topology(const std::string& topology_json) {
  json meta;
  try {
    meta = json::parse(topology_json);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad topology JSON: ") + e.what());
  }
  Model<T> model;
  try {
    model.input_shape = meta.at("input_shape").get<std::vector<std::size_t>>();
    model.num_classes = meta.at("num_classes").get<std::size_t>();
    for (const auto& l : meta.at("layers")) {
      const std::string kind = l.at("kind").get<std::string>();
      if (kind == "dense")
        model.add(std::make_unique<Dense<T>>(l.at("in").get<std::size_t>(), l.at("out").get<std::size_t>()));
      else if (kind == "relu")
        model.add(std::make_unique<ReLU<T>>());
      else if (kind == "softmax")
        model.add(std::make_unique<Softmax<T>>());
      else if (kind == "dropout")
        model.add(std::make_unique<Dropout<T>>(l.at("rate").get<double>()));
      else if (kind == "flatten")
        model.add(std::make_unique<Flatten<T>>());
      else if (kind == "conv")
        model.add(std::make_unique<Conv2D<T>>(l.at("kh").get<std::size_t>(), l.at("kw").get<std::size_t>(),
                                              l.at("cin").get<std::size_t>(),
                                              l.at("cout").get<std::size_t>()));
      else if (kind == "pool")
        model.add(std::make_unique<MaxPool2D<T>>(l.at("ph").get<std::size_t>(), l.at("pw").get<std::size_t>(),
                                                 l.at("stride").get<std::size_t>()));
      else if (kind == "bn")
        model.add(std::make_unique<BatchNorm<T>>(l.at("channels").get<std::size_t>(),
                                                 l.at("eps").get<double>(),
                                                 l.at("momentum").get<double>()));
      else
        throw DataError("unknown layer kind in topology: " + kind);
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("bad topology JSON: ") + e.what());
  }
  model.meta = topology_json;
  return model;
}

nn::Model<float> load_model(const std::filesystem::path& path) {
  const nn::CheckpointData data = nn::load_checkpoint(path);
  nn::Model<float> model = model_from_topology<float>(data.topology);
  nn::apply_checkpoint(model, data, /*restore_state=*/true);
  return model;
}

template Model<float> build_dnn<float>(const ModelSpec&);
template Model<double> build_dnn<double>(const ModelSpec&);
template Model<float> build_cnn<float>(const ModelSpec&);
template Model<double> build_cnn<double>(const ModelSpec&);
template Model<float> build_model<float>(const ModelSpec&);
template Model<double> build_model<double>(const ModelSpec&);
template Model<float> model_from_topology<float>(const std::string&);
template Model<double> model_from_topology<double>(const std::string&);

}  // namespace kmgr::models
