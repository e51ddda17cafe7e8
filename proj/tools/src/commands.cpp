#include "kmgr_cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <thread>

#include "kmgr/audio/wav.hpp"
#include "kmgr/data/dataset.hpp"
#include "kmgr/data/feature_io.hpp"
#include "kmgr/data/manifest.hpp"
#include "kmgr/data/split.hpp"
#include "kmgr/models/builders.hpp"
#include "kmgr/models/experiments.hpp"
#include "kmgr/nn/checkpoint.hpp"
#include "kmgr/nn/gradcheck.hpp"
#include "kmgr/synth/synth.hpp"
#include "kmgr/train/predict.hpp"
#include "kmgr/train/report.hpp"
#include "kmgr/train/trainer.hpp"
#include "kmgr/util/error.hpp"

namespace kmgr::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ------------------------------------------------------------- config file

/// Values from --config <json>; flags given on the command line win because
/// overrides are applied to the bound variables before CLI11 parses.
class ConfigOverlay {
 public:
  void load(const std::string& path) {
    try {
      cfg_ = json::parse(train::read_text_file(path));
    } catch (const json::exception& e) {
      throw DataError("bad config JSON in " + path + ": " + e.what());
    }
    if (!cfg_.is_object()) throw DataError("config file must hold a JSON object: " + path);
  }

  template <typename T>
  void get(const char* key, T& target) const {
    if (!cfg_.is_object() || !cfg_.contains(key)) return;
    try {
      target = cfg_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw DataError(std::string("config key '") + key + "': " + e.what());
    }
  }

 private:
  json cfg_;
};

std::optional<std::string> find_config_arg(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw DataError("--config needs a file path");
      return args[i + 1];
    }
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

std::size_t extraction_threads() {
  std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MGR_THREADS")) {
    char* end = nullptr;
    const unsigned long parsed = std::strtoul(env, &end, 10);
    if (end == env || *end != '\0' || parsed == 0)
      throw DataError("MGR_THREADS must be a positive integer, got '" + std::string(env) + "'");
    threads = std::min<std::size_t>(threads, parsed);
  }
  return threads;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

// ------------------------------------------------------------ shared steps

data::SplitAssignment make_split(const data::FeatureDataset& ds, std::size_t kfold,
                                 std::size_t fold, const data::SplitRatios& ratios,
                                 std::uint64_t seed) {
  if (kfold == 0) return data::random_split(ds, ratios, seed);
  const auto folds = data::stratified_kfold(ds, kfold, seed);
  return data::select_fold_split(folds, fold, ratios, seed);
}

struct DspFlags {
  std::uint32_t sample_rate = 22050;
  std::uint32_t n_fft = 2048;
  std::uint32_t hop = 512;
  std::uint32_t n_mels = 40;
  std::uint32_t n_mfcc = 13;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--sample-rate", sample_rate, "Analysis sample rate, Hz");
    cmd->add_option("--n-fft", n_fft, "FFT size (power of two)");
    cmd->add_option("--hop", hop, "Hop length in samples");
    cmd->add_option("--n-mels", n_mels, "Mel filterbank size");
    cmd->add_option("--n-mfcc", n_mfcc, "Cepstral coefficients kept");
  }
  void apply(const ConfigOverlay& cfg) {
    cfg.get("sample-rate", sample_rate);
    cfg.get("n-fft", n_fft);
    cfg.get("hop", hop);
    cfg.get("n-mels", n_mels);
    cfg.get("n-mfcc", n_mfcc);
  }
  dsp::DspConfig to_config() const {
    dsp::DspConfig c;
    c.sample_rate = sample_rate;
    c.n_fft = n_fft;
    c.hop = hop;
    c.n_mels = n_mels;
    c.n_mfcc = n_mfcc;
    return c;
  }
};

// ---------------------------------------------------------------- commands

int cmd_synth_corpus(const std::string& out_dir, std::size_t genres, std::size_t clips,
                     double seconds, std::uint32_t sample_rate, std::uint64_t seed) {
  synth::SynthConfig cfg;
  cfg.genres = genres;
  cfg.clips_per_genre = clips;
  cfg.clip_seconds = seconds;
  cfg.sample_rate = sample_rate;
  cfg.seed = seed;
  const data::Manifest manifest = synth::write_corpus(out_dir, cfg);
  std::cout << "wrote " << manifest.entries.size() << " clips across "
            << manifest.registry.size() << " genres to " << out_dir << "\n";
  std::cout << "manifest: " << (fs::path(out_dir) / "manifest.json").string() << "\n";
  return 0;
}

int cmd_extract(const std::string& manifest_path, const std::string& out_path,
                std::size_t segments, std::size_t balance_to, std::uint64_t seed,
                const DspFlags& dsp_flags) {
  data::Manifest manifest = data::load_manifest(manifest_path);
  if (balance_to > 0) manifest = data::balance(manifest, balance_to, seed);
  const std::size_t threads = extraction_threads();
  const data::FeatureDataset ds =
      data::build_feature_dataset(manifest, segments, dsp_flags.to_config(), threads);
  data::save_features(ds, out_path);
  std::cout << "extracted " << ds.size() << " samples of shape (" << ds.frames << ", "
            << ds.n_mfcc << ") from " << manifest.entries.size() << " clips (" << threads
            << " thread" << (threads == 1 ? "" : "s") << ")\n";
  std::cout << "features: " << out_path << "\n";
  return 0;
}

int cmd_split(const std::string& features_path, const std::string& out_path,
              const std::string& ratios_text, std::size_t kfold, std::size_t fold,
              std::uint64_t seed) {
  const data::FeatureDataset ds = data::load_features(features_path);
  const data::SplitRatios ratios = data::parse_ratios(ratios_text);
  const data::SplitAssignment split = make_split(ds, kfold, fold, ratios, seed);
  data::save_split(split, seed, out_path);
  std::cout << "split " << ds.size() << " samples into " << split.train.size() << " / "
            << split.valid.size() << " / " << split.test.size() << " (train/valid/test)\n";
  std::cout << "split file: " << out_path << "\n";
  return 0;
}

struct TrainOptions {
  std::string features_path;
  std::string split_path;
  std::string out_dir;
  std::string model_kind = "dnn";
  int experiment = 0;  // 0 = ad hoc
  std::size_t epochs = 30;
  std::size_t batch_size = 32;
  double lr = 1e-4;
  std::string ratios_text = "8:1:1";
  std::size_t kfold = 0;
  std::size_t fold = 0;
  std::uint64_t seed = 0;
  bool extra_dropout = false;
  bool quiet = false;
};

int cmd_train(const TrainOptions& opt, const CLI::App* cmd) {
  const data::FeatureDataset ds = data::load_features(opt.features_path);

  std::string experiment_json;
  std::size_t epochs = opt.epochs;
  std::string ratios_text = opt.ratios_text;
  std::size_t kfold = opt.kfold, fold = opt.fold;
  bool extra_dropout = opt.extra_dropout;
  if (opt.experiment != 0) {
    models::ExperimentSpec spec = models::experiment(opt.experiment);
    spec.seed = opt.seed;
    // Experiment defaults; explicit flags override the row's values.
    if (cmd->count("--epochs") == 0) epochs = spec.epochs;
    if (cmd->count("--ratios") == 0) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%g:%g:%g", spec.ratios.train, spec.ratios.valid,
                    spec.ratios.test);
      ratios_text = buf;
    }
    if (cmd->count("--kfold") == 0) kfold = spec.kfold;
    if (cmd->count("--fold") == 0) fold = spec.fold_index;
    extra_dropout = extra_dropout || spec.extra_dropout;
    experiment_json = spec.to_json();
  }

  const data::SplitRatios ratios = data::parse_ratios(ratios_text);
  data::SplitAssignment split;
  if (!opt.split_path.empty()) {
    split = data::load_split(opt.split_path);
    data::validate_split(split, ds.size());
  } else {
    split = make_split(ds, kfold, fold, ratios, opt.seed);
  }

  models::ModelSpec mspec;
  mspec.kind = models::parse_model_kind(opt.model_kind);
  mspec.input_shape = {ds.frames, ds.n_mfcc};
  if (mspec.kind == models::ModelKind::Cnn) mspec.input_shape.push_back(1);
  mspec.num_classes = ds.num_classes;
  mspec.extra_dropout = extra_dropout;
  nn::Model<float> model = models::build_model<float>(mspec);

  train::TrainConfig tcfg;
  tcfg.epochs = epochs;
  tcfg.batch_size = opt.batch_size;
  tcfg.lr = opt.lr;
  tcfg.seed = opt.seed;
  if (!opt.quiet)
    tcfg.on_epoch = [&](std::size_t epoch, const train::EpochStats& s) {
      std::cout << "epoch " << (epoch + 1) << "/" << epochs << "  train_loss=" << fmt(s.train_loss)
                << " train_acc=" << fmt(s.train_accuracy) << "  valid_loss=" << fmt(s.valid_loss)
                << " valid_acc=" << fmt(s.valid_accuracy) << "  (" << fmt(s.seconds) << "s)\n";
    };

  nn::Adam<float> optimizer;
  train::TrainReport report = train::train(model, ds, split, tcfg, &optimizer);
  report.model_kind = opt.model_kind;
  report.experiment_json = experiment_json;

  fs::create_directories(opt.out_dir);
  const fs::path out(opt.out_dir);
  nn::save_checkpoint(out / "model.kmgrmodl", model, &optimizer);
  train::write_text_file(out / "report.json", train::report_to_json(report));
  train::write_text_file(out / "history.csv", train::report_to_csv(report));
  train::write_text_file(out / "curves.svg", train::report_to_svg(report));
  data::save_split(split, opt.seed, (out / "split.json").string());

  std::cout << "test_loss=" << fmt(report.test_loss)
            << " test_acc=" << fmt(report.test_accuracy) << "\n";
  std::cout << "checkpoint: " << (out / "model.kmgrmodl").string() << "\n";
  std::cout << "report: " << (out / "report.json").string() << "\n";
  return 0;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& features_path,
             const std::string& split_path, const std::string& part, const std::string& out_path) {
  nn::Model<float> model = models::load_model(checkpoint_path);
  const data::FeatureDataset ds = data::load_features(features_path);

  std::vector<std::uint32_t> indices;
  if (split_path.empty()) {
    indices.resize(ds.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = static_cast<std::uint32_t>(i);
  } else {
    const data::SplitAssignment split = data::load_split(split_path);
    data::validate_split(split, ds.size());
    if (part == "train")
      indices = split.train;
    else if (part == "valid")
      indices = split.valid;
    else if (part == "test")
      indices = split.test;
    else
      throw DataError("unknown split part '" + part + "' (expected train, valid or test)");
  }

  const train::EvalResult r = train::evaluate(model, ds, indices);
  std::cout << "samples=" << indices.size() << " loss=" << fmt(r.loss)
            << " accuracy=" << fmt(r.accuracy) << "\n";
  if (!out_path.empty()) {
    const json j{{"samples", indices.size()},
                 {"part", split_path.empty() ? "all" : part},
                 {"loss", r.loss},
                 {"accuracy", r.accuracy}};
    train::write_text_file(out_path, j.dump(2) + "\n");
    std::cout << "eval report: " << out_path << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& checkpoint_path, const std::string& wav_path,
                std::size_t segments, const std::string& manifest_path,
                const DspFlags& dsp_flags) {
  nn::Model<float> model = models::load_model(checkpoint_path);
  const audio::AudioClip clip = audio::read_wav(wav_path);
  const train::ClipPrediction pred =
      train::predict_clip(model, clip, segments, dsp_flags.to_config());

  std::vector<std::string> names;
  if (!manifest_path.empty()) names = data::load_manifest(manifest_path).registry.names();

  auto label = [&](std::size_t c) {
    return c < names.size() ? names[c] : "genre-" + std::to_string(c);
  };
  std::cout << "prediction: " << pred.genre_index << " (" << label(pred.genre_index) << ")\n";
  for (std::size_t c = 0; c < pred.probabilities.size(); ++c)
    std::cout << "  " << c << "  " << label(c) << "  " << fmt(pred.probabilities[c]) << "\n";
  return 0;
}

int cmd_gradcheck(const std::string& which, std::size_t seeds, double tolerance) {
  struct Row {
    std::string name;
    double max_rel_err = 0.0;
    std::size_t coords = 0;
  };
  std::vector<Row> rows;

  auto check_layer = [&](const std::string& name, auto make_layer,
                         const std::vector<std::size_t>& in_shape, bool positive_free) {
    if (which != "all" && which != name) return;
    Row row{name, 0.0, 0};
    for (std::size_t s = 0; s < seeds; ++s) {
      auto layer = make_layer();
      Rng rng(1000 + s);
      nn::Tensor<double> x(in_shape);
      for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
      if (positive_free)  // keep ReLU inputs away from the kink
        for (auto& v : x.data)
          if (std::abs(v) < 0.05) v = v < 0 ? v - 0.05 : v + 0.05;
      Rng init_rng(2000 + s);
      layer->init(init_rng);
      const nn::GradCheckReport r = nn::grad_check(*layer, x, 3000 + s);
      for (const auto& e : r.entries) {
        row.max_rel_err = std::max(row.max_rel_err, e.max_rel_err);
        row.coords += e.coords_checked;
      }
    }
    rows.push_back(row);
  };

  using namespace nn;
  check_layer("dense", [] { return std::make_unique<Dense<double>>(7, 5); }, {4, 7}, false);
  check_layer("relu", [] { return std::make_unique<ReLU<double>>(); }, {4, 9}, true);
  check_layer("softmax", [] { return std::make_unique<Softmax<double>>(); }, {4, 6}, false);
  check_layer("dropout", [] { return std::make_unique<Dropout<double>>(0.3); }, {4, 50}, false);
  check_layer("flatten", [] { return std::make_unique<Flatten<double>>(); }, {3, 4, 5}, false);
  check_layer("conv", [] { return std::make_unique<Conv2D<double>>(3, 3, 3, 4); }, {2, 6, 5, 3},
              false);
  check_layer("pool", [] { return std::make_unique<MaxPool2D<double>>(3, 3, 2); }, {2, 7, 6, 3},
              false);
  check_layer("bn", [] { return std::make_unique<BatchNorm<double>>(5); }, {4, 3, 2, 5}, false);

  if (which == "all" || which == "softmax-ce") {
    // The fused softmax + cross-entropy rule in isolation: a smooth
    // Flatten/Dense/Softmax stack, so finite differences never straddle a
    // ReLU kink and the comparison is purely about the (p - onehot)/B path.
    Row row{"softmax-ce", 0.0, 0};
    for (std::size_t s = 0; s < seeds; ++s) {
      nn::Model<double> model;
      model.input_shape = {2, 5};
      model.num_classes = 4;
      model.add(std::make_unique<Flatten<double>>());
      model.add(std::make_unique<Dense<double>>(10, 4));
      model.add(std::make_unique<Softmax<double>>());
      Rng init_rng(4000 + s);
      model.init(init_rng);
      Rng rng(5000 + s);
      nn::Tensor<double> x({3, 2, 5});
      for (auto& v : x.data) v = rng.uniform(-1.0, 1.0);
      std::vector<std::uint32_t> labels{0, 3, 1};
      const nn::GradCheckReport r = nn::grad_check_model(model, x, labels, 6000 + s);
      for (const auto& e : r.entries) {
        row.max_rel_err = std::max(row.max_rel_err, e.max_rel_err);
        row.coords += e.coords_checked;
      }
    }
    rows.push_back(row);
  }

  if (rows.empty())
    throw DataError("unknown layer '" + which +
                    "' (expected all, dense, relu, softmax, softmax-ce, dropout, flatten, conv, "
                    "pool or bn)");

  bool all_ok = true;
  std::printf("%-12s %-12s %-8s %s\n", "layer", "max_rel_err", "coords", "status");
  for (const Row& row : rows) {
    const bool ok = row.max_rel_err <= tolerance;
    all_ok = all_ok && ok;
    std::printf("%-12s %-12.3e %-8zu %s\n", row.name.c_str(), row.max_rel_err, row.coords,
                ok ? "ok" : "FAIL");
  }
  if (!all_ok) throw NumericError("gradient check exceeded tolerance");
  return 0;
}

int cmd_report(const std::string& report_path, const std::string& csv_path,
               const std::string& svg_path) {
  if (csv_path.empty() && svg_path.empty())
    throw DataError("report: nothing to do (pass --out-csv and/or --out-svg)");
  const train::TrainReport report = train::report_from_json(train::read_text_file(report_path));
  if (!csv_path.empty()) {
    train::write_text_file(csv_path, train::report_to_csv(report));
    std::cout << "csv: " << csv_path << "\n";
  }
  if (!svg_path.empty()) {
    train::write_text_file(svg_path, train::report_to_svg(report));
    std::cout << "svg: " << svg_path << "\n";
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"music-genre-recognition pipeline: synthesis, MFCC extraction, "
               "splitting, training, evaluation"};
  app.require_subcommand(1);

  ConfigOverlay config;
  int exit_code = 0;

  try {
    if (const auto config_path = find_config_arg(args)) config.load(*config_path);

    std::string dummy_config;  // --config consumed via prescan; registered so parsing accepts it

    // synth-corpus ---------------------------------------------------------
    auto* synth_cmd = app.add_subcommand("synth-corpus", "Generate the synthetic WAV corpus");
    std::string synth_out;
    std::size_t synth_genres = 8, synth_clips = 20;
    double synth_seconds = 30.0;
    std::uint32_t synth_rate = 22050;
    std::uint64_t synth_seed = 0;
    config.get("genres", synth_genres);
    config.get("clips", synth_clips);
    config.get("seconds", synth_seconds);
    config.get("sample-rate", synth_rate);
    config.get("seed", synth_seed);
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();
    synth_cmd->add_option("--genres", synth_genres, "Number of genres (2-8)");
    synth_cmd->add_option("--clips", synth_clips, "Clips per genre");
    synth_cmd->add_option("--seconds", synth_seconds, "Clip length in seconds");
    synth_cmd->add_option("--sample-rate", synth_rate, "Sample rate, Hz");
    synth_cmd->add_option("--seed", synth_seed, "Corpus seed");
    synth_cmd->add_option("--config", dummy_config, "JSON config file");
    synth_cmd->callback([&] {
      exit_code = cmd_synth_corpus(synth_out, synth_genres, synth_clips, synth_seconds,
                                   synth_rate, synth_seed);
    });

    // extract --------------------------------------------------------------
    auto* extract_cmd = app.add_subcommand("extract", "Extract MFCC features from a manifest");
    std::string extract_manifest, extract_out;
    std::size_t extract_segments = 30, extract_balance = 0;
    std::uint64_t extract_seed = 0;
    DspFlags extract_dsp;
    extract_dsp.apply(config);
    config.get("segments", extract_segments);
    config.get("balance", extract_balance);
    config.get("seed", extract_seed);
    extract_cmd->add_option("--manifest", extract_manifest, "Manifest JSON")->required();
    extract_cmd->add_option("--out", extract_out, "Output feature file")->required();
    extract_cmd->add_option("--segments", extract_segments, "Segments per clip");
    extract_cmd->add_option("--balance", extract_balance,
                            "Subsample each genre to this many clips first (0 = off)");
    extract_cmd->add_option("--seed", extract_seed, "Seed for the balancing shuffle");
    extract_dsp.add_to(extract_cmd);
    extract_cmd->add_option("--config", dummy_config, "JSON config file");
    extract_cmd->callback([&] {
      exit_code = cmd_extract(extract_manifest, extract_out, extract_segments, extract_balance,
                              extract_seed, extract_dsp);
    });

    // split ------------------------------------------------------------------
    auto* split_cmd = app.add_subcommand("split", "Write a train/valid/test split file");
    std::string split_features, split_out, split_ratios = "8:1:1";
    std::size_t split_kfold = 0, split_fold = 0;
    std::uint64_t split_seed = 0;
    config.get("ratios", split_ratios);
    config.get("kfold", split_kfold);
    config.get("fold", split_fold);
    config.get("seed", split_seed);
    split_cmd->add_option("--features", split_features, "Feature file")->required();
    split_cmd->add_option("--out", split_out, "Output split JSON")->required();
    split_cmd->add_option("--ratios", split_ratios, "train:valid:test, e.g. 7:1:2");
    split_cmd->add_option("--kfold", split_kfold, "Stratified fold count (0 = plain random split)");
    split_cmd->add_option("--fold", split_fold, "Fold index to split (with --kfold)");
    split_cmd->add_option("--seed", split_seed, "Shuffle seed");
    split_cmd->add_option("--config", dummy_config, "JSON config file");
    split_cmd->callback([&] {
      exit_code = cmd_split(split_features, split_out, split_ratios, split_kfold, split_fold,
                            split_seed);
    });

    // train ------------------------------------------------------------------
    auto* train_cmd = app.add_subcommand("train", "Train a model and write checkpoint + report");
    TrainOptions topt;
    config.get("model", topt.model_kind);
    config.get("epochs", topt.epochs);
    config.get("batch-size", topt.batch_size);
    config.get("lr", topt.lr);
    config.get("ratios", topt.ratios_text);
    config.get("kfold", topt.kfold);
    config.get("fold", topt.fold);
    config.get("seed", topt.seed);
    config.get("extra-dropout", topt.extra_dropout);
    train_cmd->add_option("--features", topt.features_path, "Feature file")->required();
    train_cmd->add_option("--out", topt.out_dir, "Output directory")->required();
    train_cmd->add_option("--model", topt.model_kind, "dnn or cnn");
    train_cmd->add_option("--experiment", topt.experiment, "Experiment row 1-6 to expand")
        ->check(CLI::Range(1, 6));
    train_cmd->add_option("--split", topt.split_path, "Reuse an existing split file");
    train_cmd->add_option("--epochs", topt.epochs, "Training epochs");
    train_cmd->add_option("--batch-size", topt.batch_size, "Mini-batch size");
    train_cmd->add_option("--lr", topt.lr, "Learning rate");
    train_cmd->add_option("--ratios", topt.ratios_text, "train:valid:test ratios");
    train_cmd->add_option("--kfold", topt.kfold, "Stratified fold count (0 = random split)");
    train_cmd->add_option("--fold", topt.fold, "Fold index (with --kfold)");
    train_cmd->add_option("--seed", topt.seed, "Master seed (init, shuffles, dropout)");
    train_cmd->add_flag("--extra-dropout", topt.extra_dropout,
                        "Add the sixth-experiment dropout layer");
    train_cmd->add_flag("--quiet", topt.quiet, "Suppress per-epoch progress lines");
    train_cmd->add_option("--config", dummy_config, "JSON config file");
    train_cmd->callback([&] { exit_code = cmd_train(topt, train_cmd); });

    // eval -------------------------------------------------------------------
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint on a feature file");
    std::string eval_checkpoint, eval_features, eval_split, eval_part = "test", eval_out;
    config.get("part", eval_part);
    eval_cmd->add_option("--checkpoint", eval_checkpoint, "Model checkpoint")->required();
    eval_cmd->add_option("--features", eval_features, "Feature file")->required();
    eval_cmd->add_option("--split", eval_split, "Split file (omit to use every sample)");
    eval_cmd->add_option("--part", eval_part, "train, valid or test (with --split)");
    eval_cmd->add_option("--out", eval_out, "Write result JSON here");
    eval_cmd->add_option("--config", dummy_config, "JSON config file");
    eval_cmd->callback([&] {
      exit_code = cmd_eval(eval_checkpoint, eval_features, eval_split, eval_part, eval_out);
    });

    // predict ----------------------------------------------------------------
    auto* predict_cmd = app.add_subcommand("predict", "Classify one WAV file");
    std::string predict_checkpoint, predict_wav, predict_manifest;
    std::size_t predict_segments = 30;
    DspFlags predict_dsp;
    predict_dsp.apply(config);
    config.get("segments", predict_segments);
    predict_cmd->add_option("--checkpoint", predict_checkpoint, "Model checkpoint")->required();
    predict_cmd->add_option("--wav", predict_wav, "Input WAV file")->required();
    predict_cmd->add_option("--segments", predict_segments, "Segments to cut the clip into");
    predict_cmd->add_option("--manifest", predict_manifest, "Manifest for genre names");
    predict_dsp.add_to(predict_cmd);
    predict_cmd->add_option("--config", dummy_config, "JSON config file");
    predict_cmd->callback([&] {
      exit_code = cmd_predict(predict_checkpoint, predict_wav, predict_segments, predict_manifest,
                              predict_dsp);
    });

    // gradcheck --------------------------------------------------------------
    auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient verification");
    std::string grad_layer = "all";
    std::size_t grad_seeds = 20;
    double grad_tolerance = 1e-4;
    config.get("seeds", grad_seeds);
    config.get("tolerance", grad_tolerance);
    grad_cmd->add_option("--layer", grad_layer, "Layer name or 'all'");
    grad_cmd->add_option("--seeds", grad_seeds, "Random instances per layer");
    grad_cmd->add_option("--tolerance", grad_tolerance, "Max relative error allowed");
    grad_cmd->add_option("--config", dummy_config, "JSON config file");
    grad_cmd->callback([&] { exit_code = cmd_gradcheck(grad_layer, grad_seeds, grad_tolerance); });

    // report -----------------------------------------------------------------
    auto* report_cmd = app.add_subcommand("report", "Convert a report JSON to CSV and/or SVG");
    std::string report_in, report_csv, report_svg;
    report_cmd->add_option("--report", report_in, "report.json from train")->required();
    report_cmd->add_option("--out-csv", report_csv, "History CSV path");
    report_cmd->add_option("--out-svg", report_svg, "Curve SVG path");
    report_cmd->add_option("--config", dummy_config, "JSON config file");
    report_cmd->callback([&] { exit_code = cmd_report(report_in, report_csv, report_svg); });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
    return exit_code;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<std::size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace kmgr::cli
