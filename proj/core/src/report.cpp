#include "kmgr/train/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "kmgr/util/error.hpp"

namespace kmgr::train {

using nlohmann::json;

namespace {

constexpr const char* kLossNote =
    "loss_percent is mean cross-entropy scaled by 100, provided for side-by-side "
    "reading with percentage-styled loss tables; the loss itself is unitless";

json report_json(const TrainReport& report, bool include_timing) {
  json epochs = json::array();
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const EpochStats& s = report.epochs[e];
    json row{{"epoch", e},
             {"train_loss", s.train_loss},
             {"train_accuracy", s.train_accuracy},
             {"valid_loss", s.valid_loss},
             {"valid_accuracy", s.valid_accuracy}};
    if (include_timing) row["seconds"] = s.seconds;
    epochs.push_back(std::move(row));
  }
  json j{{"version", 1},
         {"seed", report.seed},
         {"model_kind", report.model_kind},
         {"batch_size", report.batch_size},
         {"learning_rate", report.learning_rate},
         {"epochs", std::move(epochs)},
         {"test",
          {{"loss", report.test_loss},
           {"accuracy", report.test_accuracy},
           {"loss_percent", report.test_loss * 100.0}}},
         {"notes", json::array({kLossNote})}};
  if (report.experiment_json.empty())
    j["experiment"] = nullptr;
  else
    j["experiment"] = json::parse(report.experiment_json);
  return j;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.8g", v);
  return buf;
}

}  // namespace

std::string report_to_json(const TrainReport& report) { return report_json(report, true).dump(2) + "\n"; }

std::string report_signature_json(const TrainReport& report) {
  return report_json(report, false).dump(2) + "\n";
}

TrainReport report_from_json(const std::string& text) {
  TrainReport report;
  try {
    const json j = json::parse(text);
    report.seed = j.at("seed").get<std::uint64_t>();
    report.model_kind = j.at("model_kind").get<std::string>();
    report.batch_size = j.at("batch_size").get<std::size_t>();
    report.learning_rate = j.at("learning_rate").get<double>();
    for (const auto& row : j.at("epochs")) {
      EpochStats s;
      s.train_loss = row.at("train_loss").get<double>();
      s.train_accuracy = row.at("train_accuracy").get<double>();
      s.valid_loss = row.at("valid_loss").get<double>();
      s.valid_accuracy = row.at("valid_accuracy").get<double>();
      s.seconds = row.value("seconds", 0.0);
      report.epochs.push_back(s);
    }
    report.test_loss = j.at("test").at("loss").get<double>();
    report.test_accuracy = j.at("test").at("accuracy").get<double>();
    if (j.contains("experiment") && !j.at("experiment").is_null())
      report.experiment_json = j.at("experiment").dump(2);
  } catch (const json::exception& e) {
    throw DataError(std::string("bad report JSON: ") + e.what());
  }
  return report;
}

std::string report_to_csv(const TrainReport& report) {
  std::ostringstream oss;
  oss << "epoch,train_loss,train_acc,valid_loss,valid_acc\n";
  for (std::size_t e = 0; e < report.epochs.size(); ++e) {
    const EpochStats& s = report.epochs[e];
    oss << e << ',' << fmt(s.train_loss) << ',' << fmt(s.train_accuracy) << ','
        << fmt(s.valid_loss) << ',' << fmt(s.valid_accuracy) << '\n';
  }
  return oss.str();
}

namespace {

/// One polyline through (epoch, value) points mapped into a plot rectangle.
std::string polyline(const std::vector<double>& values, double vmin, double vmax, double x0,
                     double y0, double width, double height, const char* color) {
  std::ostringstream oss;
  oss << "  <polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  const double span = vmax - vmin > 1e-12 ? vmax - vmin : 1.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double fx = values.size() > 1 ? static_cast<double>(i) / (values.size() - 1) : 0.5;
    const double fy = (values[i] - vmin) / span;
    oss << fmt(x0 + fx * width) << ',' << fmt(y0 + height - fy * height) << ' ';
  }
  oss << "\"/>\n";
  return oss.str();
}

std::string panel(const char* title, const std::vector<double>& train,
                  const std::vector<double>& valid, double vmin, double vmax, double y_top) {
  const double x0 = 60, width = 600, height = 140;
  std::ostringstream oss;
  oss << "  <text x=\"" << fmt(x0) << "\" y=\"" << fmt(y_top - 8)
      << "\" font-size=\"13\" font-family=\"sans-serif\">" << title << "</text>\n";
  oss << "  <rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y_top) << "\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  oss << "  <text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y_top + 10)
      << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">" << fmt(vmax)
      << "</text>\n";
  oss << "  <text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(y_top + height)
      << "\" font-size=\"10\" font-family=\"sans-serif\" text-anchor=\"end\">" << fmt(vmin)
      << "</text>\n";
  if (!train.empty()) {
    oss << polyline(train, vmin, vmax, x0, y_top, width, height, "#1f77b4");
    oss << polyline(valid, vmin, vmax, x0, y_top, width, height, "#ff7f0e");
  }
  return oss.str();
}

}  // namespace

std::string report_to_svg(const TrainReport& report) {
  std::vector<double> tr_acc, va_acc, tr_loss, va_loss;
  double loss_max = 0.0;
  for (const EpochStats& s : report.epochs) {
    tr_acc.push_back(s.train_accuracy);
    va_acc.push_back(s.valid_accuracy);
    tr_loss.push_back(s.train_loss);
    va_loss.push_back(s.valid_loss);
    loss_max = std::max({loss_max, s.train_loss, s.valid_loss});
  }
  if (loss_max <= 0.0) loss_max = 1.0;

  std::ostringstream oss;
  oss << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"420\" "
         "viewBox=\"0 0 720 420\">\n";
  oss << "  <rect width=\"720\" height=\"420\" fill=\"white\"/>\n";
  oss << panel("Accuracy over epochs (train blue, valid orange)", tr_acc, va_acc, 0.0, 1.0, 40);
  oss << panel("Loss over epochs (train blue, valid orange)", tr_loss, va_loss, 0.0, loss_max, 240);
  if (report.epochs.empty())
    oss << "  <text x=\"360\" y=\"210\" font-size=\"13\" font-family=\"sans-serif\" "
           "text-anchor=\"middle\">no epochs recorded</text>\n";
  oss << "</svg>\n";
  return oss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path.string());
  os << content;
  if (!os) throw DataError("write failure: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  std::ostringstream oss;
  oss << is.rdbuf();
  return oss.str();
}

}  // namespace kmgr::train
