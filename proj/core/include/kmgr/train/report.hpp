#pragma once

#include <filesystem>
#include <string>

#include "kmgr/train/trainer.hpp"

namespace kmgr::train {

/// Full report as pretty-printed JSON. Per-epoch wall-clock seconds are
/// included; strip them with report_signature_json for comparisons.
std::string report_to_json(const TrainReport& report);

/// The report minus every timing field — two runs of the same seed must
/// agree byte-for-byte on this form.
std::string report_signature_json(const TrainReport& report);

TrainReport report_from_json(const std::string& text);

/// CSV history: header "epoch,train_loss,train_acc,valid_loss,valid_acc".
std::string report_to_csv(const TrainReport& report);

/// Static SVG of the accuracy and loss curves over epochs.
std::string report_to_svg(const TrainReport& report);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace kmgr::train
