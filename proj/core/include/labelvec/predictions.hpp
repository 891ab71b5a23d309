#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace labelvec {

struct Prediction {
  std::string id;
  std::string predicted;
  /// Winning score; absent for imported label-only predictions.
  std::optional<double> score;
  /// One score per class in PredictionSet::class_names order, or empty.
  std::vector<double> scores;

  bool operator==(const Prediction&) const = default;
};

/// Per-document predicted class with scores. For every prediction with a
/// score list, `predicted` is the first class attaining the maximum.
struct PredictionSet {
  std::string method;
  std::string engine;
  std::string config_fingerprint;
  std::vector<std::string> class_names;
  std::vector<Prediction> predictions;
  /// Documents that could not be scored (zero or missing vectors).
  std::vector<std::string> excluded;
  /// Predictions whose maximum score was shared by more than one class.
  std::size_t ties = 0;

  bool operator==(const PredictionSet&) const = default;
};

/// Header line {"method","engine","config_fingerprint","classes",
/// "excluded","ties"} followed by {"id","predicted","score","scores"} per
/// document, scores keyed by class name in class order.
void write_predictions(const PredictionSet& predictions, const std::filesystem::path& path);
std::string predictions_to_string(const PredictionSet& predictions);
PredictionSet read_predictions(const std::filesystem::path& path);

}  // namespace labelvec
