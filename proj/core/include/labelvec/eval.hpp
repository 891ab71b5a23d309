#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "labelvec/corpus.hpp"
#include "labelvec/predictions.hpp"

namespace labelvec {

/// Class name -> value, in class order.
using ClassValues = std::vector<std::pair<std::string, double>>;

struct MicroF1 {
  /// Excluded documents count as wrong predictions.
  double strict = 0.0;
  /// Over scored documents only.
  double scored_only = 0.0;
  std::size_t n_correct = 0;
  std::size_t n_scored = 0;
  std::size_t n_excluded = 0;
};

MicroF1 micro_f1_detail(const PredictionSet& predictions, const Corpus& gold);
/// Strict micro-F1. Throws ConsistencyError for ids missing from `gold`,
/// ids without a gold class or duplicated ids; InputError if nothing was
/// predicted.
double micro_f1(const PredictionSet& predictions, const Corpus& gold);

struct ClassF1 {
  std::string class_name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  /// Includes excluded documents of this gold class.
  std::size_t fn = 0;
  /// No gold and no predicted positives; f1 is reported as 0.
  bool flagged = false;

  std::size_t support() const { return tp + fn; }
};

std::vector<ClassF1> per_class_f1(const PredictionSet& predictions, const Corpus& gold);

/// counts[g][p]: scored documents of gold class g predicted as p.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  std::size_t trace() const;
};

ConfusionMatrix confusion_matrix(const PredictionSet& predictions, const Corpus& gold);

struct EvalReport {
  std::string dataset;
  std::string method;
  std::string engine;
  std::string config_fingerprint;
  double micro_f1 = 0.0;
  double micro_f1_scored_only = 0.0;
  std::vector<ClassF1> per_class;
  ConfusionMatrix confusion;
  std::size_t n_scored = 0;
  std::size_t n_excluded = 0;
  std::size_t ties = 0;

  ClassValues per_class_f1() const;
  nlohmann::ordered_json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
  std::string to_table() const;
  std::string per_class_csv() const;
};

EvalReport evaluate(const PredictionSet& predictions, const Corpus& gold);

void write_eval_report(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_eval_report(const std::filesystem::path& path);

struct CorrelationResult {
  double tau = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
  bool tie_corrected = false;

  nlohmann::ordered_json to_json() const;
};

/// Kendall tau-b with a two-sided p-value. Exact permutation p-value for
/// tie-free n <= 8, otherwise the normal approximation with tie-corrected
/// variance. Throws InputError for size mismatch, n < 2 or non-finite
/// values and NumericError if x or y is constant.
CorrelationResult kendall_tau(const std::vector<double>& x, const std::vector<double>& y);

/// Mean whitespace-token count of the documents of each class in
/// `corpus.class_names()`. Throws NumericError for a class without documents.
ClassValues avg_doc_words_per_class(const Corpus& corpus);

struct DatasetClassValues {
  std::string dataset;
  ClassValues values;
};

struct LengthF1Correlation {
  CorrelationResult result;
  /// "dataset/class" keys in input order, paired with lengths and f1.
  std::vector<std::string> keys;
  std::vector<double> lengths;
  std::vector<double> f1;

  nlohmann::ordered_json to_json() const;
};

/// Pools (length, F1) pairs over datasets by "dataset/class" key. Throws
/// ConsistencyError naming any key present on only one side.
LengthF1Correlation correlate_length_vs_f1(const std::vector<DatasetClassValues>& f1_by_dataset,
                                           const std::vector<DatasetClassValues>& lengths_by_dataset);

/// Reads a PredictionSet file or a two-column id,class CSV (optional
/// header). Every predicted class must be in `class_names`, otherwise
/// ConsistencyError.
PredictionSet import_predictions(const std::filesystem::path& path, const std::vector<std::string>& class_names);

}  // namespace labelvec
