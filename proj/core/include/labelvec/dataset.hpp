#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "labelvec/corpus.hpp"

namespace labelvec {

/// Declarative description of a dataset on disk: where its splits live,
/// how to read them, and what class counts to expect.
///
///   {
///     "name": "medical_abstracts",
///     "format": "csv",
///     "splits": [{"name": "train", "path": "medical_tc_train.csv"}, ...],
///     "csv": {"header": true, "text": ["medical_abstract"],
///             "class": "condition_label", "id": null},
///     "label_map": {"1": "Neoplasms", ...},
///     "classes": ["Neoplasms", ...],
///     "min_words": 2,
///     "expected_counts": {"train": {"Neoplasms": 2530, ...}, ...}
///   }
///
/// Relative split paths resolve against the data directory, which is the
/// manifest's own directory unless overridden.
struct DatasetManifest {
  struct Split {
    std::string name;
    std::filesystem::path path;
  };

  std::string name;
  CorpusFormat format = CorpusFormat::kJsonl;
  std::vector<Split> splits;
  CsvMapping csv;
  std::vector<std::string> class_names;
  std::optional<std::size_t> min_words;
  /// split name (or "total") -> class -> expected member count.
  std::map<std::string, std::map<std::string, std::size_t>> expected_counts;
  std::filesystem::path base_dir;
};

DatasetManifest parse_manifest(const nlohmann::json& doc, const std::filesystem::path& base_dir);
DatasetManifest load_manifest(const std::filesystem::path& path);

struct CountCheck {
  std::string split;  // split name or "total"
  std::string class_name;  // class name or "*" for the split total
  std::size_t expected = 0;
  std::size_t actual = 0;
  bool ok() const { return expected == actual; }
};

struct IngestReport {
  std::string dataset;
  std::map<std::string, std::size_t> split_sizes;
  std::vector<CountCheck> checks;
  std::size_t removed_short = 0;
  std::size_t final_size = 0;

  bool ok() const;
  std::vector<CountCheck> failures() const;
  nlohmann::ordered_json to_json() const;
};

struct IngestResult {
  Corpus corpus;
  IngestReport report;
};

/// Loads every split, checks declared counts against the raw splits and
/// their concatenation, then applies the short-document filter if the
/// manifest asks for one. Count mismatches are reported, not thrown.
IngestResult ingest(const DatasetManifest& manifest);

}  // namespace labelvec
