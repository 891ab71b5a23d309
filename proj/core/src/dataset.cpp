#include "labelvec/dataset.hpp"

#include <fstream>
#include <iterator>

#include <nlohmann/json.hpp>

#include "labelvec/error.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kSplitTotalKey = "*";

std::string column_name(const json& value, const std::string& field) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_unsigned()) return std::to_string(value.get<std::size_t>());
  throw InputError("manifest csv." + field + " must be a column name or index");
}

std::size_t count_for(const Corpus& corpus, const std::string& cls) {
  if (cls == kSplitTotalKey) return corpus.size();
  std::size_t n = 0;
  for (const auto& doc : corpus) n += (doc.gold_class && *doc.gold_class == cls) ? 1 : 0;
  return n;
}

}  // namespace

DatasetManifest parse_manifest(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw InputError("manifest must be a JSON object");
  DatasetManifest m;
  m.base_dir = base_dir;
  try {
    m.name = doc.value("name", std::string{});
    m.format = parse_corpus_format(doc.value("format", std::string{"jsonl"}));
    if (!doc.contains("splits") || !doc["splits"].is_array() || doc["splits"].empty()) {
      throw InputError("manifest needs a non-empty \"splits\" array");
    }
    for (const auto& s : doc["splits"]) {
      m.splits.push_back({s.at("name").get<std::string>(), fs::path(s.at("path").get<std::string>())});
    }
    if (auto it = doc.find("csv"); it != doc.end()) {
      const auto& c = *it;
      m.csv.has_header = c.value("header", false);
      if (c.contains("id") && !c["id"].is_null()) m.csv.id_column = column_name(c["id"], "id");
      if (c.contains("text")) {
        if (c["text"].is_array()) {
          for (const auto& t : c["text"]) m.csv.text_columns.push_back(column_name(t, "text"));
        } else {
          m.csv.text_columns.push_back(column_name(c["text"], "text"));
        }
      }
      if (c.contains("class") && !c["class"].is_null()) m.csv.class_column = column_name(c["class"], "class");
    }
    if (auto it = doc.find("label_map"); it != doc.end()) {
      for (const auto& [raw, name] : it->items()) m.csv.label_map[raw] = name.get<std::string>();
    }
    if (auto it = doc.find("classes"); it != doc.end()) {
      m.class_names = it->get<std::vector<std::string>>();
    }
    if (auto it = doc.find("min_words"); it != doc.end() && !it->is_null()) {
      m.min_words = it->get<std::size_t>();
      if (*m.min_words == 0) throw InputError("manifest min_words must be positive");
    }
    if (auto it = doc.find("expected_counts"); it != doc.end()) {
      for (const auto& [split, counts] : it->items()) {
        for (const auto& [cls, n] : counts.items()) m.expected_counts[split][cls] = n.get<std::size_t>();
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("invalid manifest: ") + e.what());
  }
  return m;
}

DatasetManifest load_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open manifest '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return parse_manifest(doc, path.parent_path());
}

bool IngestReport::ok() const {
  for (const auto& c : checks) {
    if (!c.ok()) return false;
  }
  return true;
}

std::vector<CountCheck> IngestReport::failures() const {
  std::vector<CountCheck> out;
  for (const auto& c : checks) {
    if (!c.ok()) out.push_back(c);
  }
  return out;
}

nlohmann::ordered_json IngestReport::to_json() const {
  nlohmann::ordered_json out;
  out["dataset"] = dataset;
  out["ok"] = ok();
  out["split_sizes"] = split_sizes;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    arr.push_back({{"split", c.split}, {"class", c.class_name}, {"expected", c.expected},
                   {"actual", c.actual}, {"ok", c.ok()}});
  }
  out["checks"] = std::move(arr);
  out["removed_short"] = removed_short;
  out["final_size"] = final_size;
  return out;
}

IngestResult ingest(const DatasetManifest& manifest) {
  IngestReport report;
  report.dataset = manifest.name;

  std::optional<Corpus> combined;
  std::map<std::string, Corpus> by_split;
  for (const auto& split : manifest.splits) {
    LoadOptions options;
    options.name = manifest.name;
    options.csv = manifest.csv;
    options.csv.id_prefix = split.name + "-";
    options.class_names = manifest.class_names;
    const auto path = split.path.is_absolute() ? split.path : manifest.base_dir / split.path;
    if (!fs::exists(path)) throw InputError("split '" + split.name + "': missing file '" + path.string() + "'");
    auto part = load_corpus(path, manifest.format, options);
    report.split_sizes[split.name] = part.size();
    combined = combined ? concat_splits(*combined, part) : part;
    by_split.emplace(split.name, std::move(part));
  }

  for (const auto& [split, counts] : manifest.expected_counts) {
    const Corpus* target = nullptr;
    if (split == "total") {
      target = &*combined;
    } else if (auto it = by_split.find(split); it != by_split.end()) {
      target = &it->second;
    } else {
      throw ConsistencyError("expected_counts names unknown split '" + split + "'");
    }
    for (const auto& [cls, expected] : counts) {
      report.checks.push_back({split, cls, expected, count_for(*target, cls)});
    }
  }

  Corpus corpus = std::move(*combined);
  if (manifest.min_words) {
    const auto before = corpus.size();
    corpus = filter_short(corpus, *manifest.min_words);
    report.removed_short = before - corpus.size();
  }
  report.final_size = corpus.size();
  return {std::move(corpus), std::move(report)};
}

}  // namespace labelvec
