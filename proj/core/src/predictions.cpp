#include "labelvec/predictions.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "labelvec/error.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string predictions_to_string(const PredictionSet& set) {
  std::ostringstream out;
  ordered_json header;
  header["method"] = set.method;
  header["engine"] = set.engine;
  header["config_fingerprint"] = set.config_fingerprint;
  header["classes"] = set.class_names;
  header["excluded"] = set.excluded;
  header["ties"] = set.ties;
  out << header.dump() << '\n';
  for (const auto& p : set.predictions) {
    ordered_json line;
    line["id"] = p.id;
    line["predicted"] = p.predicted;
    line["score"] = p.score ? ordered_json(*p.score) : ordered_json(nullptr);
    if (!p.scores.empty()) {
      if (p.scores.size() != set.class_names.size()) {
        throw ConsistencyError("prediction '" + p.id + "' has " + std::to_string(p.scores.size()) +
                               " scores for " + std::to_string(set.class_names.size()) + " classes");
      }
      ordered_json scores = ordered_json::object();
      for (std::size_t c = 0; c < p.scores.size(); ++c) scores[set.class_names[c]] = p.scores[c];
      line["scores"] = std::move(scores);
    } else {
      line["scores"] = nullptr;
    }
    out << line.dump() << '\n';
  }
  return out.str();
}

void write_predictions(const PredictionSet& set, const fs::path& path) {
  const auto text = predictions_to_string(set);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

PredictionSet read_predictions(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open predictions '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty predictions file");
  PredictionSet set;
  std::unordered_map<std::string, std::size_t> class_index;
  try {
    const auto header = ordered_json::parse(line);
    set.method = header.value("method", std::string{});
    set.engine = header.value("engine", std::string{});
    set.config_fingerprint = header.value("config_fingerprint", std::string{});
    if (header.contains("classes")) set.class_names = header["classes"].get<std::vector<std::string>>();
    if (header.contains("excluded")) set.excluded = header["excluded"].get<std::vector<std::string>>();
    set.ties = header.value("ties", std::size_t{0});
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": malformed header: " + e.what());
  }
  auto index_of = [&](const std::string& name) {
    auto [it, inserted] = class_index.emplace(name, set.class_names.size());
    if (inserted) set.class_names.push_back(name);
    return it->second;
  };
  for (std::size_t i = 0; i < set.class_names.size(); ++i) class_index.emplace(set.class_names[i], i);

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    try {
      const auto rec = ordered_json::parse(line);
      Prediction p;
      p.id = rec.at("id").get<std::string>();
      p.predicted = rec.at("predicted").get<std::string>();
      index_of(p.predicted);
      if (rec.contains("score") && !rec["score"].is_null()) p.score = rec["score"].get<double>();
      if (rec.contains("scores") && !rec["scores"].is_null()) {
        std::vector<std::pair<std::size_t, double>> entries;
        for (const auto& [name, value] : rec["scores"].items()) entries.emplace_back(index_of(name), value.get<double>());
        p.scores.assign(set.class_names.size(), 0.0);
        if (entries.size() != set.class_names.size()) {
          throw InputError(where + ": score list does not cover every class");
        }
        for (const auto& [idx, value] : entries) p.scores[idx] = value;
      }
      set.predictions.push_back(std::move(p));
    } catch (const json::exception& e) {
      throw InputError(where + ": " + e.what());
    }
  }
  return set;
}

}  // namespace labelvec
