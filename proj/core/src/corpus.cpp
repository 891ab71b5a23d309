#include "labelvec/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "labelvec/csv.hpp"
#include "labelvec/error.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

std::optional<std::size_t> column_index(const std::string& column,
                                        const std::vector<std::string>& header) {
  if (!header.empty()) {
    auto it = std::find(header.begin(), header.end(), column);
    if (it != header.end()) return static_cast<std::size_t>(it - header.begin());
  }
  if (!column.empty() && std::all_of(column.begin(), column.end(),
                                     [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
    return static_cast<std::size_t>(std::stoul(column));
  }
  return std::nullopt;
}

Corpus load_jsonl(const fs::path& path, const LoadOptions& options) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto where = path.string() + ":" + std::to_string(line_no);
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": malformed JSON record: " + e.what());
    }
    if (!record.is_object() || !record.contains("id") || !record["id"].is_string() ||
        !record.contains("text") || !record["text"].is_string()) {
      throw InputError(where + ": record needs string fields \"id\" and \"text\"");
    }
    Document doc{record["id"].get<std::string>(), record["text"].get<std::string>(), std::nullopt};
    if (auto it = record.find("class"); it != record.end() && !it->is_null()) {
      if (!it->is_string()) throw InputError(where + ": \"class\" must be a string or null");
      doc.gold_class = it->get<std::string>();
    }
    docs.push_back(std::move(doc));
  }
  return Corpus(options.name.empty() ? path.stem().string() : options.name, std::move(docs),
                options.class_names);
}

Corpus load_csv(const fs::path& path, const LoadOptions& options) {
  const auto& mapping = options.csv;
  if (mapping.text_columns.empty()) throw InputError("csv mapping declares no text column");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path.string() + "'");
  CsvReader reader(in);

  std::vector<std::string> header;
  if (mapping.has_header) {
    if (auto row = reader.next()) header = std::move(*row);
  }
  auto resolve = [&](const std::string& column) {
    auto idx = column_index(column, header);
    if (!idx) throw InputError("csv column '" + column + "' not found in " + path.string());
    return *idx;
  };
  std::vector<std::size_t> text_idx;
  for (const auto& c : mapping.text_columns) text_idx.push_back(resolve(c));
  std::optional<std::size_t> class_idx;
  if (!mapping.class_column.empty()) class_idx = resolve(mapping.class_column);
  std::optional<std::size_t> id_idx;
  if (mapping.id_column) id_idx = resolve(*mapping.id_column);

  std::vector<Document> docs;
  std::size_t row_no = 0;
  while (auto row = reader.next()) {
    const auto where = path.string() + ":" + std::to_string(reader.record_line());
    if (row->size() == 1 && trim((*row)[0]).empty()) continue;
    auto field = [&](std::size_t idx) -> const std::string& {
      if (idx >= row->size()) {
        throw InputError(where + ": expected at least " + std::to_string(idx + 1) +
                         " columns, found " + std::to_string(row->size()));
      }
      return (*row)[idx];
    };
    Document doc;
    doc.id = id_idx ? field(*id_idx) : mapping.id_prefix + std::to_string(row_no);
    for (std::size_t i = 0; i < text_idx.size(); ++i) {
      const auto part = trim(field(text_idx[i]));
      if (part.empty()) continue;
      if (!doc.text.empty()) doc.text.push_back(' ');
      doc.text.append(part);
    }
    if (class_idx) {
      std::string raw(trim(field(*class_idx)));
      if (!mapping.label_map.empty()) {
        auto it = mapping.label_map.find(raw);
        if (it == mapping.label_map.end()) {
          throw InputError(where + ": label '" + raw + "' has no entry in the label map");
        }
        raw = it->second;
      }
      if (!raw.empty()) doc.gold_class = std::move(raw);
    }
    docs.push_back(std::move(doc));
    ++row_no;
  }
  return Corpus(options.name.empty() ? path.stem().string() : options.name, std::move(docs),
                options.class_names);
}

Corpus load_newsgroups_dir(const fs::path& root, const LoadOptions& options) {
  if (!fs::is_directory(root)) throw InputError("not a directory: '" + root.string() + "'");
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  std::vector<Document> docs;
  std::vector<std::string> classes = options.class_names;
  for (const auto& dir : class_dirs) {
    const auto cls = dir.filename().string();
    if (std::find(classes.begin(), classes.end(), cls) == classes.end()) classes.push_back(cls);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
      if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      docs.push_back({cls + "/" + file.filename().string(), read_file(file), cls});
    }
  }
  return Corpus(options.name.empty() ? root.filename().string() : options.name, std::move(docs),
                std::move(classes));
}

}  // namespace

Corpus::Corpus(std::string name, std::vector<Document> documents,
               std::vector<std::string> class_names)
    : name_(std::move(name)), documents_(std::move(documents)), class_names_(std::move(class_names)) {
  std::set<std::string, std::less<>> known(class_names_.begin(), class_names_.end());
  if (known.size() != class_names_.size()) throw ConsistencyError("duplicate class name in corpus declaration");
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (!index_.emplace(doc.id, i).second) {
      throw ConsistencyError("duplicate document id '" + doc.id + "' in corpus '" + name_ + "'");
    }
    if (doc.gold_class && known.insert(*doc.gold_class).second) {
      class_names_.push_back(*doc.gold_class);
    }
  }
}

const Document* Corpus::find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

bool Corpus::has_class(std::string_view name) const {
  return std::find(class_names_.begin(), class_names_.end(), name) != class_names_.end();
}

std::vector<std::pair<std::string, std::size_t>> Corpus::class_counts() const {
  std::vector<std::pair<std::string, std::size_t>> counts;
  std::unordered_map<std::string, std::size_t> pos;
  for (const auto& name : class_names_) {
    pos.emplace(name, counts.size());
    counts.emplace_back(name, 0);
  }
  for (const auto& doc : documents_) {
    if (doc.gold_class) ++counts[pos.at(*doc.gold_class)].second;
  }
  return counts;
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "jsonl") return CorpusFormat::kJsonl;
  if (name == "csv") return CorpusFormat::kCsv;
  if (name == "20news-dir") return CorpusFormat::kNewsgroupsDir;
  throw InputError("unknown corpus format '" + std::string(name) + "' (expected jsonl, csv or 20news-dir)");
}

std::string_view to_string(CorpusFormat format) {
  switch (format) {
    case CorpusFormat::kJsonl: return "jsonl";
    case CorpusFormat::kCsv: return "csv";
    case CorpusFormat::kNewsgroupsDir: return "20news-dir";
  }
  return "?";
}

Corpus load_corpus(const fs::path& path, CorpusFormat format, const LoadOptions& options) {
  switch (format) {
    case CorpusFormat::kJsonl: return load_jsonl(path, options);
    case CorpusFormat::kCsv: return load_csv(path, options);
    case CorpusFormat::kNewsgroupsDir: return load_newsgroups_dir(path, options);
  }
  throw InputError("unsupported corpus format");
}

void write_corpus_jsonl(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  for (const auto& doc : corpus) {
    nlohmann::ordered_json record;
    record["id"] = doc.id;
    record["text"] = doc.text;
    record["class"] = doc.gold_class ? json(*doc.gold_class) : json(nullptr);
    out << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

Corpus concat_splits(const Corpus& train, const Corpus& test) {
  std::vector<Document> docs;
  docs.reserve(train.size() + test.size());
  docs.insert(docs.end(), train.begin(), train.end());
  for (const auto& doc : test) {
    if (train.find(doc.id) != nullptr) {
      throw ConsistencyError("document id '" + doc.id + "' occurs in both splits");
    }
    docs.push_back(doc);
  }
  auto classes = train.class_names();
  for (const auto& name : test.class_names()) {
    if (std::find(classes.begin(), classes.end(), name) == classes.end()) classes.push_back(name);
  }
  return Corpus(train.name(), std::move(docs), std::move(classes));
}

std::size_t count_words(std::string_view text) {
  std::size_t words = 0;
  bool in_word = false;
  for (char c : text) {
    if (is_space(c)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

Corpus filter_short(const Corpus& corpus, std::size_t min_words) {
  if (min_words == 0) throw InputError("min_words must be at least 1");
  std::vector<Document> kept;
  for (const auto& doc : corpus) {
    if (count_words(doc.text) >= min_words) kept.push_back(doc);
  }
  return Corpus(corpus.name(), std::move(kept), corpus.class_names());
}

std::vector<std::string> sentence_tokenize(std::string_view text) {
  std::vector<std::string> sentences;
  auto emit = [&](std::string_view piece) {
    piece = trim(piece);
    if (!piece.empty()) sentences.emplace_back(piece);
  };
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if ((c == '.' || c == '!' || c == '?') && i + 1 < text.size() && is_space(text[i + 1])) {
      emit(text.substr(start, i + 1 - start));
      start = i + 1;
    }
  }
  if (start < text.size()) emit(text.substr(start));
  return sentences;
}

std::string Paragraph::text() const {
  std::string out;
  for (const auto& s : sentences) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  }
  return out;
}

std::vector<std::string> ParagraphSet::flatten() const {
  std::vector<std::string> all;
  for (const auto& p : paragraphs) all.insert(all.end(), p.sentences.begin(), p.sentences.end());
  return all;
}

ParagraphSet split_document(const Document& doc, std::size_t max_seq_len) {
  if (max_seq_len < 2) throw InputError("max_seq_len must be at least 2");
  ParagraphSet result{doc.id, {}};
  Paragraph open;
  for (auto& sentence : sentence_tokenize(doc.text)) {
    const auto words = count_words(sentence);
    // words(p) + words(s) < max_seq_len / 2, kept in integers.
    if (2 * (open.word_count + words) < max_seq_len) {
      open.sentences.push_back(std::move(sentence));
      open.word_count += words;
    } else {
      if (!open.sentences.empty()) result.paragraphs.push_back(std::move(open));
      open = Paragraph{{std::move(sentence)}, words};
    }
  }
  if (!open.sentences.empty()) result.paragraphs.push_back(std::move(open));
  return result;
}

std::vector<ClassSpec> parse_class_specs(const json& doc) {
  const json* classes = &doc;
  if (doc.is_object()) {
    if (!doc.contains("classes")) throw InputError("class-spec document has no \"classes\" array");
    classes = &doc.at("classes");
  }
  if (!classes->is_array()) throw InputError("\"classes\" must be an array");
  std::vector<ClassSpec> specs;
  for (const auto& entry : *classes) {
    if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string()) {
      throw InputError("class-spec entry needs a string \"name\"");
    }
    ClassSpec spec{entry["name"].get<std::string>(), {}};
    if (!entry.contains("keywords") || !entry["keywords"].is_array()) {
      throw InputError("class '" + spec.name + "' needs a \"keywords\" array");
    }
    for (const auto& kw : entry["keywords"]) {
      if (!kw.is_string()) throw InputError("class '" + spec.name + "' has a non-string keyword");
      spec.keywords.push_back(kw.get<std::string>());
    }
    specs.push_back(std::move(spec));
  }
  validate_class_specs(specs);
  return specs;
}

void validate_class_specs(const std::vector<ClassSpec>& specs) {
  if (specs.empty()) throw ConsistencyError("class-spec set is empty");
  std::set<std::string, std::less<>> seen;
  for (const auto& spec : specs) {
    if (spec.name.empty()) throw ConsistencyError("class-spec with empty name");
    if (!seen.insert(spec.name).second) throw ConsistencyError("duplicate class name '" + spec.name + "'");
    if (spec.keywords.empty()) throw ConsistencyError("class '" + spec.name + "' has no keywords");
    for (const auto& kw : spec.keywords) {
      if (trim(kw).empty()) throw ConsistencyError("class '" + spec.name + "' has an empty keyword");
    }
  }
}

std::vector<ClassSpec> load_class_specs(const fs::path& path) {
  json doc;
  try {
    doc = json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return parse_class_specs(doc);
}

std::vector<std::string> class_names_of(const std::vector<ClassSpec>& specs) {
  std::vector<std::string> names;
  names.reserve(specs.size());
  for (const auto& s : specs) names.push_back(s.name);
  return names;
}

}  // namespace labelvec
