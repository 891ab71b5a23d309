#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace labelvec {

struct Document {
  std::string id;
  std::string text;
  std::optional<std::string> gold_class;
};

/// An ordered, id-unique collection of documents. Immutable once built;
/// every non-null gold class is a member of class_names().
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::string name, std::vector<Document> documents,
         std::vector<std::string> class_names = {});

  const std::string& name() const { return name_; }
  const std::vector<Document>& documents() const { return documents_; }
  /// Class names in first-seen (or declared) order.
  const std::vector<std::string>& class_names() const { return class_names_; }

  std::size_t size() const { return documents_.size(); }
  bool empty() const { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  const Document* find(std::string_view id) const;
  bool has_class(std::string_view name) const;

  /// Member count per class, in class_names() order.
  std::vector<std::pair<std::string, std::size_t>> class_counts() const;

  auto begin() const { return documents_.begin(); }
  auto end() const { return documents_.end(); }

 private:
  std::string name_;
  std::vector<Document> documents_;
  std::vector<std::string> class_names_;
  std::unordered_map<std::string, std::size_t> index_;
};

enum class CorpusFormat { kJsonl, kCsv, kNewsgroupsDir };

CorpusFormat parse_corpus_format(std::string_view name);
std::string_view to_string(CorpusFormat format);

/// How CSV columns map onto documents. Columns are zero-based indices or
/// header names (when has_header is set). Multiple text columns are joined
/// with a single space.
struct CsvMapping {
  bool has_header = false;
  std::optional<std::string> id_column;
  std::vector<std::string> text_columns;
  std::string class_column;
  /// Raw label value -> descriptive class name. Empty means identity.
  std::map<std::string, std::string> label_map;
  /// Prefix for generated ids when there is no id column ("<prefix><row>").
  std::string id_prefix;
};

struct LoadOptions {
  std::string name;
  CsvMapping csv;
  /// Declared class order; classes seen in the data but not declared are
  /// appended in first-seen order.
  std::vector<std::string> class_names;
};

/// Loads a corpus. jsonl: {"id","text","class"} per line. csv: RFC 4180
/// with the mapping in `options.csv`. 20news-dir: one subdirectory per
/// class, one file per document, ids are "<class>/<file>".
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format,
                   const LoadOptions& options = {});

void write_corpus_jsonl(const Corpus& corpus, const std::filesystem::path& path);

/// Train then test. Class order is train's, extended by any test-only class.
Corpus concat_splits(const Corpus& train, const Corpus& test);

/// Keeps documents with at least `min_words` whitespace-delimited tokens.
Corpus filter_short(const Corpus& corpus, std::size_t min_words);

/// Number of maximal runs of non-whitespace characters.
std::size_t count_words(std::string_view text);

/// Splits after '.', '!' or '?' when followed by whitespace. A trailing
/// unterminated fragment is its own sentence. Sentences are the original
/// substrings with surrounding whitespace trimmed; inter-sentence
/// whitespace is dropped, internal whitespace is kept as-is.
std::vector<std::string> sentence_tokenize(std::string_view text);

struct Paragraph {
  std::vector<std::string> sentences;
  std::size_t word_count = 0;

  /// Sentences joined by single spaces.
  std::string text() const;
};

struct ParagraphSet {
  std::string doc_id;
  std::vector<Paragraph> paragraphs;

  /// All sentences in order.
  std::vector<std::string> flatten() const;
};

/// Greedy paragraph packing for encoders with a `max_seq_len` word budget.
/// A sentence joins the open paragraph iff the combined word count stays
/// strictly below max_seq_len / 2; otherwise the open paragraph is closed
/// and the sentence starts the next one. The last paragraph is emitted.
ParagraphSet split_document(const Document& doc, std::size_t max_seq_len);

struct ClassSpec {
  std::string name;
  std::vector<std::string> keywords;
};

/// Reads {"classes": [{"name": ..., "keywords": [...]}, ...]}.
std::vector<ClassSpec> load_class_specs(const std::filesystem::path& path);
std::vector<ClassSpec> parse_class_specs(const nlohmann::json& doc);
void validate_class_specs(const std::vector<ClassSpec>& specs);

std::vector<std::string> class_names_of(const std::vector<ClassSpec>& specs);

}  // namespace labelvec
