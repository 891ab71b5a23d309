#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "labelvec/corpus.hpp"
#include "labelvec/embeddings.hpp"

namespace labelvec {

struct Word2VecConfig {
  std::size_t dim = 300;
  std::size_t window = 5;
  std::size_t negatives = 5;
  std::size_t epochs = 10;
  std::size_t min_count = 1;
  /// Initial step size, decayed linearly towards zero over training.
  double learning_rate = 0.025;
  std::uint64_t seed = 1;
  /// Single worker, bit-reproducible for a fixed seed. When unset, `jobs`
  /// workers update shared weights without synchronization.
  bool deterministic = true;
  std::size_t jobs = 1;

  nlohmann::json to_json() const;
};

/// Trained word vectors, one per vocabulary term.
class WordEmbeddingTable {
 public:
  WordEmbeddingTable() = default;
  explicit WordEmbeddingTable(EmbeddingMatrix vectors, Word2VecConfig config = {});

  const EmbeddingMatrix& vectors() const { return vectors_; }
  const Word2VecConfig& config() const { return config_; }
  std::size_t size() const { return vectors_.size(); }
  std::size_t dim() const { return vectors_.dim(); }

  std::optional<std::size_t> find(std::string_view term) const { return vectors_.find(term); }
  Eigen::Map<const Vector> vector(std::size_t index) const { return vectors_.vector(index); }

  /// Mean of the vectors of in-vocabulary tokens, one contribution per
  /// occurrence. Throws NumericError when no token is in the vocabulary.
  Vector average(const std::vector<std::string>& tokens) const;

 private:
  EmbeddingMatrix vectors_;
  Word2VecConfig config_;
};

/// Skip-gram with negative sampling over the corpus' term-tokenized
/// documents. Throws InputError on an empty corpus or empty vocabulary.
WordEmbeddingTable train_word2vec(const Corpus& corpus, const Word2VecConfig& config);

/// Average of the document's in-vocabulary word vectors.
Vector doc_vector_avg_words(const WordEmbeddingTable& table, const Document& doc);

}  // namespace labelvec
