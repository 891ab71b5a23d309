#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "labelvec/corpus.hpp"
#include "labelvec/embeddings.hpp"
#include "labelvec/lsa.hpp"
#include "labelvec/predictions.hpp"
#include "labelvec/word2vec.hpp"

namespace labelvec {

/// Centroid of one class's keyword embeddings.
struct ClassVector {
  std::string class_name;
  Vector vector;
  std::size_t keyword_count = 0;
};

/// Centroid of the documents most similar to a class's keyword centroid.
struct LabelVector {
  std::string class_name;
  Vector vector;
  std::vector<std::string> candidate_ids;
  /// Cosine of each candidate to the keyword centroid, non-increasing.
  std::vector<double> candidate_similarities;
};

struct Candidate {
  std::size_t row = 0;  // row in the document matrix
  double similarity = 0.0;
};

/// Embeds one keyword of one class; throws if the keyword has no vector.
using KeywordEmbedder = std::function<Vector(const std::string& class_name, const std::string& keyword)>;

std::vector<ClassVector> keyword_class_vectors(const std::vector<ClassSpec>& specs, const KeywordEmbedder& embed);

/// Looks keywords up as (keyword, parent = class) first, then as a
/// parentless id. Throws ConsistencyError naming the first missing keyword.
std::vector<ClassVector> keyword_class_vectors(const std::vector<ClassSpec>& specs,
                                               const EmbeddingMatrix& keyword_matrix);

struct ScoringOptions {
  std::size_t jobs = 1;
  std::string method = "centroid-baseline";
};

/// Assigns each document to the class of highest cosine; ties go to the
/// first class in order and are counted. Zero document vectors are
/// excluded and listed.
PredictionSet classify_by_centroid(const EmbeddingMatrix& doc_vectors, const std::vector<ClassVector>& class_vectors,
                                   const ScoringOptions& options = {});

/// Top-k documents by cosine to the class vector, sorted by decreasing
/// similarity (row order breaks ties), optionally truncated at
/// `min_similarity`. Throws NumericError if nothing survives.
std::vector<Candidate> select_candidates(const EmbeddingMatrix& doc_vectors, const ClassVector& class_vector,
                                         std::size_t k, std::optional<double> min_similarity = std::nullopt);

struct CleanPolicy {
  enum class Kind { kNone, kSigma };
  Kind kind = Kind::kNone;
  double alpha = 1.0;

  static CleanPolicy none() { return {}; }
  static CleanPolicy sigma(double alpha) { return {Kind::kSigma, alpha}; }
  /// "none", "sigma(1.5)" or "sigma:1.5".
  static CleanPolicy parse(std::string_view text);
  std::string to_string() const;
};

/// sigma(a) drops candidates whose cosine to the candidate centroid is
/// below mean - a * stddev, always keeping at least one.
std::vector<Candidate> clean_candidates(const EmbeddingMatrix& doc_vectors, std::vector<Candidate> candidates,
                                        const CleanPolicy& policy);

struct LabelVectorConfig {
  std::size_t k = 100;
  std::optional<double> min_similarity;
  CleanPolicy clean;
  std::size_t jobs = 1;
};

std::vector<LabelVector> compute_label_vectors(const EmbeddingMatrix& doc_vectors,
                                               const std::vector<ClassVector>& class_vectors,
                                               const LabelVectorConfig& config = {});

PredictionSet classify_by_label_vectors(const EmbeddingMatrix& doc_vectors,
                                        const std::vector<LabelVector>& label_vectors,
                                        const ScoringOptions& options = {.jobs = 1, .method = "label-vector"});

// ---------------------------------------------------------------------------
// End-to-end pipeline

struct LsaEngine {
  const LsaModel& model;
};
struct Word2VecEngine {
  const WordEmbeddingTable& table;
};
/// Externally computed embeddings. `documents` holds either one vector per
/// document (kind document) or paragraph vectors whose parent is the
/// document id (kind paragraph); `keywords` holds keyword vectors.
struct ImportedEngine {
  const EmbeddingMatrix& documents;
  const EmbeddingMatrix& keywords;
};
using Engine = std::variant<LsaEngine, Word2VecEngine, ImportedEngine>;

std::string_view engine_name(const Engine& engine);

/// Document vectors and keyword centroids produced by one engine.
struct Representations {
  EmbeddingMatrix documents;
  std::vector<ClassVector> classes;
  /// Corpus documents the engine could not represent (no in-vocabulary
  /// token, no paragraph vectors).
  std::vector<std::string> unrepresented;
};

Representations represent(const Corpus& corpus, const std::vector<ClassSpec>& specs, const Engine& engine);

enum class Method { kCentroidBaseline, kLabelVector };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);

struct PipelineConfig {
  Method method = Method::kLabelVector;
  LabelVectorConfig label;
  std::size_t jobs = 1;
  std::string fingerprint;
};

/// Representations -> keyword centroids -> (label vectors) -> predictions.
PredictionSet run_pipeline(const Corpus& corpus, const std::vector<ClassSpec>& specs, const Engine& engine,
                           const PipelineConfig& config);

}  // namespace labelvec
