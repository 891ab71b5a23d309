#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/SparseCore>

#include "labelvec/corpus.hpp"
#include "labelvec/embeddings.hpp"
#include "labelvec/svd.hpp"

namespace labelvec {

/// Terms x documents, TF-IDF weighted: w(t, d) = tf(t, d) * ln(N / df(t)).
struct TermDocumentMatrix {
  std::vector<std::string> terms;
  std::vector<std::string> doc_ids;
  Eigen::VectorXd idf;
  Eigen::SparseMatrix<double> weights;
};

TermDocumentMatrix build_tfidf(const Corpus& corpus);

/// Latent semantic analysis model. Documents are represented by the rows
/// of V; new token lists are folded in as pseudo-documents through
/// diag(1/s) U^T q, which reproduces V's rows for training documents.
class LsaModel {
 public:
  LsaModel() = default;
  LsaModel(std::vector<std::string> terms, Eigen::VectorXd idf, std::vector<std::string> doc_ids,
           TruncatedSvd factors);

  std::size_t n_concepts() const { return static_cast<std::size_t>(factors_.rank()); }
  std::size_t vocabulary_size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::string>& doc_ids() const { return doc_ids_; }
  const Eigen::VectorXd& idf() const { return idf_; }
  const Eigen::VectorXd& singular_values() const { return factors_.singular_values; }
  const TruncatedSvd& factors() const { return factors_; }

  std::optional<std::size_t> term_index(std::string_view term) const;

  /// Folds in a raw-TF pseudo-document. Out-of-vocabulary tokens are
  /// skipped; throws NumericError if none remain.
  Vector project(const std::vector<std::string>& tokens) const;
  /// Folds in an already-weighted term vector.
  Vector project_weighted(const VectorRef& term_weights) const;

  /// Concept-space representation of the i-th training document.
  Vector document_vector(std::size_t i) const { return factors_.right.row(static_cast<Eigen::Index>(i)).transpose(); }
  EmbeddingMatrix document_matrix() const;

  /// U diag(s) V^T.
  Eigen::MatrixXd reconstruct() const { return factors_.reconstruct(); }

  /// A non-empty fingerprint is stored as "config_fingerprint".
  void save(const std::filesystem::path& path, const std::string& fingerprint = {}) const;
  static LsaModel load(const std::filesystem::path& path);

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> vocabulary_;
  Eigen::VectorXd idf_;
  std::vector<std::string> doc_ids_;
  TruncatedSvd factors_;
};

/// Throws InputError if n_concepts exceeds min(#terms, #documents) and
/// NumericError if a kept singular value is numerically zero.
LsaModel fit_lsa(const TermDocumentMatrix& matrix, std::size_t n_concepts, const SvdOptions& options = {});
LsaModel fit_lsa(const Corpus& corpus, std::size_t n_concepts, const SvdOptions& options = {});

}  // namespace labelvec
