#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

namespace labelvec {

using Vector = Eigen::VectorXd;
using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

/// u.v / (|u| |v|). Throws NumericError if either vector is zero and
/// InputError on a dimension mismatch.
double cosine(const VectorRef& u, const VectorRef& v);

/// Componentwise mean. Throws on an empty list or mismatched dimensions.
Vector mean_vector(const std::vector<Vector>& vectors);

/// L2-normalized copy; throws NumericError on the zero vector.
Vector normalized(const VectorRef& v);

enum class EmbeddingKind { kWord, kParagraph, kDocument, kKeyword };

std::string_view to_string(EmbeddingKind kind);
EmbeddingKind parse_embedding_kind(std::string_view name);

/// Dense id-indexed vectors of one fixed dimension.
///
/// Ids are unique, except for keyword matrices where the key is the
/// (parent, id) pair: the same keyword may describe several classes.
/// When `normalized()` is set every row has unit L2 norm (within 1e-5).
class EmbeddingMatrix {
 public:
  static constexpr double kNormTolerance = 1e-5;

  EmbeddingMatrix() = default;
  EmbeddingMatrix(EmbeddingKind kind, std::size_t dim, std::string source = {}, bool normalized = false);

  EmbeddingKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool normalized() const { return normalized_; }
  const std::string& source() const { return source_; }

  const std::string& id(std::size_t row) const { return ids_[row]; }
  const std::optional<std::string>& parent(std::size_t row) const { return parents_[row]; }
  const std::vector<std::string>& ids() const { return ids_; }

  Eigen::Map<const Vector> vector(std::size_t row) const {
    return Eigen::Map<const Vector>(values_.data() + row * dim_, static_cast<Eigen::Index>(dim_));
  }
  /// All rows as a size() x dim() matrix view.
  Eigen::Map<const RowMatrix> data() const {
    return Eigen::Map<const RowMatrix>(values_.data(), static_cast<Eigen::Index>(size()),
                                       static_cast<Eigen::Index>(dim_));
  }

  std::optional<std::size_t> find(std::string_view id) const;
  std::optional<std::size_t> find(std::string_view id, std::string_view parent) const;

  /// Rows whose parent equals `parent`, in insertion order.
  std::vector<std::size_t> children(std::string_view parent) const;

  void reserve(std::size_t rows);
  void add(std::string id, std::optional<std::string> parent, const VectorRef& values);

  /// Checks row norms when the normalized flag is set.
  void validate() const;

  /// Copy with every row scaled to unit norm (zero rows are an error).
  EmbeddingMatrix normalized_copy() const;

 private:
  std::string key_for(std::string_view id, const std::optional<std::string>& parent) const;

  EmbeddingKind kind_ = EmbeddingKind::kDocument;
  std::size_t dim_ = 0;
  std::string source_;
  bool normalized_ = false;
  std::vector<std::string> ids_;
  std::vector<std::optional<std::string>> parents_;
  std::vector<double> values_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_map<std::string, std::vector<std::size_t>> children_;
};

enum class EmbeddingFileFormat { kJsonl, kPacked };

/// JSONL: header {"dim","model","kind","normalized"} then one
/// {"id","parent","vector"} per line, numbers at f32 precision.
/// Packed: "LVK1", u32 dim, u64 count, then per record u16 id length,
/// id bytes, u16 parent length, parent bytes, dim x f32 (all little endian).
void write_embedding_file(const EmbeddingMatrix& matrix, const std::filesystem::path& path,
                          EmbeddingFileFormat format = EmbeddingFileFormat::kJsonl);

struct EmbeddingLoadOptions {
  /// Kind assigned to packed files, which carry no header metadata.
  EmbeddingKind packed_kind = EmbeddingKind::kDocument;
};

/// Loads either format (detected from the magic bytes). Values pass
/// through f32. Throws InputError naming the record index on malformed or
/// dimension-inconsistent records and on normalization violations.
EmbeddingMatrix load_embedding_file(const std::filesystem::path& path,
                                    const EmbeddingLoadOptions& options = {});

/// Mean of the paragraph vectors whose parent is `doc_id`.
Vector doc_vector_avg_paragraphs(const EmbeddingMatrix& paragraphs, std::string_view doc_id);

}  // namespace labelvec
