#include "labelvec/embeddings.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include <nlohmann/json.hpp>

#include "labelvec/error.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::array<char, 4> kPackedMagic{'L', 'V', 'K', '1'};
constexpr char kKeySeparator = '\x1f';

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in, std::size_t record) {
  std::array<unsigned char, sizeof(T)> bytes{};
  if (!in.read(reinterpret_cast<char*>(bytes.data()), bytes.size())) {
    throw InputError("packed embedding file truncated at record " + std::to_string(record));
  }
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

void put_string(std::ostream& out, const std::string& s) {
  if (s.size() > 0xFFFF) throw InputError("identifier longer than 65535 bytes: '" + s.substr(0, 32) + "...'");
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string get_string(std::istream& in, std::size_t record) {
  const auto len = get_le<std::uint16_t>(in, record);
  std::string s(len, '\0');
  if (len > 0 && !in.read(s.data(), len)) {
    throw InputError("packed embedding file truncated at record " + std::to_string(record));
  }
  return s;
}

void append_f32(std::string& out, float value) {
  std::array<char, 32> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc{}) throw NumericError("cannot format embedding value");
  out.append(buf.data(), end);
}

EmbeddingMatrix load_packed(std::istream& in, const fs::path& path, const EmbeddingLoadOptions& options) {
  const auto dim = get_le<std::uint32_t>(in, 0);
  const auto count = get_le<std::uint64_t>(in, 0);
  if (dim == 0) throw InputError(path.string() + ": packed header declares dim 0");
  EmbeddingMatrix matrix(options.packed_kind, dim, {}, false);
  matrix.reserve(static_cast<std::size_t>(count));
  Vector values(dim);
  for (std::uint64_t r = 0; r < count; ++r) {
    const auto record = static_cast<std::size_t>(r);
    auto id = get_string(in, record);
    auto parent = get_string(in, record);
    for (std::uint32_t j = 0; j < dim; ++j) {
      values[j] = static_cast<double>(std::bit_cast<float>(get_le<std::uint32_t>(in, record)));
      if (!std::isfinite(values[j])) {
        throw InputError(path.string() + ": record " + std::to_string(record) + " has a non-finite component");
      }
    }
    matrix.add(std::move(id), parent.empty() ? std::nullopt : std::optional<std::string>(std::move(parent)),
               values);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw InputError(path.string() + ": trailing bytes after " + std::to_string(count) + " records");
  }
  return matrix;
}

EmbeddingMatrix load_jsonl(std::istream& in, const fs::path& path) {
  std::string line;
  if (!std::getline(in, line)) throw InputError(path.string() + ": empty embedding file");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": malformed header: " + e.what());
  }
  if (!header.is_object() || !header.contains("dim") || !header["dim"].is_number_unsigned() ||
      header["dim"].get<std::size_t>() == 0) {
    throw InputError(path.string() + ": header needs a positive integer \"dim\"");
  }
  const auto dim = header["dim"].get<std::size_t>();
  const auto kind = parse_embedding_kind(header.value("kind", std::string{"document"}));
  EmbeddingMatrix matrix(kind, dim, header.value("model", std::string{}), header.value("normalized", false));

  Vector values(static_cast<Eigen::Index>(dim));
  std::size_t record = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto where = path.string() + ": record " + std::to_string(record);
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw InputError(where + ": " + e.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string() || !rec.contains("vector") ||
        !rec["vector"].is_array()) {
      throw InputError(where + ": needs a string \"id\" and a \"vector\" array");
    }
    const auto& vec = rec["vector"];
    if (vec.size() != dim) {
      throw InputError(where + ": vector has " + std::to_string(vec.size()) + " components, header says " +
                       std::to_string(dim));
    }
    for (std::size_t j = 0; j < dim; ++j) {
      if (!vec[j].is_number()) throw InputError(where + ": non-numeric component");
      values[static_cast<Eigen::Index>(j)] = static_cast<double>(static_cast<float>(vec[j].get<double>()));
      if (!std::isfinite(values[static_cast<Eigen::Index>(j)])) {
        throw InputError(where + ": non-finite component");
      }
    }
    std::optional<std::string> parent;
    if (auto it = rec.find("parent"); it != rec.end() && !it->is_null()) {
      if (!it->is_string()) throw InputError(where + ": \"parent\" must be a string or null");
      parent = it->get<std::string>();
    }
    try {
      matrix.add(rec["id"].get<std::string>(), std::move(parent), values);
    } catch (const Error& e) {
      throw InputError(where + ": " + e.what());
    }
    ++record;
  }
  return matrix;
}

}  // namespace

double cosine(const VectorRef& u, const VectorRef& v) {
  if (u.size() != v.size()) {
    throw InputError("cosine: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                     std::to_string(v.size()) + ")");
  }
  const double nu = u.norm();
  const double nv = v.norm();
  if (nu == 0.0 || nv == 0.0) throw NumericError("cosine of a zero vector is undefined");
  return std::clamp(u.dot(v) / (nu * nv), -1.0, 1.0);
}

Vector mean_vector(const std::vector<Vector>& vectors) {
  if (vectors.empty()) throw NumericError("mean of an empty vector list");
  Vector sum = Vector::Zero(vectors.front().size());
  for (const auto& v : vectors) {
    if (v.size() != sum.size()) throw InputError("mean_vector: dimension mismatch");
    sum += v;
  }
  return sum / static_cast<double>(vectors.size());
}

Vector normalized(const VectorRef& v) {
  const double n = v.norm();
  if (n == 0.0) throw NumericError("cannot normalize a zero vector");
  return v / n;
}

std::string_view to_string(EmbeddingKind kind) {
  switch (kind) {
    case EmbeddingKind::kWord: return "word";
    case EmbeddingKind::kParagraph: return "paragraph";
    case EmbeddingKind::kDocument: return "document";
    case EmbeddingKind::kKeyword: return "keyword";
  }
  return "?";
}

EmbeddingKind parse_embedding_kind(std::string_view name) {
  if (name == "word") return EmbeddingKind::kWord;
  if (name == "paragraph") return EmbeddingKind::kParagraph;
  if (name == "document") return EmbeddingKind::kDocument;
  if (name == "keyword") return EmbeddingKind::kKeyword;
  throw InputError("unknown embedding kind '" + std::string(name) + "'");
}

EmbeddingMatrix::EmbeddingMatrix(EmbeddingKind kind, std::size_t dim, std::string source, bool normalized)
    : kind_(kind), dim_(dim), source_(std::move(source)), normalized_(normalized) {
  if (dim == 0) throw InputError("embedding dimension must be positive");
}

std::string EmbeddingMatrix::key_for(std::string_view id, const std::optional<std::string>& parent) const {
  if (kind_ != EmbeddingKind::kKeyword) return std::string(id);
  std::string key = parent.value_or(std::string{});
  key.push_back(kKeySeparator);
  key.append(id);
  return key;
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id) const {
  auto it = index_.find(key_for(id, std::nullopt));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> EmbeddingMatrix::find(std::string_view id, std::string_view parent) const {
  auto it = index_.find(key_for(id, std::string(parent)));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> EmbeddingMatrix::children(std::string_view parent) const {
  auto it = children_.find(std::string(parent));
  return it == children_.end() ? std::vector<std::size_t>{} : it->second;
}

void EmbeddingMatrix::reserve(std::size_t rows) {
  ids_.reserve(rows);
  parents_.reserve(rows);
  values_.reserve(rows * dim_);
}

void EmbeddingMatrix::add(std::string id, std::optional<std::string> parent, const VectorRef& values) {
  if (static_cast<std::size_t>(values.size()) != dim_) {
    throw InputError("vector for '" + id + "' has dimension " + std::to_string(values.size()) + ", expected " +
                     std::to_string(dim_));
  }
  const auto row = ids_.size();
  if (!index_.emplace(key_for(id, parent), row).second) {
    throw ConsistencyError("duplicate embedding id '" + id + "'" + (parent ? " (parent '" + *parent + "')" : ""));
  }
  if (parent) children_[*parent].push_back(row);
  values_.insert(values_.end(), values.data(), values.data() + values.size());
  ids_.push_back(std::move(id));
  parents_.push_back(std::move(parent));
}

void EmbeddingMatrix::validate() const {
  if (!normalized_) return;
  for (std::size_t r = 0; r < size(); ++r) {
    const double n = vector(r).norm();
    if (std::abs(n - 1.0) > kNormTolerance) {
      throw InputError("record " + std::to_string(r) + " ('" + ids_[r] + "') has norm " + std::to_string(n) +
                       " but the matrix is declared normalized");
    }
  }
}

EmbeddingMatrix EmbeddingMatrix::normalized_copy() const {
  EmbeddingMatrix out(kind_, dim_, source_, true);
  out.reserve(size());
  for (std::size_t r = 0; r < size(); ++r) out.add(ids_[r], parents_[r], labelvec::normalized(vector(r)));
  return out;
}

void write_embedding_file(const EmbeddingMatrix& matrix, const fs::path& path, EmbeddingFileFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  if (format == EmbeddingFileFormat::kPacked) {
    out.write(kPackedMagic.data(), kPackedMagic.size());
    put_le<std::uint32_t>(out, static_cast<std::uint32_t>(matrix.dim()));
    put_le<std::uint64_t>(out, matrix.size());
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      put_string(out, matrix.id(r));
      put_string(out, matrix.parent(r).value_or(std::string{}));
      const auto v = matrix.vector(r);
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(static_cast<float>(v[j])));
      }
    }
  } else {
    nlohmann::ordered_json header;
    header["dim"] = matrix.dim();
    header["model"] = matrix.source();
    header["kind"] = std::string(to_string(matrix.kind()));
    header["normalized"] = matrix.normalized();
    out << header.dump() << '\n';
    std::string line;
    for (std::size_t r = 0; r < matrix.size(); ++r) {
      line = "{\"id\":";
      line += json(matrix.id(r)).dump();
      line += ",\"parent\":";
      line += matrix.parent(r) ? json(*matrix.parent(r)).dump() : std::string("null");
      line += ",\"vector\":[";
      const auto v = matrix.vector(r);
      for (Eigen::Index j = 0; j < v.size(); ++j) {
        if (j > 0) line.push_back(',');
        append_f32(line, static_cast<float>(v[j]));
      }
      line += "]}\n";
      out << line;
    }
  }
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

EmbeddingMatrix load_embedding_file(const fs::path& path, const EmbeddingLoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open embedding file '" + path.string() + "'");
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  const bool packed = in.gcount() == 4 && magic == kPackedMagic;
  if (!packed) {
    in.clear();
    in.seekg(0);
  }
  EmbeddingMatrix matrix = packed ? load_packed(in, path, options) : load_jsonl(in, path);
  try {
    matrix.validate();
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
  return matrix;
}

Vector doc_vector_avg_paragraphs(const EmbeddingMatrix& paragraphs, std::string_view doc_id) {
  const auto rows = paragraphs.children(doc_id);
  if (rows.empty()) throw NumericError("no paragraph vectors for document '" + std::string(doc_id) + "'");
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(paragraphs.dim()));
  for (auto r : rows) sum += paragraphs.vector(r);
  return sum / static_cast<double>(rows.size());
}

}  // namespace labelvec
