#include "labelvec/lsa.hpp"

#include <cmath>
#include <fstream>
#include <map>

#include <nlohmann/json.hpp>

#include "labelvec/error.hpp"
#include "labelvec/text.hpp"

namespace labelvec {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kRankTolerance = 1e-12;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> row(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) row[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows, Eigen::Index cols, const std::string& what) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || static_cast<Eigen::Index>(rows[i].size()) != cols) {
      throw InputError("lsa model: row " + std::to_string(i) + " of " + what + " has the wrong width");
    }
    for (Eigen::Index j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), j) = rows[i][static_cast<std::size_t>(j)].get<double>();
  }
  return m;
}

}  // namespace

TermDocumentMatrix build_tfidf(const Corpus& corpus) {
  TermDocumentMatrix out;
  std::unordered_map<std::string, std::size_t> vocab;
  std::vector<std::size_t> df;
  std::vector<Eigen::Triplet<double>> triplets;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    out.doc_ids.push_back(corpus[d].id);
    std::map<std::size_t, double> tf;
    for (auto& tok : tokenize_terms(corpus[d].text)) {
      auto [it, inserted] = vocab.emplace(tok, out.terms.size());
      if (inserted) {
        out.terms.push_back(std::move(tok));
        df.push_back(0);
      }
      tf[it->second] += 1.0;
    }
    for (const auto& [t, count] : tf) {
      ++df[t];
      triplets.emplace_back(static_cast<int>(t), static_cast<int>(d), count);
    }
  }
  const double n_docs = static_cast<double>(corpus.size());
  out.idf.resize(static_cast<Eigen::Index>(out.terms.size()));
  for (std::size_t t = 0; t < df.size(); ++t) {
    out.idf[static_cast<Eigen::Index>(t)] = std::log(n_docs / static_cast<double>(df[t]));
  }
  for (auto& tr : triplets) tr = Eigen::Triplet<double>(tr.row(), tr.col(), tr.value() * out.idf[tr.row()]);
  out.weights.resize(static_cast<Eigen::Index>(out.terms.size()), static_cast<Eigen::Index>(corpus.size()));
  out.weights.setFromTriplets(triplets.begin(), triplets.end());
  out.weights.makeCompressed();
  return out;
}

LsaModel::LsaModel(std::vector<std::string> terms, Eigen::VectorXd idf, std::vector<std::string> doc_ids,
                   TruncatedSvd factors)
    : terms_(std::move(terms)), idf_(std::move(idf)), doc_ids_(std::move(doc_ids)), factors_(std::move(factors)) {
  if (static_cast<Eigen::Index>(terms_.size()) != idf_.size() ||
      static_cast<Eigen::Index>(terms_.size()) != factors_.left.rows() ||
      static_cast<Eigen::Index>(doc_ids_.size()) != factors_.right.rows()) {
    throw ConsistencyError("lsa model: factor shapes do not match vocabulary and document count");
  }
  vocabulary_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) vocabulary_.emplace(terms_[i], i);
}

std::optional<std::size_t> LsaModel::term_index(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

Vector LsaModel::project_weighted(const VectorRef& term_weights) const {
  if (term_weights.size() != factors_.left.rows()) throw InputError("lsa fold-in: term vector has wrong length");
  return (factors_.left.transpose() * term_weights).cwiseQuotient(factors_.singular_values);
}

Vector LsaModel::project(const std::vector<std::string>& tokens) const {
  std::map<std::size_t, double> tf;
  for (const auto& tok : tokens) {
    if (auto idx = term_index(tok)) tf[*idx] += 1.0;
  }
  if (tf.empty()) throw NumericError("lsa fold-in: no in-vocabulary tokens");
  Vector folded = Vector::Zero(factors_.left.cols());
  for (const auto& [t, count] : tf) {
    folded += (count * idf_[static_cast<Eigen::Index>(t)]) * factors_.left.row(static_cast<Eigen::Index>(t)).transpose();
  }
  return folded.cwiseQuotient(factors_.singular_values);
}

EmbeddingMatrix LsaModel::document_matrix() const {
  EmbeddingMatrix out(EmbeddingKind::kDocument, n_concepts(), "lsa");
  out.reserve(doc_ids_.size());
  for (std::size_t i = 0; i < doc_ids_.size(); ++i) out.add(doc_ids_[i], std::nullopt, document_vector(i));
  return out;
}

void LsaModel::save(const fs::path& path, const std::string& fingerprint) const {
  nlohmann::ordered_json doc;
  doc["kind"] = "lsa";
  if (!fingerprint.empty()) doc["config_fingerprint"] = fingerprint;
  doc["n_concepts"] = n_concepts();
  doc["terms"] = terms_;
  doc["idf"] = std::vector<double>(idf_.data(), idf_.data() + idf_.size());
  const auto& s = factors_.singular_values;
  doc["singular_values"] = std::vector<double>(s.data(), s.data() + s.size());
  doc["left"] = matrix_to_json(factors_.left);
  doc["doc_ids"] = doc_ids_;
  doc["right"] = matrix_to_json(factors_.right);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write '" + path.string() + "'");
  out << doc.dump() << '\n';
}

LsaModel LsaModel::load(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open lsa model '" + path.string() + "'");
  try {
    const auto doc = json::parse(in);
    if (doc.value("kind", std::string{}) != "lsa") throw InputError(path.string() + ": not an lsa model");
    const auto k = doc.at("n_concepts").get<Eigen::Index>();
    auto terms = doc.at("terms").get<std::vector<std::string>>();
    auto idf_values = doc.at("idf").get<std::vector<double>>();
    auto sv = doc.at("singular_values").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(sv.size()) != k) throw InputError(path.string() + ": singular value count");
    TruncatedSvd factors{matrix_from_json(doc.at("left"), k, "left"),
                         Eigen::Map<Eigen::VectorXd>(sv.data(), k),
                         matrix_from_json(doc.at("right"), k, "right")};
    return LsaModel(std::move(terms), Eigen::Map<Eigen::VectorXd>(idf_values.data(), static_cast<Eigen::Index>(idf_values.size())),
                    doc.at("doc_ids").get<std::vector<std::string>>(), std::move(factors));
  } catch (const json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

LsaModel fit_lsa(const TermDocumentMatrix& matrix, std::size_t n_concepts, const SvdOptions& options) {
  const auto rows = matrix.weights.rows();
  const auto cols = matrix.weights.cols();
  if (n_concepts == 0 || static_cast<Eigen::Index>(n_concepts) > std::min(rows, cols)) {
    throw InputError("n_concepts = " + std::to_string(n_concepts) + " must be in [1, min(#terms = " +
                     std::to_string(rows) + ", #documents = " + std::to_string(cols) + ")]");
  }
  auto factors = truncated_svd(matrix.weights, static_cast<Eigen::Index>(n_concepts), options);
  const auto& s = factors.singular_values;
  if (s[0] <= 0.0 || s[s.size() - 1] <= kRankTolerance * s[0]) {
    throw NumericError("term-document matrix has numerical rank below n_concepts = " + std::to_string(n_concepts));
  }
  return LsaModel(matrix.terms, matrix.idf, matrix.doc_ids, std::move(factors));
}

LsaModel fit_lsa(const Corpus& corpus, std::size_t n_concepts, const SvdOptions& options) {
  return fit_lsa(build_tfidf(corpus), n_concepts, options);
}

}  // namespace labelvec
