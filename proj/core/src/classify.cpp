#include "labelvec/classify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "labelvec/error.hpp"
#include "labelvec/text.hpp"
#include "parallel.hpp"

namespace labelvec {

namespace {

// Documents are scored in fixed-size blocks so the floating-point
// evaluation order does not depend on the worker count.
constexpr Eigen::Index kScoreBlock = 1024;

struct NamedVector {
  const std::string* name;
  const Vector* vector;
};

PredictionSet score_documents(const EmbeddingMatrix& docs, const std::vector<NamedVector>& classes,
                              const ScoringOptions& options) {
  if (classes.empty()) throw InputError("classification needs at least one class");
  const auto dim = static_cast<Eigen::Index>(docs.dim());
  Eigen::MatrixXd unit(static_cast<Eigen::Index>(classes.size()), dim);
  PredictionSet out;
  out.method = options.method;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const auto& v = *classes[c].vector;
    if (v.size() != dim) {
      throw InputError("class vector '" + *classes[c].name + "' has dimension " + std::to_string(v.size()) +
                       ", documents have " + std::to_string(dim));
    }
    try {
      unit.row(static_cast<Eigen::Index>(c)) = normalized(v).transpose();
    } catch (const NumericError&) {
      throw NumericError("class vector '" + *classes[c].name + "' is zero");
    }
    out.class_names.push_back(*classes[c].name);
  }

  const auto n = static_cast<Eigen::Index>(docs.size());
  const auto blocks = static_cast<std::size_t>((n + kScoreBlock - 1) / kScoreBlock);
  Eigen::MatrixXd scores(n, unit.rows());
  Eigen::VectorXd norms(n);
  const auto data = docs.data();
  detail::parallel_chunks(blocks, options.jobs, [&](std::size_t b0, std::size_t b1) {
    for (auto b = b0; b < b1; ++b) {
      const auto start = static_cast<Eigen::Index>(b) * kScoreBlock;
      const auto rows = std::min(kScoreBlock, n - start);
      scores.middleRows(start, rows).noalias() = data.middleRows(start, rows) * unit.transpose();
      norms.segment(start, rows) = data.middleRows(start, rows).rowwise().norm();
    }
  });

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& id = docs.id(static_cast<std::size_t>(i));
    if (!(norms[i] > 0.0) || !std::isfinite(norms[i])) {
      out.excluded.push_back(id);
      continue;
    }
    Prediction p;
    p.id = id;
    p.scores.resize(classes.size());
    std::size_t best = 0;
    for (std::size_t c = 0; c < classes.size(); ++c) {
      p.scores[c] = scores(i, static_cast<Eigen::Index>(c)) / norms[i];
      if (p.scores[c] > p.scores[best]) best = c;
    }
    const auto top = p.scores[best];
    if (std::count(p.scores.begin(), p.scores.end(), top) > 1) ++out.ties;
    p.predicted = out.class_names[best];
    p.score = top;
    out.predictions.push_back(std::move(p));
  }
  return out;
}

double population_mean(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

}  // namespace

std::vector<ClassVector> keyword_class_vectors(const std::vector<ClassSpec>& specs, const KeywordEmbedder& embed) {
  validate_class_specs(specs);
  std::vector<ClassVector> out;
  out.reserve(specs.size());
  for (const auto& spec : specs) {
    Vector sum;
    for (const auto& kw : spec.keywords) {
      Vector v = embed(spec.name, kw);
      if (sum.size() == 0) {
        sum = std::move(v);
      } else {
        if (v.size() != sum.size()) throw InputError("keyword '" + kw + "' has a different dimension");
        sum += v;
      }
    }
    out.push_back({spec.name, sum / static_cast<double>(spec.keywords.size()), spec.keywords.size()});
  }
  return out;
}

std::vector<ClassVector> keyword_class_vectors(const std::vector<ClassSpec>& specs,
                                               const EmbeddingMatrix& keyword_matrix) {
  return keyword_class_vectors(specs, [&](const std::string& cls, const std::string& kw) -> Vector {
    auto row = keyword_matrix.kind() == EmbeddingKind::kKeyword ? keyword_matrix.find(kw, cls) : std::nullopt;
    if (!row) row = keyword_matrix.find(kw);
    if (!row) throw ConsistencyError("no vector for keyword '" + kw + "' of class '" + cls + "'");
    return keyword_matrix.vector(*row);
  });
}

PredictionSet classify_by_centroid(const EmbeddingMatrix& doc_vectors, const std::vector<ClassVector>& class_vectors,
                                   const ScoringOptions& options) {
  std::vector<NamedVector> classes;
  for (const auto& c : class_vectors) classes.push_back({&c.class_name, &c.vector});
  return score_documents(doc_vectors, classes, options);
}

PredictionSet classify_by_label_vectors(const EmbeddingMatrix& doc_vectors,
                                        const std::vector<LabelVector>& label_vectors,
                                        const ScoringOptions& options) {
  std::vector<NamedVector> classes;
  for (const auto& l : label_vectors) classes.push_back({&l.class_name, &l.vector});
  return score_documents(doc_vectors, classes, options);
}

std::vector<Candidate> select_candidates(const EmbeddingMatrix& doc_vectors, const ClassVector& class_vector,
                                         std::size_t k, std::optional<double> min_similarity) {
  if (k == 0) throw InputError("candidate count k must be positive");
  if (static_cast<std::size_t>(class_vector.vector.size()) != doc_vectors.dim()) {
    throw InputError("class vector '" + class_vector.class_name + "' dimension does not match the documents");
  }
  const Vector unit = normalized(class_vector.vector);
  std::vector<Candidate> all;
  all.reserve(doc_vectors.size());
  for (std::size_t r = 0; r < doc_vectors.size(); ++r) {
    const auto v = doc_vectors.vector(r);
    const double n = v.norm();
    if (!(n > 0.0)) continue;
    all.push_back({r, unit.dot(v) / n});
  }
  auto before = [](const Candidate& a, const Candidate& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.row < b.row;
  };
  const auto keep = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), before);
  all.resize(keep);
  if (min_similarity) {
    all.erase(std::find_if(all.begin(), all.end(), [&](const Candidate& c) { return c.similarity < *min_similarity; }),
              all.end());
  }
  if (all.empty()) {
    throw NumericError("no candidate documents for class '" + class_vector.class_name + "'" +
                       (min_similarity ? " at min_similarity " + std::to_string(*min_similarity) : std::string{}));
  }
  return all;
}

CleanPolicy CleanPolicy::parse(std::string_view text) {
  if (text == "none" || text.empty()) return none();
  std::string_view rest;
  if (text.starts_with("sigma(") && text.ends_with(")")) {
    rest = text.substr(6, text.size() - 7);
  } else if (text.starts_with("sigma:")) {
    rest = text.substr(6);
  } else {
    throw InputError("unknown clean policy '" + std::string(text) + "' (expected none or sigma(alpha))");
  }
  try {
    std::size_t used = 0;
    const double alpha = std::stod(std::string(rest), &used);
    if (used != rest.size() || !(alpha >= 0.0)) throw std::invalid_argument("alpha");
    return sigma(alpha);
  } catch (const std::exception&) {
    throw InputError("invalid sigma alpha in clean policy '" + std::string(text) + "'");
  }
}

std::string CleanPolicy::to_string() const {
  if (kind == Kind::kNone) return "none";
  std::ostringstream out;
  out << "sigma(" << alpha << ")";
  return out.str();
}

std::vector<Candidate> clean_candidates(const EmbeddingMatrix& doc_vectors, std::vector<Candidate> candidates,
                                        const CleanPolicy& policy) {
  if (candidates.empty()) throw InputError("clean_candidates needs at least one candidate");
  if (policy.kind == CleanPolicy::Kind::kNone || candidates.size() == 1) return candidates;

  Vector centroid = Vector::Zero(static_cast<Eigen::Index>(doc_vectors.dim()));
  for (const auto& c : candidates) centroid += doc_vectors.vector(c.row);
  centroid /= static_cast<double>(candidates.size());
  if (!(centroid.norm() > 0.0)) return candidates;

  std::vector<double> cos;
  cos.reserve(candidates.size());
  for (const auto& c : candidates) cos.push_back(cosine(doc_vectors.vector(c.row), centroid));
  const double mean = population_mean(cos);
  double var = 0.0;
  for (double x : cos) var += (x - mean) * (x - mean);
  const double stddev = std::sqrt(var / static_cast<double>(cos.size()));
  const double cutoff = mean - policy.alpha * stddev;

  std::vector<Candidate> kept;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (cos[i] >= cutoff) kept.push_back(candidates[i]);
  }
  if (kept.empty()) {
    const auto best = std::max_element(cos.begin(), cos.end()) - cos.begin();
    kept.push_back(candidates[static_cast<std::size_t>(best)]);
  }
  return kept;
}

std::vector<LabelVector> compute_label_vectors(const EmbeddingMatrix& doc_vectors,
                                               const std::vector<ClassVector>& class_vectors,
                                               const LabelVectorConfig& config) {
  std::vector<LabelVector> out(class_vectors.size());
  detail::parallel_chunks(class_vectors.size(), config.jobs, [&](std::size_t c0, std::size_t c1) {
    for (auto c = c0; c < c1; ++c) {
      const auto& cls = class_vectors[c];
      auto candidates = clean_candidates(
          doc_vectors, select_candidates(doc_vectors, cls, config.k, config.min_similarity), config.clean);
      std::vector<std::size_t> rows;
      rows.reserve(candidates.size());
      for (const auto& cand : candidates) rows.push_back(cand.row);
      std::sort(rows.begin(), rows.end());
      Vector sum = Vector::Zero(static_cast<Eigen::Index>(doc_vectors.dim()));
      for (auto r : rows) sum += doc_vectors.vector(r);

      LabelVector& lv = out[c];
      lv.class_name = cls.class_name;
      lv.vector = sum / static_cast<double>(rows.size());
      for (const auto& cand : candidates) {
        lv.candidate_ids.push_back(doc_vectors.id(cand.row));
        lv.candidate_similarities.push_back(cand.similarity);
      }
    }
  });
  return out;
}

std::string_view engine_name(const Engine& engine) {
  struct {
    std::string_view operator()(const LsaEngine&) const { return "lsa"; }
    std::string_view operator()(const Word2VecEngine&) const { return "word2vec"; }
    std::string_view operator()(const ImportedEngine&) const { return "imported-embeddings"; }
  } visitor;
  return std::visit(visitor, engine);
}

namespace {

Representations represent_lsa(const Corpus& corpus, const std::vector<ClassSpec>& specs, const LsaModel& model) {
  Representations rep{EmbeddingMatrix(EmbeddingKind::kDocument, model.n_concepts(), "lsa"), {}, {}};
  rep.documents.reserve(corpus.size());
  for (const auto& doc : corpus) {
    try {
      rep.documents.add(doc.id, std::nullopt, model.project(tokenize_terms(doc.text)));
    } catch (const NumericError&) {
      rep.unrepresented.push_back(doc.id);
    }
  }
  rep.classes = keyword_class_vectors(specs, [&](const std::string& cls, const std::string& kw) -> Vector {
    try {
      return model.project(tokenize_terms(kw));
    } catch (const NumericError&) {
      throw ConsistencyError("keyword '" + kw + "' of class '" + cls + "' is not in the LSA vocabulary");
    }
  });
  return rep;
}

Representations represent_word2vec(const Corpus& corpus, const std::vector<ClassSpec>& specs,
                                   const WordEmbeddingTable& table) {
  Representations rep{EmbeddingMatrix(EmbeddingKind::kDocument, table.dim(), "word2vec"), {}, {}};
  rep.documents.reserve(corpus.size());
  for (const auto& doc : corpus) {
    try {
      rep.documents.add(doc.id, std::nullopt, doc_vector_avg_words(table, doc));
    } catch (const NumericError&) {
      rep.unrepresented.push_back(doc.id);
    }
  }
  rep.classes = keyword_class_vectors(specs, [&](const std::string& cls, const std::string& kw) -> Vector {
    try {
      return table.average(tokenize_terms(kw));
    } catch (const NumericError&) {
      throw ConsistencyError("keyword '" + kw + "' of class '" + cls + "' is not in the word vocabulary");
    }
  });
  return rep;
}

Representations represent_imported(const Corpus& corpus, const std::vector<ClassSpec>& specs,
                                   const ImportedEngine& engine) {
  const auto& src = engine.documents;
  if (src.dim() != engine.keywords.dim()) {
    throw ConsistencyError("document embeddings have dimension " + std::to_string(src.dim()) +
                           " but keyword embeddings have " + std::to_string(engine.keywords.dim()));
  }
  Representations rep{EmbeddingMatrix(EmbeddingKind::kDocument, src.dim(), src.source()), {}, {}};
  rep.documents.reserve(corpus.size());
  const bool paragraphs = src.kind() == EmbeddingKind::kParagraph;
  for (const auto& doc : corpus) {
    if (paragraphs) {
      try {
        rep.documents.add(doc.id, std::nullopt, doc_vector_avg_paragraphs(src, doc.id));
      } catch (const NumericError&) {
        rep.unrepresented.push_back(doc.id);
      }
    } else if (auto row = src.find(doc.id)) {
      rep.documents.add(doc.id, std::nullopt, src.vector(*row));
    } else {
      rep.unrepresented.push_back(doc.id);
    }
  }
  rep.classes = keyword_class_vectors(specs, engine.keywords);
  return rep;
}

}  // namespace

Representations represent(const Corpus& corpus, const std::vector<ClassSpec>& specs, const Engine& engine) {
  validate_class_specs(specs);
  if (const auto* lsa = std::get_if<LsaEngine>(&engine)) return represent_lsa(corpus, specs, lsa->model);
  if (const auto* w2v = std::get_if<Word2VecEngine>(&engine)) return represent_word2vec(corpus, specs, w2v->table);
  return represent_imported(corpus, specs, std::get<ImportedEngine>(engine));
}

std::string_view to_string(Method method) {
  return method == Method::kCentroidBaseline ? "centroid-baseline" : "label-vector";
}

Method parse_method(std::string_view name) {
  if (name == "centroid-baseline") return Method::kCentroidBaseline;
  if (name == "label-vector") return Method::kLabelVector;
  throw InputError("unknown method '" + std::string(name) + "' (expected centroid-baseline or label-vector)");
}

PredictionSet run_pipeline(const Corpus& corpus, const std::vector<ClassSpec>& specs, const Engine& engine,
                           const PipelineConfig& config) {
  const auto rep = represent(corpus, specs, engine);
  const ScoringOptions scoring{config.jobs, std::string(to_string(config.method))};
  PredictionSet out;
  if (config.method == Method::kCentroidBaseline) {
    out = classify_by_centroid(rep.documents, rep.classes, scoring);
  } else {
    auto label_cfg = config.label;
    label_cfg.jobs = config.jobs;
    out = classify_by_label_vectors(rep.documents, compute_label_vectors(rep.documents, rep.classes, label_cfg),
                                    scoring);
  }
  out.engine = std::string(engine_name(engine));
  out.config_fingerprint = config.fingerprint;
  out.excluded.insert(out.excluded.begin(), rep.unrepresented.begin(), rep.unrepresented.end());
  return out;
}

}  // namespace labelvec
