#include "labelvec/word2vec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include <nlohmann/json.hpp>

#include "labelvec/error.hpp"
#include "labelvec/random.hpp"
#include "labelvec/text.hpp"

namespace labelvec {

namespace {

constexpr double kUnigramPower = 0.75;
constexpr float kMaxLogit = 6.0f;
constexpr double kMinLearningRateFraction = 1e-4;
constexpr std::uint64_t kProgressBatch = 10000;

struct Vocabulary {
  std::vector<std::string> terms;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;
};

Vocabulary build_vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t min_count) {
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : docs) {
    for (const auto& tok : doc) ++counts[tok];
  }
  std::vector<std::pair<std::string, std::uint64_t>> sorted;
  for (auto& [term, n] : counts) {
    if (n >= min_count) sorted.emplace_back(term, n);
  }
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  Vocabulary vocab;
  for (auto& [term, n] : sorted) {
    vocab.index.emplace(term, static_cast<std::uint32_t>(vocab.terms.size()));
    vocab.terms.push_back(std::move(term));
    vocab.counts.push_back(n);
  }
  return vocab;
}

// Cumulative unigram^0.75 distribution for drawing negatives.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), kUnigramPower);
      cumulative_.push_back(total);
    }
    for (auto& c : cumulative_) c /= total;
  }

  std::uint32_t draw(Rng& rng) const {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

// Weight access. Shared mode goes through relaxed atomics so concurrent
// workers may race on updates without undefined behaviour.
template <bool Shared>
struct Weights {
  static float load(float& x) {
    if constexpr (Shared) {
      return std::atomic_ref<float>(x).load(std::memory_order_relaxed);
    } else {
      return x;
    }
  }
  static void store(float& x, float v) {
    if constexpr (Shared) {
      std::atomic_ref<float>(x).store(v, std::memory_order_relaxed);
    } else {
      x = v;
    }
  }
};

struct TrainingState {
  const Word2VecConfig& config;
  const std::vector<std::vector<std::uint32_t>>& sentences;
  const NegativeSampler& sampler;
  std::vector<float>& input;
  std::vector<float>& output;
  std::uint64_t total_words;
  std::atomic<std::uint64_t> processed{0};
};

template <bool Shared>
void train_range(TrainingState& state, std::size_t begin, std::size_t end, std::uint64_t seed) {
  using W = Weights<Shared>;
  const auto& cfg = state.config;
  const std::size_t dim = cfg.dim;
  const auto start_lr = static_cast<float>(cfg.learning_rate);
  Rng rng(seed);
  std::vector<float> grad(dim);
  std::vector<float> ctx(dim);
  std::uint64_t local = 0;
  float lr = start_lr;

  auto update_lr = [&] {
    const auto done = state.processed.fetch_add(local, std::memory_order_relaxed) + local;
    local = 0;
    const double frac = 1.0 - static_cast<double>(done) / static_cast<double>(state.total_words + 1);
    lr = static_cast<float>(cfg.learning_rate * std::max(frac, kMinLearningRateFraction));
  };

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    for (std::size_t s = begin; s < end; ++s) {
      const auto& sent = state.sentences[s];
      const auto len = sent.size();
      for (std::size_t pos = 0; pos < len; ++pos) {
        if (local >= kProgressBatch) update_lr();
        ++local;
        const std::uint32_t center = sent[pos];
        const auto shrink = static_cast<std::size_t>(rng.below(cfg.window));
        const std::size_t reach = cfg.window - shrink;
        const std::size_t lo = pos >= reach ? pos - reach : 0;
        const std::size_t hi = std::min(len - 1, pos + reach);
        for (std::size_t c = lo; c <= hi; ++c) {
          if (c == pos) continue;
          float* in = state.input.data() + static_cast<std::size_t>(sent[c]) * dim;
          for (std::size_t j = 0; j < dim; ++j) ctx[j] = W::load(in[j]);
          std::fill(grad.begin(), grad.end(), 0.0f);
          for (std::size_t d = 0; d <= cfg.negatives; ++d) {
            std::uint32_t target = center;
            float label = 1.0f;
            if (d > 0) {
              target = state.sampler.draw(rng);
              if (target == center) continue;
              label = 0.0f;
            }
            float* out = state.output.data() + static_cast<std::size_t>(target) * dim;
            float logit = 0.0f;
            for (std::size_t j = 0; j < dim; ++j) logit += ctx[j] * W::load(out[j]);
            float prob;
            if (logit > kMaxLogit) {
              prob = 1.0f;
            } else if (logit < -kMaxLogit) {
              prob = 0.0f;
            } else {
              prob = 1.0f / (1.0f + std::exp(-logit));
            }
            const float g = (label - prob) * lr;
            for (std::size_t j = 0; j < dim; ++j) {
              const float o = W::load(out[j]);
              grad[j] += g * o;
              W::store(out[j], o + g * ctx[j]);
            }
          }
          for (std::size_t j = 0; j < dim; ++j) W::store(in[j], W::load(in[j]) + grad[j]);
        }
      }
    }
  }
  update_lr();
}

}  // namespace

nlohmann::json Word2VecConfig::to_json() const {
  return {{"dim", dim},       {"window", window},
          {"negatives", negatives}, {"epochs", epochs},
          {"min_count", min_count}, {"learning_rate", learning_rate},
          {"seed", seed},     {"deterministic", deterministic}};
}

WordEmbeddingTable::WordEmbeddingTable(EmbeddingMatrix vectors, Word2VecConfig config)
    : vectors_(std::move(vectors)), config_(config) {
  if (vectors_.kind() != EmbeddingKind::kWord) throw InputError("word table needs an embedding matrix of kind 'word'");
}

Vector WordEmbeddingTable::average(const std::vector<std::string>& tokens) const {
  Vector sum = Vector::Zero(static_cast<Eigen::Index>(dim()));
  std::size_t used = 0;
  for (const auto& tok : tokens) {
    if (auto idx = find(tok)) {
      sum += vector(*idx);
      ++used;
    }
  }
  if (used == 0) throw NumericError("no in-vocabulary tokens to average");
  return sum / static_cast<double>(used);
}

WordEmbeddingTable train_word2vec(const Corpus& corpus, const Word2VecConfig& config) {
  if (corpus.empty()) throw InputError("cannot train word vectors on an empty corpus");
  if (config.dim == 0 || config.window == 0 || config.epochs == 0) {
    throw InputError("word2vec dim, window and epochs must be positive");
  }
  std::vector<std::vector<std::string>> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(tokenize_terms(doc.text));
  const auto vocab = build_vocabulary(docs, std::max<std::size_t>(config.min_count, 1));
  if (vocab.terms.empty()) throw InputError("word2vec vocabulary is empty");

  std::vector<std::vector<std::uint32_t>> sentences;
  std::uint64_t words_per_epoch = 0;
  for (const auto& doc : docs) {
    std::vector<std::uint32_t> ids;
    for (const auto& tok : doc) {
      if (auto it = vocab.index.find(tok); it != vocab.index.end()) ids.push_back(it->second);
    }
    words_per_epoch += ids.size();
    if (!ids.empty()) sentences.push_back(std::move(ids));
  }

  const std::size_t dim = config.dim;
  std::vector<float> input(vocab.terms.size() * dim);
  std::vector<float> output(vocab.terms.size() * dim, 0.0f);
  Rng init(config.seed);
  const double half = 0.5 / static_cast<double>(dim);
  for (auto& w : input) w = static_cast<float>(init.uniform(-half, half));

  NegativeSampler sampler(vocab.counts);
  TrainingState state{config, sentences, sampler, input, output, words_per_epoch * config.epochs};

  const std::size_t jobs = config.deterministic ? 1 : std::max<std::size_t>(config.jobs, 1);
  if (jobs == 1) {
    train_range<false>(state, 0, sentences.size(), config.seed ^ 0x9E3779B97F4A7C15ULL);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t t = 0; t < jobs; ++t) {
      const std::size_t begin = sentences.size() * t / jobs;
      const std::size_t end = sentences.size() * (t + 1) / jobs;
      workers.emplace_back([&state, begin, end, seed = config.seed ^ (0x9E3779B97F4A7C15ULL * (t + 1))] {
        train_range<true>(state, begin, end, seed);
      });
    }
    for (auto& w : workers) w.join();
  }

  EmbeddingMatrix vectors(EmbeddingKind::kWord, dim, "word2vec");
  vectors.reserve(vocab.terms.size());
  Vector row(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < vocab.terms.size(); ++i) {
    for (std::size_t j = 0; j < dim; ++j) row[static_cast<Eigen::Index>(j)] = input[i * dim + j];
    vectors.add(vocab.terms[i], std::nullopt, row);
  }
  return WordEmbeddingTable(std::move(vectors), config);
}

Vector doc_vector_avg_words(const WordEmbeddingTable& table, const Document& doc) {
  try {
    return table.average(tokenize_terms(doc.text));
  } catch (const NumericError&) {
    throw NumericError("document '" + doc.id + "' has no in-vocabulary words");
  }
}

}  // namespace labelvec
