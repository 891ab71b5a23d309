#include <benchmark/benchmark.h>

#include <random>

#include "labelvec/classify.hpp"
#include "labelvec/corpus.hpp"
#include "labelvec/eval.hpp"
#include "labelvec/svd.hpp"
#include "labelvec/word2vec.hpp"

namespace lv = labelvec;

namespace {

lv::EmbeddingMatrix random_docs(std::size_t n, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  lv::EmbeddingMatrix m(lv::EmbeddingKind::kDocument, dim, "bench");
  lv::Vector v(static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < n; ++i) {
    for (auto& x : v) x = g(rng);
    m.add("d" + std::to_string(i), std::nullopt, v);
  }
  return m;
}

std::vector<lv::ClassVector> random_classes(std::size_t k, std::size_t dim) {
  const auto m = random_docs(k, dim, 99);
  std::vector<lv::ClassVector> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back({"c" + std::to_string(i), m.vector(i), 1});
  return out;
}

void BM_ClassifyByCentroid(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto docs = random_docs(n, 384, 1);
  const auto classes = random_classes(20, 384);
  const lv::ScoringOptions opts{.jobs = static_cast<std::size_t>(state.range(1))};
  for (auto _ : state) benchmark::DoNotOptimize(lv::classify_by_centroid(docs, classes, opts));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ClassifyByCentroid)->Args({10000, 1})->Args({10000, 4})->Unit(benchmark::kMillisecond);

void BM_SelectCandidates(benchmark::State& state) {
  const auto docs = random_docs(static_cast<std::size_t>(state.range(0)), 384, 2);
  const auto classes = random_classes(1, 384);
  for (auto _ : state) benchmark::DoNotOptimize(lv::select_candidates(docs, classes[0], 100));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectCandidates)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

void BM_KendallTau(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> v(0, 100);
  std::vector<double> x, y;
  for (int i = 0; i < state.range(0); ++i) {
    x.push_back(v(rng));
    y.push_back(v(rng));
  }
  for (auto _ : state) benchmark::DoNotOptimize(lv::kendall_tau(x, y));
}
BENCHMARK(BM_KendallTau)->Arg(39)->Arg(10000)->Arg(1000000)->Unit(benchmark::kMicrosecond);

void BM_RandomizedSvd(benchmark::State& state) {
  const auto n = state.range(0);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<Eigen::Triplet<double>> t;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int k = 0; k < 30; ++k) t.emplace_back(static_cast<Eigen::Index>(u(rng) * 3 * n), j, u(rng));
  }
  Eigen::SparseMatrix<double> a(3 * n, n);
  a.setFromTriplets(t.begin(), t.end());
  for (auto _ : state) {
    benchmark::DoNotOptimize(lv::truncated_svd(a, 20, {.method = lv::SvdMethod::kRandomized, .seed = 1}));
  }
}
BENCHMARK(BM_RandomizedSvd)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_TrainWord2Vec(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> w(0, 499);
  std::vector<lv::Document> docs;
  for (int d = 0; d < 500; ++d) {
    std::string text;
    for (int i = 0; i < 50; ++i) text += "w" + std::to_string(w(rng)) + " ";
    docs.push_back({"d" + std::to_string(d), text, std::nullopt});
  }
  const lv::Corpus corpus("bench", std::move(docs));
  lv::Word2VecConfig cfg;
  cfg.dim = 64;
  cfg.epochs = 1;
  for (auto _ : state) benchmark::DoNotOptimize(lv::train_word2vec(corpus, cfg));
  state.SetItemsProcessed(state.iterations() * 500 * 50);
}
BENCHMARK(BM_TrainWord2Vec)->Unit(benchmark::kMillisecond);

void BM_SplitDocument(benchmark::State& state) {
  std::string text;
  for (int s = 0; s < 200; ++s) text += "this sentence has exactly seven words in it. ";
  const lv::Document doc{"d", text, std::nullopt};
  for (auto _ : state) benchmark::DoNotOptimize(lv::split_document(doc, 512));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_SplitDocument);

}  // namespace
BENCHMARK_MAIN();
