#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "labelvec/error.hpp"
#include "labelvec/eval.hpp"
#include "oracles.hpp"

namespace labelvec {
namespace {

Corpus gold_corpus(const std::vector<std::string>& labels, std::vector<std::string> classes = {}) {
  std::vector<Document> docs;
  for (std::size_t i = 0; i < labels.size(); ++i) docs.push_back({"d" + std::to_string(i), "w", labels[i]});
  if (classes.empty()) {
    for (const auto& l : labels) {
      if (std::find(classes.begin(), classes.end(), l) == classes.end()) classes.push_back(l);
    }
    std::sort(classes.begin(), classes.end());
  }
  return Corpus("gold", std::move(docs), std::move(classes));
}

PredictionSet preds(const std::vector<std::string>& labels, const std::vector<std::string>& classes) {
  PredictionSet p;
  p.method = "m";
  p.engine = "e";
  p.class_names = classes;
  for (std::size_t i = 0; i < labels.size(); ++i) p.predictions.push_back({"d" + std::to_string(i), labels[i], 1.0, {}});
  return p;
}

TEST(MicroF1, PerfectAndPartial) {
  const std::vector<std::string> ten = {"a", "b", "a", "b", "c", "c", "a", "b", "a", "c"};
  EXPECT_DOUBLE_EQ(micro_f1(preds(ten, {"a", "b", "c"}), gold_corpus(ten)), 1.0);
  EXPECT_DOUBLE_EQ(micro_f1(preds({"a", "a", "b"}, {"a", "b"}), gold_corpus({"a", "b", "b"})), 2.0 / 3.0);
}

TEST(MicroF1, ExcludedCountAsWrongInStrictVariant) {
  auto p = preds({"a", "b"}, {"a", "b"});
  p.excluded = {"d2", "d3"};
  const auto m = micro_f1_detail(p, gold_corpus({"a", "b", "a", "b"}));
  EXPECT_DOUBLE_EQ(m.strict, 0.5);
  EXPECT_DOUBLE_EQ(m.scored_only, 1.0);
  EXPECT_EQ(m.n_excluded, 2u);
}

TEST(MicroF1, Errors) {
  const auto gold = gold_corpus({"a", "b"});
  EXPECT_THROW(micro_f1(preds({}, {"a", "b"}), gold), InputError);
  auto unknown = preds({"a"}, {"a", "b"});
  unknown.predictions[0].id = "nope";
  EXPECT_THROW(micro_f1(unknown, gold), ConsistencyError);
  auto dup = preds({"a", "b"}, {"a", "b"});
  dup.predictions[1].id = "d0";
  EXPECT_THROW(micro_f1(dup, gold), ConsistencyError);
  const Corpus unlabeled("u", {{"d0", "x", std::nullopt}});
  EXPECT_THROW(micro_f1(preds({"a"}, {"a"}), unlabeled), ConsistencyError);
}

TEST(PerClassF1, Example) {
  const auto f = per_class_f1(preds({"a", "a", "b", "b", "a"}, {"a", "b"}), gold_corpus({"a", "b", "b", "b", "a"}));
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].class_name, "a");
  EXPECT_NEAR(f[0].f1, 0.8, 1e-12);       // tp 2, fp 1, fn 0
  EXPECT_NEAR(f[1].f1, 0.8, 1e-12);       // tp 2, fp 0, fn 1
  EXPECT_EQ(f[0].support() + f[1].support(), 5u);
  const auto g = per_class_f1(preds({"a", "b", "b"}, {"a", "b"}), gold_corpus({"a", "a", "b"}));
  EXPECT_NEAR(g[0].f1, 2.0 / 3.0, 1e-12);
  EXPECT_NEAR(g[1].f1, 2.0 / 3.0, 1e-12);
}

TEST(PerClassF1, EmptyClassIsFlagged) {
  const auto f = per_class_f1(preds({"a", "b"}, {"a", "b", "c"}), gold_corpus({"a", "b"}, {"a", "b", "c"}));
  ASSERT_EQ(f.size(), 3u);
  EXPECT_TRUE(f[2].flagged);
  EXPECT_EQ(f[2].f1, 0.0);
  EXPECT_FALSE(f[0].flagged);
}

// One-vs-rest counts computed directly from the label lists.
TEST(PerClassF1, MatchesOneVsRestOracle) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::uniform_int_distribution<int> cls(0, 4), len(1, 80);
    const std::vector<std::string> classes = {"c0", "c1", "c2", "c3", "c4"};
    std::vector<std::string> g, p;
    for (int i = 0, n = len(rng); i < n; ++i) {
      g.push_back(classes[static_cast<std::size_t>(cls(rng))]);
      p.push_back(classes[static_cast<std::size_t>(cls(rng))]);
    }
    const auto f = per_class_f1(preds(p, classes), gold_corpus(g, classes));
    std::size_t tp_sum = 0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
      double tp = 0, fp = 0, fn = 0;
      for (std::size_t i = 0; i < g.size(); ++i) {
        tp += g[i] == classes[k] && p[i] == classes[k];
        fp += g[i] != classes[k] && p[i] == classes[k];
        fn += g[i] == classes[k] && p[i] != classes[k];
      }
      const double expect = tp + fp + fn == 0 ? 0.0 : 2 * tp / (2 * tp + fp + fn);
      EXPECT_NEAR(f[k].f1, expect, 1e-15);
      tp_sum += f[k].tp;
    }
    EXPECT_NEAR(micro_f1(preds(p, classes), gold_corpus(g, classes)),
                static_cast<double>(tp_sum) / static_cast<double>(g.size()), 1e-15);
    EXPECT_NEAR(micro_f1(preds(p, classes), gold_corpus(g, classes)), testing::accuracy(g, p), 1e-15);
  }
}

TEST(Confusion, Invariants) {
  const std::vector<std::string> classes = {"x", "y", "z"};
  const auto gold = gold_corpus({"x", "y", "z", "x", "y", "z", "x"}, classes);
  auto p = preds({"x", "z", "z", "y", "y", "x"}, classes);
  p.excluded = {"d6"};
  const auto cm = confusion_matrix(p, gold);
  EXPECT_EQ(cm.total(), 6u);
  EXPECT_EQ(cm.trace(), 3u);
  EXPECT_EQ(cm.counts[1][2], 1u);  // gold y predicted z
  const auto f = per_class_f1(p, gold);
  for (std::size_t k = 0; k < 3; ++k) {
    std::size_t row = 0, col = 0;
    for (std::size_t j = 0; j < 3; ++j) {
      row += cm.counts[k][j];
      col += cm.counts[j][k];
    }
    EXPECT_EQ(f[k].tp, cm.counts[k][k]);
    EXPECT_EQ(f[k].fp, col - cm.counts[k][k]);
    EXPECT_EQ(f[k].fn, row - cm.counts[k][k] + (k == 0 ? 1u : 0u));
  }
}

TEST(Evaluate, PredictedClassOutsideCorpusIsRejected) {
  EXPECT_THROW(evaluate(preds({"q"}, {"q"}), gold_corpus({"a"})), ConsistencyError);
}

TEST(Evaluate, ReportJsonRoundTrip) {
  testing::TempDir dir;
  auto p = preds({"a", "b", "b"}, {"a", "b"});
  p.config_fingerprint = "00ff";
  auto r = evaluate(p, gold_corpus({"a", "a", "b"}));
  r.dataset = "toy";
  write_eval_report(r, dir / "r.json");
  const auto back = read_eval_report(dir / "r.json");
  EXPECT_EQ(back.dataset, "toy");
  EXPECT_EQ(back.config_fingerprint, "00ff");
  EXPECT_DOUBLE_EQ(back.micro_f1, 2.0 / 3.0);
  EXPECT_EQ(back.per_class_f1(), r.per_class_f1());
  EXPECT_EQ(back.confusion.counts, r.confusion.counts);
  EXPECT_EQ(back.to_json().dump(), r.to_json().dump());
  EXPECT_NE(r.to_table().find("0.6667"), std::string::npos);
  EXPECT_EQ(r.per_class_csv().substr(0, r.per_class_csv().find('\n')), "dataset,class,precision,recall,f1,support,tp,fp,fn,flagged");
}

TEST(KendallTau, SimpleExamples) {
  EXPECT_DOUBLE_EQ(kendall_tau({1, 2, 3, 4}, {10, 20, 30, 40}).tau, 1.0);
  EXPECT_DOUBLE_EQ(kendall_tau({1, 2, 3, 4}, {4, 3, 2, 1}).tau, -1.0);
  EXPECT_THROW(kendall_tau({1, 1, 1}, {1, 2, 3}), NumericError);
  EXPECT_THROW(kendall_tau({1, 2, 3}, {5, 5, 5}), NumericError);
  EXPECT_THROW(kendall_tau({1, 2}, {1}), InputError);
  EXPECT_THROW(kendall_tau({1}, {1}), InputError);
}

// Reference values from scipy.stats.kendalltau (variant b).
TEST(KendallTau, MatchesScipy) {
  std::vector<double> x(12), y = {2, 1, 4, 3, 6, 5, 8, 7, 10, 9, 12, 11};
  for (int i = 0; i < 12; ++i) x[static_cast<std::size_t>(i)] = i + 1;
  auto r = kendall_tau(x, y);
  EXPECT_NEAR(r.tau, 0.8181818181818181, 1e-12);
  EXPECT_NEAR(r.p_value, 0.00021313412412417887, 1e-12);

  r = kendall_tau({1, 1, 2, 2, 3, 3, 4, 4, 5, 5}, {1, 2, 1, 3, 2, 4, 5, 3, 5, 4});
  EXPECT_NEAR(r.tau, 0.6749999999999999, 1e-12);
  EXPECT_NEAR(r.p_value, 0.012015003224274784, 1e-12);
  EXPECT_TRUE(r.tie_corrected);

  r = kendall_tau({1, 2, 3, 4, 5}, {2, 1, 4, 3, 5});
  EXPECT_NEAR(r.tau, 0.6, 1e-12);
  EXPECT_NEAR(r.p_value, 0.23333333333333334, 1e-12);

  r = kendall_tau({3, 1, 4, 1, 5, 9, 2, 6, 5, 3, 5, 8, 9, 7, 9}, {2, 7, 1, 8, 2, 8, 1, 8, 2, 8, 4, 5, 9, 0, 4});
  EXPECT_NEAR(r.tau, 0.1570874410539306, 1e-12);
  EXPECT_NEAR(r.p_value, 0.44489368769586524, 1e-12);
  EXPECT_EQ(r.n, 15u);
}

TEST(KendallTau, AgreesWithBruteForceAndIsSymmetric) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> len(3, 60), val(0, trial % 2 ? 5 : 1000);
    const int n = len(rng);
    std::vector<double> x, y;
    for (int i = 0; i < n; ++i) {
      x.push_back(val(rng));
      y.push_back(val(rng));
    }
    if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; }) ||
        std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; })) {
      continue;
    }
    const auto r = kendall_tau(x, y);
    EXPECT_NEAR(r.tau, testing::brute_force_tau_b(x, y), 1e-12);
    EXPECT_NEAR(kendall_tau(y, x).tau, r.tau, 1e-12);
    EXPECT_NEAR(kendall_tau(y, x).p_value, r.p_value, 1e-12);
    EXPECT_GE(r.p_value, 0.0);
    EXPECT_LE(r.p_value, 1.0);
    std::vector<double> cubed;
    for (double v : x) cubed.push_back(v * v * v + 7);
    EXPECT_NEAR(kendall_tau(cubed, y).tau, r.tau, 1e-12);
  }
}

TEST(AvgDocWords, PerClassMean) {
  const Corpus c("c", {{"1", "one two three", "A"}, {"2", "a b c d e f g", "A"}, {"3", "x  y", "B"}}, {"A", "B"});
  const auto v = avg_doc_words_per_class(c);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_DOUBLE_EQ(v[0].second, 5.0);
  EXPECT_DOUBLE_EQ(v[1].second, 2.0);
  const Corpus empty("c", {{"1", "one", "A"}}, {"A", "B"});
  EXPECT_THROW(avg_doc_words_per_class(empty), NumericError);
}

DatasetClassValues dcv(const std::string& name, const std::vector<double>& values) {
  DatasetClassValues d{name, {}};
  for (std::size_t i = 0; i < values.size(); ++i) d.values.emplace_back("k" + std::to_string(i), values[i]);
  return d;
}

TEST(Correlate, IncreasingRelationship) {
  const auto r = correlate_length_vs_f1({dcv("a", {0.1, 0.2, 0.3}), dcv("b", {0.4, 0.5})},
                                        {dcv("a", {10, 20, 30}), dcv("b", {40, 50})});
  EXPECT_DOUBLE_EQ(r.result.tau, 1.0);
  EXPECT_EQ(r.result.n, 5u);
  EXPECT_EQ(r.keys.front(), "a/k0");
  EXPECT_EQ(r.keys.back(), "b/k1");
}

TEST(Correlate, KeyMismatchIsNamed) {
  auto f1 = dcv("a", {0.1, 0.2, 0.3});
  auto len = dcv("a", {1, 2, 3});
  len.values[2].first = "other";
  try {
    correlate_length_vs_f1({f1}, {len});
    FAIL() << "expected ConsistencyError";
  } catch (const ConsistencyError& e) {
    EXPECT_NE(std::string(e.what()).find("a/k2"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("a/other"), std::string::npos) << e.what();
  }
}

TEST(Correlate, IndependentDataRarelySignificant) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0, 1);
  int not_significant = 0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f1, len;
    for (int i = 0; i < 50; ++i) {
      f1.push_back(u(rng));
      len.push_back(100 * u(rng));
    }
    const auto r = correlate_length_vs_f1({dcv("d", f1)}, {dcv("d", len)});
    not_significant += r.result.p_value > 0.05;
  }
  EXPECT_GE(not_significant, 90);
}

TEST(Correlate, PoolsAllClassesOfAllDatasets) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<DatasetClassValues> f1, len;
  const std::vector<std::pair<std::string, int>> sets = {{"20news", 20}, {"ag", 4}, {"yahoo", 10}, {"medical", 5}};
  for (const auto& [name, k] : sets) {
    std::vector<double> a, b;
    for (int i = 0; i < k; ++i) {
      a.push_back(u(rng));
      b.push_back(50 + 200 * u(rng));
    }
    f1.push_back(dcv(name, a));
    len.push_back(dcv(name, b));
  }
  const auto r = correlate_length_vs_f1(f1, len);
  EXPECT_EQ(r.result.n, 39u);
  EXPECT_EQ(r.keys.size(), 39u);
  EXPECT_NEAR(r.result.tau, testing::brute_force_tau_b(r.lengths, r.f1), 1e-12);
}

TEST(ImportPredictions, CsvAndPredictionFiles) {
  testing::TempDir dir;
  const std::vector<std::string> classes = {"World", "Sports", "Business", "Sci/Tech"};
  testing::write_file(dir / "p.csv", "id,class\nd0,World\nd1,Sports\n");
  const auto p = import_predictions(dir / "p.csv", classes);
  ASSERT_EQ(p.predictions.size(), 2u);
  EXPECT_EQ(p.predictions[1].predicted, "Sports");
  EXPECT_FALSE(p.predictions[0].score.has_value());
  EXPECT_EQ(p.method, "imported");
  testing::write_file(dir / "bare.csv", "d0,Business\n");
  EXPECT_EQ(import_predictions(dir / "bare.csv", classes).predictions.size(), 1u);

  testing::write_file(dir / "typo.csv", "d0,Sprots\n");
  try {
    import_predictions(dir / "typo.csv", classes);
    FAIL() << "expected ConsistencyError";
  } catch (const ConsistencyError& e) {
    EXPECT_NE(std::string(e.what()).find("Sprots"), std::string::npos);
  }

  auto full = preds({"World", "Sci/Tech"}, classes);
  full.predictions[0].scores = {0.9, 0.1, 0.0, -0.2};
  full.predictions[0].score = 0.9;
  write_predictions(full, dir / "full.jsonl");
  EXPECT_EQ(import_predictions(dir / "full.jsonl", classes), full);
  EXPECT_THROW(import_predictions(dir / "full.jsonl", {"World"}), ConsistencyError);
}

}  // namespace
}  // namespace labelvec
