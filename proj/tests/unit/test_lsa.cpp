#include <gtest/gtest.h>

#include <random>

#include <Eigen/Dense>

#include "labelvec/error.hpp"
#include "labelvec/lsa.hpp"
#include "labelvec/svd.hpp"
#include "labelvec/text.hpp"
#include "oracles.hpp"

namespace labelvec {
namespace {

Eigen::MatrixXd random_low_rank(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols, Eigen::Index rank) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0, 1);
  Eigen::MatrixXd a(rows, rank), b(rank, cols);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = g(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = g(rng);
  return a * b;
}

void expect_sign_convention(const TruncatedSvd& svd) {
  for (Eigen::Index k = 0; k < svd.rank(); ++k) {
    Eigen::Index arg = 0;
    svd.left.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(svd.left(arg, k), 0.0);
  }
}

TEST(TruncatedSvd, DenseReconstructsLowRank) {
  const auto a = random_low_rank(1, 40, 25, 3);
  const auto svd = truncated_svd(a, 3, {.method = SvdMethod::kDense});
  EXPECT_LT((svd.reconstruct() - a).norm(), 1e-9 * a.norm());
  for (Eigen::Index k = 1; k < svd.rank(); ++k) EXPECT_GE(svd.singular_values[k - 1], svd.singular_values[k]);
  EXPECT_TRUE((svd.left.transpose() * svd.left).isIdentity(1e-10));
  EXPECT_TRUE((svd.right.transpose() * svd.right).isIdentity(1e-10));
  expect_sign_convention(svd);
}

TEST(TruncatedSvd, RandomizedMatchesExactSpectrum) {
  const auto a = random_low_rank(2, 300, 120, 6);
  const auto exact = truncated_svd(a, 6, {.method = SvdMethod::kDense});
  const auto approx = truncated_svd(a, 6, {.method = SvdMethod::kRandomized, .seed = 9});
  EXPECT_LT((approx.singular_values - exact.singular_values).norm(), 1e-8 * exact.singular_values[0]);
  EXPECT_LT((approx.reconstruct() - a).norm(), 1e-8 * a.norm());
  expect_sign_convention(approx);
  // Same seed, same factors.
  const auto again = truncated_svd(a, 6, {.method = SvdMethod::kRandomized, .seed = 9});
  EXPECT_EQ(again.left, approx.left);
  EXPECT_EQ(again.singular_values, approx.singular_values);
}

TEST(TruncatedSvd, SparseAgreesWithDense) {
  const auto a = random_low_rank(3, 50, 30, 4);
  const Eigen::SparseMatrix<double> s = a.sparseView();
  const auto d = truncated_svd(a, 4, {.method = SvdMethod::kDense});
  const auto r = truncated_svd(s, 4, {.method = SvdMethod::kRandomized, .seed = 1});
  EXPECT_LT((d.singular_values - r.singular_values).norm(), 1e-8 * d.singular_values[0]);
  EXPECT_LT((d.left - r.left).norm(), 1e-6);
}

TEST(TruncatedSvd, RejectsBadInput) {
  const Eigen::MatrixXd a = Eigen::MatrixXd::Ones(3, 2);
  EXPECT_THROW(truncated_svd(a, 0), InputError);
  EXPECT_THROW(truncated_svd(a, 3), InputError);
  Eigen::MatrixXd bad = a;
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(truncated_svd(bad, 1), NumericError);
}

TEST(Tfidf, MatchesReferenceWeights) {
  const auto lr = testing::low_rank_count_corpus(4, 24, 15, 4);
  const auto td = build_tfidf(lr.corpus);
  const auto ref = testing::reference_tfidf(lr.counts);
  ASSERT_EQ(td.doc_ids.size(), 15u);
  ASSERT_EQ(td.terms.size(), 24u);
  const Eigen::MatrixXd dense = td.weights;
  for (std::size_t t = 0; t < td.terms.size(); ++t) {
    const auto ref_row = std::stoi(td.terms[t].substr(4));
    for (Eigen::Index d = 0; d < 15; ++d) {
      EXPECT_NEAR(dense(static_cast<Eigen::Index>(t), d), ref(ref_row, d), 1e-12);
    }
  }
}

TEST(Tokenizer, LowercasesAndDropsShortTokens) {
  EXPECT_EQ(tokenize_terms("Hello, WORLD! a b2 x-ray 42"),
            (std::vector<std::string>{"hello", "world", "b2", "ray", "42"}));
  EXPECT_TRUE(tokenize_terms("").empty());
  EXPECT_TRUE(tokenize_terms("a b c !").empty());
}

TEST(FitLsa, RankTwoReconstruction) {
  const auto lr = testing::low_rank_count_corpus(5, 20, 12, 2);
  const auto td = build_tfidf(lr.corpus);
  const auto model = fit_lsa(td, 2);
  const Eigen::MatrixXd dense = td.weights;
  EXPECT_LT((model.reconstruct() - dense).norm(), 1e-8);
  EXPECT_EQ(model.n_concepts(), 2u);
  const auto& s = model.singular_values();
  EXPECT_GE(s[0], s[1]);
  EXPECT_GE(s[1], 0.0);
}

TEST(FitLsa, FoldInReproducesTrainingRows) {
  const auto lr = testing::low_rank_count_corpus(6, 30, 20, 4);
  const auto model = fit_lsa(lr.corpus, 4);
  for (std::size_t i = 0; i < lr.corpus.size(); ++i) {
    const auto folded = model.project(tokenize_terms(lr.corpus[i].text));
    EXPECT_LT((folded - model.document_vector(i)).norm(), 1e-8) << i;
  }
}

TEST(FitLsa, DuplicateTokensAreCollinear) {
  const auto lr = testing::low_rank_count_corpus(7, 12, 10, 3);
  const auto model = fit_lsa(lr.corpus, 3);
  const auto one = model.project({"term001"});
  const auto two = model.project({"term001", "term001"});
  EXPECT_NEAR(cosine(one, two), 1.0, 1e-12);
  EXPECT_TRUE(two.isApprox(2.0 * one, 1e-12));
}

TEST(FitLsa, Errors) {
  const auto lr = testing::low_rank_count_corpus(8, 12, 10, 3);
  EXPECT_THROW(fit_lsa(lr.corpus, 0), InputError);
  EXPECT_THROW(fit_lsa(lr.corpus, 11), InputError);
  EXPECT_THROW(fit_lsa(lr.corpus, 5), NumericError);  // numerical rank is 3
  const auto model = fit_lsa(lr.corpus, 3);
  EXPECT_THROW(model.project({"unknown", "words"}), NumericError);
  EXPECT_NO_THROW(model.project({"unknown", "term002"}));
}

TEST(FitLsa, RefitIsBitwiseStable) {
  const auto lr = testing::low_rank_count_corpus(9, 30, 25, 4);
  const auto a = fit_lsa(lr.corpus, 4);
  const auto b = fit_lsa(lr.corpus, 4);
  EXPECT_EQ(a.factors().left, b.factors().left);
  EXPECT_EQ(a.factors().right, b.factors().right);
  EXPECT_EQ(a.singular_values(), b.singular_values());
}

TEST(FitLsa, SaveLoadRoundTrip) {
  testing::TempDir dir;
  const auto lr = testing::low_rank_count_corpus(10, 16, 12, 3);
  const auto model = fit_lsa(lr.corpus, 3);
  model.save(dir / "m.json", "abc");
  const auto back = LsaModel::load(dir / "m.json");
  EXPECT_EQ(back.terms(), model.terms());
  EXPECT_EQ(back.doc_ids(), model.doc_ids());
  EXPECT_TRUE(back.factors().left.isApprox(model.factors().left, 1e-15));
  const auto q = tokenize_terms(lr.corpus[3].text);
  EXPECT_LT((back.project(q) - model.project(q)).norm(), 1e-12);
  EXPECT_THROW(LsaModel::load(dir / "missing.json"), InputError);
}

TEST(FitLsa, DocumentMatrixHasOneRowPerDocument) {
  const auto lr = testing::low_rank_count_corpus(11, 16, 12, 3);
  const auto model = fit_lsa(lr.corpus, 3);
  const auto m = model.document_matrix();
  EXPECT_EQ(m.size(), 12u);
  EXPECT_EQ(m.dim(), 3u);
  EXPECT_EQ(m.id(4), "doc4");
  EXPECT_EQ(Vector(m.vector(4)), model.document_vector(4));
}

}  // namespace
}  // namespace labelvec
