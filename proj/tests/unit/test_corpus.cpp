#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "labelvec/corpus.hpp"
#include "labelvec/csv.hpp"
#include "labelvec/error.hpp"
#include "oracles.hpp"

namespace labelvec {
namespace {

using testing::TempDir;
using testing::write_file;

std::string words(std::size_t n, const std::string& w = "w") {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += (i ? " " : "") + w;
  return s;
}

TEST(SentenceTokenize, SplitsAfterTerminatorsFollowedBySpace) {
  EXPECT_EQ(sentence_tokenize("A b. C d! E?"), (std::vector<std::string>{"A b.", "C d!", "E?"}));
}

TEST(SentenceTokenize, EmptyTextHasNoSentences) { EXPECT_TRUE(sentence_tokenize("").empty()); }

TEST(SentenceTokenize, TrailingFragmentIsASentence) {
  EXPECT_EQ(sentence_tokenize("no terminator"), (std::vector<std::string>{"no terminator"}));
  EXPECT_EQ(sentence_tokenize("One. two"), (std::vector<std::string>{"One.", "two"}));
}

TEST(SentenceTokenize, TerminatorWithoutWhitespaceDoesNotSplit) {
  EXPECT_EQ(sentence_tokenize("e.g. 3.14 is pi."), (std::vector<std::string>{"e.g.", "3.14 is pi."}));
  EXPECT_EQ(sentence_tokenize("  lead.\n\ttrail!  "), (std::vector<std::string>{"lead.", "trail!"}));
}

TEST(SentenceTokenize, MatchesReferenceSplitterOnRandomText) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const auto text = testing::random_text(rng, 1 + i % 9, 1, 12);
    EXPECT_EQ(sentence_tokenize(text), testing::reference_sentences(text)) << text;
  }
}

TEST(CountWords, CountsWhitespaceRuns) {
  EXPECT_EQ(count_words(""), 0u);
  EXPECT_EQ(count_words("   "), 0u);
  EXPECT_EQ(count_words("one"), 1u);
  EXPECT_EQ(count_words(" a\tb\n c  "), 3u);
}

TEST(SplitDocument, ClosesParagraphWhenBudgetReached) {
  const Document doc{"d", words(3, "a") + ". " + words(3, "b") + ". " + words(2, "c") + ".", "x"};
  const auto set = split_document(doc, 12);
  ASSERT_EQ(set.paragraphs.size(), 2u);
  EXPECT_EQ(set.paragraphs[0].word_count, 3u);
  EXPECT_EQ(set.paragraphs[1].word_count, 5u);
  EXPECT_EQ(set.paragraphs[0].sentences.size(), 1u);
  EXPECT_EQ(set.paragraphs[1].sentences.size(), 2u);
  EXPECT_EQ(set.doc_id, "d");
}

TEST(SplitDocument, OversizeSentenceIsItsOwnParagraph) {
  const auto set = split_document({"d", words(100) + ".", std::nullopt}, 12);
  ASSERT_EQ(set.paragraphs.size(), 1u);
  EXPECT_EQ(set.paragraphs[0].word_count, 100u);
}

TEST(SplitDocument, EmptyDocumentHasNoParagraphs) {
  EXPECT_TRUE(split_document({"d", "", std::nullopt}, 64).paragraphs.empty());
  EXPECT_TRUE(split_document({"d", " \n ", std::nullopt}, 64).paragraphs.empty());
}

TEST(SplitDocument, RejectsTinyBudget) { EXPECT_THROW(split_document({"d", "x", std::nullopt}, 1), InputError); }

TEST(SplitDocument, ParagraphTextJoinsSentences) {
  const auto set = split_document({"d", "One two.  Three!", std::nullopt}, 64);
  ASSERT_EQ(set.paragraphs.size(), 1u);
  EXPECT_EQ(set.paragraphs[0].text(), "One two. Three!");
}

TEST(SplitDocument, FlattenReproducesSentencesAndRespectsBudget) {
  std::mt19937_64 rng(5);
  for (std::size_t m : {2u, 3u, 8u, 20u, 64u}) {
    for (int i = 0; i < 100; ++i) {
      const Document doc{"d", testing::random_text(rng, 1 + i % 15, 1, 10), std::nullopt};
      const auto set = split_document(doc, m);
      EXPECT_EQ(set.flatten(), testing::reference_sentences(doc.text));
      for (const auto& p : set.paragraphs) {
        std::size_t n = 0;
        for (const auto& s : p.sentences) n += testing::reference_word_count(s);
        EXPECT_EQ(p.word_count, n);
        if (p.sentences.size() > 1) EXPECT_LT(2 * p.word_count, m);
      }
    }
  }
}

TEST(SplitDocument, SharedBoundaryVectors) {
  // Cross-language boundary fixtures shared with the exporter.
  const auto path = std::filesystem::path(LABELVEC_SOURCE_DIR) / "data/examples/split_vectors.json";
  std::ifstream in(path);
  ASSERT_TRUE(in) << path;
  const auto cases = nlohmann::json::parse(in);
  ASSERT_FALSE(cases.empty());
  for (const auto& c : cases) {
    const auto set = split_document({"d", c.at("text").get<std::string>(), std::nullopt}, c.at("max_seq_len").get<std::size_t>());
    std::vector<std::vector<std::string>> got;
    for (const auto& p : set.paragraphs) got.push_back(p.sentences);
    EXPECT_EQ(got, c.at("paragraphs").get<std::vector<std::vector<std::string>>>()) << c.at("text");
  }
}

Corpus make(std::vector<std::pair<std::string, std::string>> id_text) {
  std::vector<Document> docs;
  for (auto& [id, text] : id_text) docs.push_back({id, text, "c"});
  return Corpus("t", std::move(docs));
}

TEST(FilterShort, KeepsDocumentsWithEnoughWords) {
  const auto c = filter_short(make({{"1", ""}, {"2", "yes"}, {"3", "yes indeed"}}), 2);
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c[0].text, "yes indeed");
}

TEST(FilterShort, IdentityAndEmptyCases) {
  const auto c = make({{"1", "a"}, {"2", "b c"}});
  EXPECT_EQ(filter_short(c, 1).size(), 2u);
  EXPECT_EQ(filter_short(make({{"1", "a"}, {"2", "b"}, {"3", "c"}, {"4", "d"}, {"5", "e"}}), 2).size(), 0u);
  EXPECT_THROW(filter_short(c, 0), InputError);
}

TEST(FilterShort, Idempotent) {
  std::mt19937_64 rng(3);
  std::vector<std::pair<std::string, std::string>> docs;
  for (int i = 0; i < 50; ++i) docs.emplace_back(std::to_string(i), words(rng() % 4));
  const auto once = filter_short(make(docs), 2);
  const auto twice = filter_short(once, 2);
  ASSERT_EQ(once.size(), twice.size());
  for (std::size_t i = 0; i < once.size(); ++i) EXPECT_EQ(once[i].id, twice[i].id);
}

TEST(ConcatSplits, AppendsAndDetectsCollisions) {
  const auto a = make({{"1", "x"}, {"2", "y"}});
  const auto b = make({{"3", "z"}});
  const auto ab = concat_splits(a, b);
  ASSERT_EQ(ab.size(), 3u);
  EXPECT_EQ(ab[2].id, "3");
  EXPECT_EQ(concat_splits(a, Corpus("e", {})).size(), 2u);
  EXPECT_THROW(concat_splits(make({{"7", "x"}}), make({{"7", "y"}})), ConsistencyError);
}

TEST(ConcatSplits, Associative) {
  const auto a = make({{"1", "x"}});
  const auto b = make({{"2", "y"}});
  const auto c = make({{"3", "z"}});
  const auto left = concat_splits(concat_splits(a, b), c);
  const auto right = concat_splits(a, concat_splits(b, c));
  ASSERT_EQ(left.size(), right.size());
  for (std::size_t i = 0; i < left.size(); ++i) EXPECT_EQ(left[i].id, right[i].id);
}

TEST(Corpus, RejectsDuplicateIdsAndTracksClasses) {
  EXPECT_THROW(Corpus("t", {{"1", "a", "x"}, {"1", "b", "y"}}), ConsistencyError);
  const Corpus c("t", {{"1", "a", "y"}, {"2", "b", "x"}, {"3", "c", std::nullopt}}, {"x"});
  EXPECT_EQ(c.class_names(), (std::vector<std::string>{"x", "y"}));
  ASSERT_NE(c.find("2"), nullptr);
  EXPECT_EQ(c.find("nope"), nullptr);
}

TEST(LoadCorpus, JsonlRoundTrip) {
  TempDir dir;
  const Corpus c("t", {{"1", "hello \"world\"\nline", "a"}, {"2", "x", std::nullopt}});
  write_corpus_jsonl(c, dir / "c.jsonl");
  const auto back = load_corpus(dir / "c.jsonl", CorpusFormat::kJsonl);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back[0].text, c[0].text);
  EXPECT_EQ(back[0].gold_class, std::optional<std::string>("a"));
  EXPECT_FALSE(back[1].gold_class.has_value());
}

TEST(LoadCorpus, MalformedJsonlNamesLine) {
  TempDir dir;
  write_file(dir / "bad.jsonl", "{\"id\":\"1\",\"text\":\"a\",\"class\":\"x\"}\n{not json}\n");
  try {
    load_corpus(dir / "bad.jsonl", CorpusFormat::kJsonl);
    FAIL() << "expected InputError";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find(":2"), std::string::npos) << e.what();
  }
}

TEST(LoadCorpus, DuplicateIdInFile) {
  TempDir dir;
  write_file(dir / "dup.jsonl", "{\"id\":\"1\",\"text\":\"a\",\"class\":\"x\"}\n{\"id\":\"1\",\"text\":\"b\",\"class\":\"x\"}\n");
  EXPECT_THROW(load_corpus(dir / "dup.jsonl", CorpusFormat::kJsonl), ConsistencyError);
}

TEST(LoadCorpus, MissingFile) { EXPECT_THROW(load_corpus("/nonexistent/x.jsonl", CorpusFormat::kJsonl), InputError); }

TEST(LoadCorpus, CsvWithMappingAndLabelMap) {
  TempDir dir;
  write_file(dir / "c.csv", "label,title,body\n1,\"Hello, there\",\"multi\nline\"\n2,B,b\n");
  LoadOptions opt;
  opt.csv.has_header = true;
  opt.csv.text_columns = {"title", "body"};
  opt.csv.class_column = "label";
  opt.csv.label_map = {{"1", "One"}, {"2", "Two"}};
  opt.csv.id_prefix = "train-";
  const auto c = load_corpus(dir / "c.csv", CorpusFormat::kCsv, opt);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].text, "Hello, there multi\nline");
  EXPECT_EQ(c[0].gold_class, std::optional<std::string>("One"));
  EXPECT_EQ(c.class_names(), (std::vector<std::string>{"One", "Two"}));
}

TEST(LoadCorpus, CsvUnknownLabelOrShortRow) {
  TempDir dir;
  write_file(dir / "c.csv", "1,a\n9,b\n");
  LoadOptions opt;
  opt.csv.text_columns = {"1"};
  opt.csv.class_column = "0";
  opt.csv.label_map = {{"1", "One"}};
  EXPECT_THROW(load_corpus(dir / "c.csv", CorpusFormat::kCsv, opt), InputError);
  write_file(dir / "short.csv", "1,a\n1\n");
  opt.csv.label_map.clear();
  EXPECT_THROW(load_corpus(dir / "short.csv", CorpusFormat::kCsv, opt), InputError);
}

TEST(LoadCorpus, NewsgroupsDirectory) {
  TempDir dir;
  std::filesystem::create_directories(dir / "root/sci.space");
  std::filesystem::create_directories(dir / "root/alt.atheism");
  write_file(dir / "root/sci.space/101", "orbit");
  write_file(dir / "root/alt.atheism/7", "belief");
  const auto c = load_corpus(dir / "root", CorpusFormat::kNewsgroupsDir);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].id, "alt.atheism/7");
  EXPECT_EQ(c.class_names(), (std::vector<std::string>{"alt.atheism", "sci.space"}));
}

TEST(CsvReader, QuotesAndLineEndings) {
  std::istringstream in("a,\"b \"\"q\"\"\",c\r\n\"x\ny\",,z\n");
  CsvReader r(in);
  auto row = r.next();
  ASSERT_TRUE(row);
  EXPECT_EQ(*row, (std::vector<std::string>{"a", "b \"q\"", "c"}));
  EXPECT_EQ(r.record_line(), 1u);
  row = r.next();
  ASSERT_TRUE(row);
  EXPECT_EQ(*row, (std::vector<std::string>{"x\ny", "", "z"}));
  EXPECT_EQ(r.record_line(), 2u);
  EXPECT_FALSE(r.next());
}

std::filesystem::path bundled_spec(const std::string& name) {
  return std::filesystem::path(LABELVEC_SOURCE_DIR) / "data/specs" / (name + ".json");
}

TEST(ClassSpecs, BundledAgSpec) {
  const auto specs = load_class_specs(bundled_spec("ag_news"));
  ASSERT_EQ(specs.size(), 4u);
  EXPECT_EQ(specs[0].name, "World");
  EXPECT_EQ(specs[0].keywords, (std::vector<std::string>{"government"}));
  EXPECT_EQ(specs[1].name, "Sports");
  EXPECT_EQ(specs[1].keywords, (std::vector<std::string>{"sports"}));
  EXPECT_EQ(specs[2].name, "Business");
  EXPECT_EQ(specs[2].keywords, (std::vector<std::string>{"business"}));
  EXPECT_EQ(specs[3].name, "Science/Technology");
  EXPECT_EQ(specs[3].keywords, (std::vector<std::string>{"science", "technology"}));
}

TEST(ClassSpecs, BundledSpecSizes) {
  const auto medical = load_class_specs(bundled_spec("medical_abstracts"));
  ASSERT_EQ(medical.size(), 5u);
  EXPECT_EQ(medical[0].name, "Neoplasms");
  EXPECT_EQ(medical[0].keywords, (std::vector<std::string>{"neoplasms"}));
  EXPECT_EQ(load_class_specs(bundled_spec("20newsgroups")).size(), 20u);
  EXPECT_EQ(load_class_specs(bundled_spec("yahoo_answers")).size(), 10u);
}

TEST(ClassSpecs, Validation) {
  using nlohmann::json;
  EXPECT_THROW(parse_class_specs(json::parse(R"({"classes":[{"name":"a","keywords":[]}]})")), ConsistencyError);
  EXPECT_THROW(parse_class_specs(json::parse(R"({"classes":[]})")), ConsistencyError);
  EXPECT_THROW(
      parse_class_specs(json::parse(R"([{"name":"a","keywords":["x"]},{"name":"a","keywords":["y"]}])")),
      ConsistencyError);
  EXPECT_THROW(parse_class_specs(json::parse(R"({"classes":[{"keywords":["x"]}]})")), InputError);
  const auto ok = parse_class_specs(json::parse(R"([{"name":"a","keywords":["x","y"]}])"));
  EXPECT_EQ(class_names_of(ok), (std::vector<std::string>{"a"}));
}

}  // namespace
}  // namespace labelvec
