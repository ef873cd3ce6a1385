#include <gtest/gtest.h>

#include "docroute/corpus.hpp"
#include "docroute/errors.hpp"
#include "test_support.hpp"

using namespace docroute;
using docroute::testing::TempDir;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no docroute::Error thrown";
  return ErrorKind::kInvalidArgument;
}

std::string words(std::size_t n) {
  std::string s;
  for (std::size_t i = 0; i < n; ++i) s += "w" + std::to_string(i) + " ";
  return s;
}

}  // namespace

TEST(Tokenize, CollapsesWhitespace) {
  EXPECT_EQ(tokenize("a  b\nc"), (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_TRUE(tokenize("").empty());
  EXPECT_TRUE(tokenize(" \t\n ").empty());
}

TEST(Tokenize, UnicodeWhitespaceAndNfc) {
  // U+00A0 and U+3000 separate tokens; "e" + U+0301 composes to U+00E9.
  EXPECT_EQ(tokenize("x\xC2\xA0y\xE3\x80\x80z"), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(tokenize("caf\x65\xCC\x81"), (std::vector<std::string>{"caf\xC3\xA9"}));
}

TEST(Tokenize, LoremWordCount) {
  // 600 per `wc -w`.
  const std::string text = docroute::testing::read_file(docroute::testing::data_path("lorem600.txt"));
  EXPECT_EQ(tokenize(text).size(), 600u);
}

TEST(ChunkDocument, StrideArithmetic) {
  const Document doc{"d", std::nullopt, words(600)};
  const auto chunks = chunk_document(doc, ChunkParams{300, 0.15});
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(chunks[0].start_token, 0u);
  EXPECT_EQ(chunks[0].end_token, 300u);
  EXPECT_EQ(chunks[1].start_token, 255u);
  EXPECT_EQ(chunks[1].end_token, 555u);
  EXPECT_EQ(chunks[2].start_token, 510u);
  EXPECT_EQ(chunks[2].end_token, 600u);
  EXPECT_EQ(chunks[1].chunk_id, "d#1");
  EXPECT_EQ(chunks[2].ordinal, 2u);
  EXPECT_EQ(tokenize(chunks[1].text).front(), "w255");
}

TEST(ChunkDocument, ShortAndExactFit) {
  auto short_doc = chunk_document(Document{"s", std::nullopt, words(100)}, ChunkParams{});
  ASSERT_EQ(short_doc.size(), 1u);
  EXPECT_EQ(short_doc[0].end_token, 100u);
  auto exact = chunk_document(Document{"e", std::nullopt, words(300)}, ChunkParams{});
  ASSERT_EQ(exact.size(), 1u);
  EXPECT_EQ(exact[0].end_token, 300u);
}

TEST(ChunkDocument, CoversEveryToken) {
  for (std::size_t n : {1u, 299u, 301u, 555u, 556u, 1000u}) {
    const auto chunks = chunk_document(Document{"d", std::nullopt, words(n)}, ChunkParams{});
    EXPECT_EQ(chunks.front().start_token, 0u);
    EXPECT_EQ(chunks.back().end_token, n);
    for (std::size_t i = 1; i < chunks.size(); ++i) EXPECT_EQ(chunks[i].start_token, chunks[i - 1].start_token + 255);
  }
}

TEST(ChunkParams, Validation) {
  EXPECT_EQ(kind_of([] { ChunkParams{300, 1.0}.validate(); }), ErrorKind::kInvalidArgument);
  EXPECT_EQ(kind_of([] { ChunkParams{0, 0.1}.validate(); }), ErrorKind::kInvalidArgument);
  EXPECT_NO_THROW((ChunkParams{1, 0.0}.validate()));
}

TEST(LoadCorpus, JsonlFieldMapping) {
  const auto docs = parse_jsonl_corpus(R"({"id":"d1","text":"hello world"})" "\n\n"
                                       R"({"id":"d2","title":"T","text":"x"})");
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "d1");
  EXPECT_EQ(docs[0].text, "hello world");
  EXPECT_FALSE(docs[0].title.has_value());
  EXPECT_EQ(docs[1].title.value(), "T");
}

TEST(LoadCorpus, DirectoryOrder) {
  TempDir dir("corpus");
  docroute::testing::write_file(dir / "b.txt", "beta text");
  docroute::testing::write_file(dir / "a.txt", "alpha text");
  const auto docs = load_corpus(dir.path());
  ASSERT_EQ(docs.size(), 2u);
  EXPECT_EQ(docs[0].doc_id, "a.txt");
  EXPECT_EQ(docs[1].doc_id, "b.txt");
}

TEST(LoadCorpus, Errors) {
  EXPECT_EQ(kind_of([] { parse_jsonl_corpus("{\"id\":\"d1\",\"text\":\"a\"}\n{\"id\":\"d1\",\"text\":\"b\"}"); }),
            ErrorKind::kDuplicateId);
  EXPECT_EQ(kind_of([] { parse_jsonl_corpus("{\"id\":\"d1\",\"text\":\"  \"}"); }), ErrorKind::kEmptyDocument);
  EXPECT_EQ(kind_of([] { parse_jsonl_corpus("{\"id\":\"d1\""); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { parse_jsonl_corpus("{\"text\":\"x\"}"); }), ErrorKind::kParse);
  EXPECT_EQ(kind_of([] { load_corpus("/nonexistent/corpus.jsonl"); }), ErrorKind::kNotFound);

  TempDir dir("corpus");
  docroute::testing::write_file(dir / "empty.jsonl", "\n");
  EXPECT_EQ(kind_of([&] { load_corpus(dir / "empty.jsonl"); }), ErrorKind::kEmptyCorpus);
}

TEST(LoadCorpus, ParseErrorNamesLine) {
  try {
    parse_jsonl_corpus("{\"id\":\"a\",\"text\":\"x\"}\nnot json", "c.jsonl");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("c.jsonl:2"), std::string::npos) << e.what();
  }
}

TEST(ChunkCorpus, GlobalOrder) {
  const std::vector<Document> docs{{"a", std::nullopt, words(400)}, {"b", std::nullopt, words(10)}};
  const auto chunks = chunk_corpus(docs, ChunkParams{});
  ASSERT_EQ(chunks.size(), 3u);
  EXPECT_EQ(chunks[0].chunk_id, "a#0");
  EXPECT_EQ(chunks[1].chunk_id, "a#1");
  EXPECT_EQ(chunks[2].chunk_id, "b#0");
}
