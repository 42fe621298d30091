#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ecta/corpus.hpp"
#include "ecta/json_io.hpp"

#include "helpers.hpp"

#include <random>

using namespace ecta;

TEST_CASE("segment_clauses splits on CJK and Latin delimiters, delimiter attaches left") {
  const auto clauses = segment_clauses("A，B。");
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0] == Clause{0, "A，", 0, 2});
  CHECK(clauses[1] == Clause{1, "B。", 2, 4});
}

TEST_CASE("segment_clauses of undelimited text yields a single clause") {
  const auto clauses = segment_clauses("hello");
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0] == Clause{0, "hello", 0, 5});
}

TEST_CASE("segment_clauses keeps a trailing undelimited segment") {
  const auto clauses = segment_clauses("a, b");
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0].text == "a,");
  CHECK(clauses[1].text == " b");
}

TEST_CASE("segment_clauses rejects empty input") {
  CHECK_THROWS_AS(segment_clauses(""), Error);
  try {
    segment_clauses("");
  } catch (const Error& e) {
    CHECK(e.code() == errc::empty_input);
  }
}

TEST_CASE("segmentation concatenation reproduces the input exactly") {
  std::mt19937_64 rng(7);
  const std::string alphabet = "ab c,;!?\n。，！家人开心x.";
  const auto cps = unicode::decode(alphabet);
  for (int trial = 0; trial < 50; ++trial) {
    std::string text;
    const std::size_t len = 1 + rng() % 40;
    for (std::size_t i = 0; i < len; ++i) unicode::append(text, cps[rng() % cps.size()]);
    const auto clauses = segment_clauses(text);
    std::string joined;
    for (const Clause& c : clauses) joined += c.text;
    CHECK(joined == text);
    // offsets are contiguous and cover the text
    std::size_t expected = 0;
    for (const Clause& c : clauses) {
      CHECK(c.char_start == expected);
      CHECK(c.char_end > c.char_start);
      expected = c.char_end;
    }
    CHECK(expected == unicode::length(text));
  }
}

TEST_CASE("load_corpus reads well-formed JSONL") {
  testutil::TempFile file(
      R"({"id": "d1", "text": "he came home, we were happy.", "triplets": [{"emotion": {"text": "happy", "clause_index": 1}, "cause": {"text": "he came home", "clause_index": 0}, "category": "Happiness"}]})"
      "\n"
      R"({"id": "d2", "text": "nothing to see here.", "triplets": []})"
      "\n",
      ".jsonl");
  const auto docs = load_corpus(file.path());
  REQUIRE(docs.size() == 2);
  CHECK(docs[0].id == "d1");
  CHECK(docs[0].clauses.size() == 2);
  CHECK(docs[0].triplets.size() == 1);
  CHECK(docs[1].triplets.empty());
}

TEST_CASE("load_corpus rejects unknown category with line number") {
  testutil::TempFile file(
      R"({"id": "d1", "text": "we were happy, he came home.", "triplets": [{"emotion": {"text": "happy", "clause_index": 0}, "cause": {"text": "he came home", "clause_index": 1}, "category": "Joy"}]})"
      "\n",
      ".jsonl");
  try {
    load_corpus(file.path());
    FAIL("expected InvariantViolation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invariant_violation);
    CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    CHECK(std::string(e.what()).find("UNKNOWN_CATEGORY") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects a cause span that crosses a clause boundary") {
  // "home, we" straddles the comma: clause 0 is "he came home," clause 1 " we were happy."
  testutil::TempFile file(
      R"({"id": "d1", "text": "he came home, we were happy.", "triplets": [{"emotion": {"text": "happy", "clause_index": 1}, "cause": {"text": "home, we", "clause_index": 0}, "category": "Happiness"}]})"
      "\n",
      ".jsonl");
  try {
    load_corpus(file.path());
    FAIL("expected InvariantViolation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::invariant_violation);
    CHECK(std::string(e.what()).find("SPAN_NOT_IN_CLAUSE") != std::string::npos);
  }
}

TEST_CASE("load_corpus rejects duplicate ids") {
  testutil::TempFile file(
      R"({"id": "d1", "text": "a."})" "\n" R"({"id": "d1", "text": "b."})" "\n", ".jsonl");
  try {
    load_corpus(file.path());
    FAIL("expected DuplicateId");
  } catch (const Error& e) {
    CHECK(e.code() == errc::duplicate_id);
  }
}

TEST_CASE("load_corpus rejects malformed JSON with line number") {
  testutil::TempFile file("{\"id\": \"d1\", \"text\": \"ok.\"}\nnot json\n", ".jsonl");
  try {
    load_corpus(file.path());
    FAIL("expected MalformedRecord");
  } catch (const Error& e) {
    CHECK(e.code() == errc::malformed_record);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("validate_document: zero triplets is valid") {
  Document doc;
  doc.id = "d";
  doc.text = "quiet afternoon.";
  doc.clauses = segment_clauses(doc.text);
  CHECK(validate_document(doc).ok());
}

TEST_CASE("validate_document flags a span missing from its clause") {
  Document doc;
  doc.id = "d";
  doc.text = "he came home, we were happy.";
  doc.clauses = segment_clauses(doc.text);
  doc.triplets.push_back({{"delighted", 1}, {"he came home", 0}, "Happiness"});
  const auto report = validate_document(doc);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].code == "SPAN_NOT_IN_CLAUSE");
}

TEST_CASE("validate_document flags a coverage gap between clauses") {
  Document doc;
  doc.id = "d";
  doc.text = "ab, cd.";
  doc.clauses = segment_clauses(doc.text);
  doc.clauses[1].char_start += 1;  // 1-character gap
  doc.clauses[1].text = doc.clauses[1].text.substr(1);
  bool found = false;
  for (const auto& v : validate_document(doc).violations) found |= v.code == "CLAUSE_COVERAGE";
  CHECK(found);
}

TEST_CASE("corpus save/load round-trips field-for-field") {
  const auto docs = testutil::synthetic_corpus({.documents = 25, .seed = 11});
  for (const Document& d : docs) {
    INFO("doc ", d.id);
    CHECK(validate_document(d).ok());
  }
  const std::string path = testutil::temp_path(".jsonl");
  save_corpus(path, docs);
  const auto loaded = load_corpus(path);
  REQUIRE(loaded.size() == docs.size());
  for (std::size_t i = 0; i < docs.size(); ++i) CHECK(loaded[i] == docs[i]);
  std::filesystem::remove(path);
}

TEST_CASE("every document produced by load_corpus validates cleanly") {
  const auto docs = load_corpus(testutil::fixture_path("corpus_small.jsonl"));
  CHECK(docs.size() >= 10);
  for (const Document& d : docs) CHECK(validate_document(d).ok());
}

TEST_CASE("CategorySet matches case- and whitespace-insensitively") {
  const auto cats = CategorySet::standard();
  CHECK(cats.labels().size() == 6);
  CHECK(cats.match("  happiness ") == "Happiness");
  CHECK(cats.match("FEAR") == "Fear");
  CHECK(!cats.match("'Fear'").has_value());
  CHECK(!cats.match("Excited").has_value());
  CHECK(!parse_emotion_category("Joy").has_value());
  CHECK(parse_emotion_category("Disgust") == EmotionCategory::Disgust);
}

TEST_CASE("CategorySet can be loaded from a file for non-standard corpora") {
  testutil::TempFile file("# custom labels\nJoy\nTrust\n", ".txt");
  const auto cats = CategorySet::from_file(file.path());
  CHECK(cats.labels() == std::vector<std::string>{"Joy", "Trust"});
  CHECK(cats.match("joy") == "Joy");
  CHECK(!cats.match("Happiness").has_value());
}
