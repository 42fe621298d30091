#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ecta/triplet_codec.hpp"

#include "helpers.hpp"
#include "paper_fixtures.hpp"

#include <random>

using namespace ecta;
using namespace ecta::codec;

TEST_CASE("format_triplets emits one (emotion, cause, Category) line per triplet") {
  std::vector<Triplet> ts = {{{"afraid", 0}, {"spending the night alone", 0}, "Fear"}};
  CHECK(format_triplets(ts) == "(afraid, spending the night alone, Fear)");
  ts.push_back({{"happy", 1}, {"he came home", 0}, "Happiness"});
  CHECK(format_triplets(ts) ==
        "(afraid, spending the night alone, Fear)\n(happy, he came home, Happiness)");
  CHECK(format_triplets({}) == "");
}

TEST_CASE("parse_triplets reads the case-study gold outputs") {
  const auto r1 = parse_triplets(fixtures::kCase1Gold);
  REQUIRE(r1.candidates.size() == 1);
  CHECK(r1.issues.empty());
  CHECK(r1.candidates[0].emotion == "happy");
  CHECK(r1.candidates[0].cause == "this child has become a part of our family");
  CHECK(r1.candidates[0].category == "Happiness");

  const auto r2 = parse_triplets(fixtures::kCase2Gold);
  REQUIRE(r2.candidates.size() == 1);
  CHECK(r2.candidates[0] == TripletCandidate{"afraid", "spending the night alone", "Fear"});
}

TEST_CASE("cause absorbs interior commas, category anchors the last field") {
  const auto r = parse_triplets("(sad, he left, alone at night, Sadness)");
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].emotion == "sad");
  CHECK(r.candidates[0].cause == "he left, alone at night");
  CHECK(r.candidates[0].category == "Sadness");
}

TEST_CASE("two fields is too few") {
  const auto r = parse_triplets("(happy, Happiness)");
  CHECK(r.candidates.empty());
  REQUIRE(r.issues.size() == 1);
  CHECK(r.issues[0].code == IssueCode::TooFewFields);
  CHECK(r.issues[0].raw == "(happy, Happiness)");
}

TEST_CASE("the rule-ablated case 2 blob yields an issue and no false triplet") {
  const auto r = parse_triplets(fixtures::kCase2NoRules);
  CHECK(r.candidates.empty());
  REQUIRE(r.issues.size() == 1);
  CHECK(r.issues[0].code == IssueCode::UnknownCategory);  // last field is not a category
  CHECK(r.issues[0].raw == fixtures::kCase2NoRules);
}

TEST_CASE("numbering prefixes from model output are tolerated") {
  const auto r3 = parse_triplets(fixtures::kCase3NoWorkflow);
  REQUIRE(r3.candidates.size() == 1);
  CHECK(r3.candidates[0] ==
        TripletCandidate{"moved", "Jiang Xingbao's act of bravery", "Sadness"});

  // prefix outside the parentheses
  const auto r = parse_triplets("1. (angry, the fence broke, Anger)");
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0] == TripletCandidate{"angry", "the fence broke", "Anger"});
}

TEST_CASE("the workflow-ablated case 4 output parses but with merged cause fields") {
  const auto r = parse_triplets(fixtures::kCase4NoWorkflow);
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].emotion == "excitement");
  CHECK(r.candidates[0].category == "Sadness");
  CHECK(r.candidates[0].cause ==
        "learning that his biological mother might still be alive, Mr. Su could not hide his "
        "excitement, excitement");
}

TEST_CASE("category matching is case- and whitespace-insensitive but otherwise exact") {
  CHECK(parse_triplets("(a, b, fear)").candidates[0].category == "Fear");
  CHECK(parse_triplets("(a, b,   FEAR )").candidates[0].category == "Fear");
  const auto quoted = parse_triplets("(a, b, 'Fear')");
  CHECK(quoted.candidates.empty());
  CHECK(quoted.issues[0].code == IssueCode::UnknownCategory);
}

TEST_CASE("square brackets are accepted like parentheses") {
  const auto r = parse_triplets("[happy, back home, Happiness]");
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0] == TripletCandidate{"happy", "back home", "Happiness"});
}

TEST_CASE("empty spans are rejected") {
  const auto r = parse_triplets("(, back home, Happiness)");
  CHECK(r.candidates.empty());
  CHECK(r.issues[0].code == IssueCode::EmptySpan);
}

TEST_CASE("prose lines become NotATriplet, blank lines are skipped") {
  const auto r = parse_triplets("Here are the triplets:\n\n(happy, back home, Happiness)\ndone\n");
  REQUIRE(r.candidates.size() == 1);
  REQUIRE(r.issues.size() == 2);
  CHECK(r.issues[0].code == IssueCode::NotATriplet);
  CHECK(r.issues[0].line_no == 1);
  CHECK(r.issues[1].line_no == 4);
}

TEST_CASE("parse_triplets is total over arbitrary junk") {
  std::mt19937_64 rng(99);
  const std::string alphabet = "(),.<>[]{}abc ,;'开心\n0123";
  const auto cps = unicode::decode(alphabet);
  for (int trial = 0; trial < 200; ++trial) {
    std::string text;
    const std::size_t len = rng() % 60;
    for (std::size_t i = 0; i < len; ++i) unicode::append(text, cps[rng() % cps.size()]);
    const auto r = parse_triplets(text);  // must not throw
    std::size_t non_blank = 0;
    std::size_t pos = 0;
    while (pos <= text.size() && !text.empty()) {
      const std::size_t eol = text.find('\n', pos);
      const auto line = text.substr(pos, (eol == std::string::npos ? text.size() : eol) - pos);
      if (!CategorySet::trim(line).empty()) ++non_blank;
      if (eol == std::string::npos) break;
      pos = eol + 1;
    }
    CHECK(r.candidates.size() + r.issues.size() == non_blank);
  }
}

TEST_CASE("roundtrip: parse(format(ts)) recovers every triplet with zero issues") {
  static const std::vector<std::string> emotion_pool = {"happy", "afraid", "moved", "心疼",
                                                        "angry", "surprised"};
  static const std::vector<std::string> cause_pool = {
      "the dog came home", "spending the night alone", "he left, alone at night",
      "回家了", "the gift, wrapped in silk, arrived", "losing the keys"};
  static const std::vector<std::string> cats = {"Happiness", "Sadness", "Fear",
                                                "Anger", "Disgust", "Surprise"};
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Triplet> ts;
    const std::size_t n = rng() % 5;
    for (std::size_t i = 0; i < n; ++i)
      ts.push_back({{emotion_pool[rng() % emotion_pool.size()], 0},
                    {cause_pool[rng() % cause_pool.size()], 0},
                    cats[rng() % cats.size()]});
    const auto parsed = parse_triplets(format_triplets(ts));
    CHECK(parsed.issues.empty());
    REQUIRE(parsed.candidates.size() == ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      CHECK(parsed.candidates[i].emotion == ts[i].emotion.text);
      CHECK(parsed.candidates[i].cause == ts[i].cause.text);
      CHECK(parsed.candidates[i].category == ts[i].category);
    }
  }
}

TEST_CASE("a custom category set changes what the last field may be") {
  CategorySet cats;
  cats.add("Joy");
  cats.add("Trust");
  const auto r = parse_triplets("(glad, the letter arrived, joy)", cats);
  REQUIRE(r.candidates.size() == 1);
  CHECK(r.candidates[0].category == "Joy");
  CHECK(parse_triplets("(glad, the letter arrived, Happiness)", cats).candidates.empty());
}
