#pragma once

#include <string>
#include <vector>

#include "ecta/annotate.hpp"
#include "ecta/corpus.hpp"

// A source document plus one passing generation and four generations that
// each violate exactly one filter rule.

namespace fixtures {

inline ecta::Document filter_source_doc() {
  ecta::Document doc;
  doc.id = "filter-src";
  doc.text = "The dog came home, we were happy.";
  doc.clauses = ecta::segment_clauses(doc.text);
  doc.triplets = {{{"happy", 1}, {"The dog came home", 0}, "Happiness"}};
  return doc;
}

struct FilterCase {
  const char* name;
  const char* expect_rule;  // nullptr = accepted
  std::string generation;
};

inline std::vector<FilterCase> filter_cases() {
  return {
      {"identity", nullptr, ecta::annotation::annotate(filter_source_doc())},
      {"cross-clause cause span", "R-A",
       "[Cause 1]<The dog came home, we> were [Emotion 1]{happy}.\n"
       "Triplets:\n(happy, The dog came home, we, Happiness)"},
      {"broken marker", "R-B",
       "[Cause 1]<The dog came home, we were [Emotion 1]{happy}.\n"
       "Triplets:\n(happy, The dog came home, Happiness)"},
      {"unknown category", "R-C",
       "[Cause 1]<The dog came home>, we were [Emotion 1]{happy}.\n"
       "Triplets:\n(happy, The dog came home, Excited)"},
      {"altered span text", "R-D",
       "[Cause 1]<The dog came home>, we were [Emotion 1]{glad}.\n"
       "Triplets:\n(glad, The dog came home, Happiness)"},
  };
}

}  // namespace fixtures
