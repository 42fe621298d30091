#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ecta/error.hpp"
#include "ecta/unicode.hpp"

namespace ecta {

// ---------------------------------------------------------------------------
// Emotion categories
// ---------------------------------------------------------------------------

enum class EmotionCategory { Happiness, Sadness, Fear, Anger, Disgust, Surprise };

inline constexpr std::array<EmotionCategory, 6> kAllCategories = {
    EmotionCategory::Happiness, EmotionCategory::Sadness, EmotionCategory::Fear,
    EmotionCategory::Anger,     EmotionCategory::Disgust, EmotionCategory::Surprise};

inline std::string_view to_string(EmotionCategory c) {
  switch (c) {
    case EmotionCategory::Happiness: return "Happiness";
    case EmotionCategory::Sadness: return "Sadness";
    case EmotionCategory::Fear: return "Fear";
    case EmotionCategory::Anger: return "Anger";
    case EmotionCategory::Disgust: return "Disgust";
    case EmotionCategory::Surprise: return "Surprise";
  }
  return "?";
}

inline std::optional<EmotionCategory> parse_emotion_category(std::string_view s) {
  for (EmotionCategory c : kAllCategories)
    if (s == to_string(c)) return c;
  return std::nullopt;
}

// The set of category labels a corpus (or a model-output parse) accepts.
// Defaults to the six standard labels; loadable from a file for corpora that
// use a different scheme. Matching is case- and whitespace-insensitive, the
// canonical label is the one listed.
class CategorySet {
 public:
  static CategorySet standard() {
    CategorySet cs;
    for (EmotionCategory c : kAllCategories) cs.add(std::string(to_string(c)));
    return cs;
  }

  // One label per line; blank lines and lines starting with '#' ignored.
  static CategorySet from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open category file: " + path);
    CategorySet cs;
    std::string line;
    while (std::getline(in, line)) {
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      cs.add(t);
    }
    if (cs.labels_.empty())
      throw Error(errc::bad_config, "category file has no labels: " + path);
    return cs;
  }

  void add(const std::string& label) {
    if (contains(label)) return;
    labels_.push_back(label);
  }

  const std::vector<std::string>& labels() const { return labels_; }

  bool contains(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  // Case-insensitive, trimmed match; returns the canonical label.
  std::optional<std::string> match(std::string_view raw) const {
    const std::string key = fold(trim(raw));
    for (const auto& label : labels_)
      if (fold(label) == key) return label;
    return std::nullopt;
  }

  static std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
  }

 private:
  static std::string fold(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
  }

  std::vector<std::string> labels_;
};

// ---------------------------------------------------------------------------
// Corpus data model
// ---------------------------------------------------------------------------

struct Clause {
  std::size_t index = 0;
  std::string text;
  std::size_t char_start = 0;  // half-open, in unicode scalar values
  std::size_t char_end = 0;

  bool operator==(const Clause&) const = default;
};

struct Span {
  std::string text;
  std::size_t clause_index = 0;

  bool operator==(const Span&) const = default;
};

struct Triplet {
  Span emotion;
  Span cause;
  std::string category;  // canonical label, standard six unless overridden

  bool operator==(const Triplet&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<Clause> clauses;  // derived from text, never stored on disk
  std::vector<Triplet> triplets;

  bool operator==(const Document&) const = default;
};

// ---------------------------------------------------------------------------
// Clause segmentation
// ---------------------------------------------------------------------------

// CJK + Latin sentence punctuation and comma, plus newline.
inline const std::u32string& default_delimiters() {
  static const std::u32string d = U"。！？；，!?;,\n";
  return d;
}

// Splits text into clauses. Each delimiter character terminates a clause and
// belongs to it; a trailing undelimited segment forms a final clause.
inline std::vector<Clause> segment_clauses(
    std::string_view text, const std::u32string& delimiters = default_delimiters()) {
  if (text.empty()) throw Error(errc::empty_input, "cannot segment empty text");
  if (delimiters.empty()) throw Error(errc::empty_input, "empty delimiter set");

  std::vector<Clause> clauses;
  std::string current;
  std::size_t clause_start_cp = 0;
  std::size_t cp_index = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t byte_start = pos;
    const char32_t cp = unicode::decode_at(text, pos);
    current.append(text.substr(byte_start, pos - byte_start));
    ++cp_index;
    if (delimiters.find(cp) != std::u32string::npos) {
      clauses.push_back({clauses.size(), current, clause_start_cp, cp_index});
      current.clear();
      clause_start_cp = cp_index;
    }
  }
  if (!current.empty())
    clauses.push_back({clauses.size(), current, clause_start_cp, cp_index});
  return clauses;
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

struct Violation {
  std::string code;
  std::string detail;

  bool operator==(const Violation&) const = default;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
};

inline ValidationReport validate_document(
    const Document& doc, const CategorySet& categories = CategorySet::standard()) {
  ValidationReport report;
  auto add = [&](const char* code, std::string detail) {
    report.violations.push_back({code, std::move(detail)});
  };

  if (doc.id.empty()) add("EMPTY_ID", "document id is empty");
  if (doc.text.empty()) add("EMPTY_TEXT", "document text is empty");

  // Clause structure: contiguous, ordered, covering, non-empty.
  const std::size_t total_cps = unicode::length(doc.text);
  std::size_t expected_start = 0;
  for (const Clause& cl : doc.clauses) {
    if (cl.index != static_cast<std::size_t>(&cl - doc.clauses.data()))
      add("CLAUSE_ORDER", "clause index " + std::to_string(cl.index) + " out of order");
    if (cl.char_end <= cl.char_start)
      add("CLAUSE_EMPTY", "clause " + std::to_string(cl.index) + " is empty");
    if (cl.char_start != expected_start)
      add("CLAUSE_COVERAGE",
          "clause " + std::to_string(cl.index) + " starts at " +
              std::to_string(cl.char_start) + ", expected " + std::to_string(expected_start));
    expected_start = cl.char_end;
  }
  if (!doc.clauses.empty() && doc.clauses.back().char_end != total_cps)
    add("CLAUSE_COVERAGE", "clauses end at " + std::to_string(doc.clauses.back().char_end) +
                               " but text has " + std::to_string(total_cps) + " characters");
  if (doc.clauses.empty() && !doc.text.empty())
    add("CLAUSE_COVERAGE", "document has text but no clauses");

  // Triplets: spans non-empty, inside their clause, category known.
  for (std::size_t i = 0; i < doc.triplets.size(); ++i) {
    const Triplet& t = doc.triplets[i];
    auto check_span = [&](const Span& span, const char* which) {
      if (span.text.empty()) {
        add("EMPTY_SPAN", "triplet " + std::to_string(i + 1) + " has an empty " + which + " span");
        return;
      }
      if (span.clause_index >= doc.clauses.size()) {
        add("BAD_CLAUSE_INDEX", "triplet " + std::to_string(i + 1) + " " + which +
                                    " references clause " + std::to_string(span.clause_index));
        return;
      }
      const Clause& cl = doc.clauses[span.clause_index];
      if (cl.text.find(span.text) == std::string::npos)
        add("SPAN_NOT_IN_CLAUSE", "triplet " + std::to_string(i + 1) + " " + which + " span \"" +
                                      span.text + "\" not found in clause " +
                                      std::to_string(span.clause_index));
    };
    check_span(t.emotion, "emotion");
    check_span(t.cause, "cause");
    if (!categories.contains(t.category))
      add("UNKNOWN_CATEGORY",
          "triplet " + std::to_string(i + 1) + " has unknown category \"" + t.category + "\"");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Corpus JSONL codec
// ---------------------------------------------------------------------------

inline Document document_from_json(const nlohmann::json& j,
                                   const std::u32string& delimiters = default_delimiters()) {
  if (!j.is_object()) throw Error(errc::malformed_record, "record is not a JSON object");
  if (!j.contains("id") || !j["id"].is_string())
    throw Error(errc::malformed_record, "missing string field \"id\"");
  if (!j.contains("text") || !j["text"].is_string())
    throw Error(errc::malformed_record, "missing string field \"text\"");

  Document doc;
  doc.id = j["id"].get<std::string>();
  doc.text = j["text"].get<std::string>();
  if (!doc.text.empty()) doc.clauses = segment_clauses(doc.text, delimiters);

  if (j.contains("triplets")) {
    if (!j["triplets"].is_array())
      throw Error(errc::malformed_record, "\"triplets\" is not an array");
    for (const auto& tj : j["triplets"]) {
      auto read_span = [&](const char* key) -> Span {
        if (!tj.contains(key) || !tj[key].is_object() || !tj[key].contains("text") ||
            !tj[key].contains("clause_index"))
          throw Error(errc::malformed_record,
                      std::string("triplet is missing span object \"") + key + "\"");
        return Span{tj[key]["text"].get<std::string>(),
                    tj[key]["clause_index"].get<std::size_t>()};
      };
      Triplet t;
      t.emotion = read_span("emotion");
      t.cause = read_span("cause");
      if (!tj.contains("category") || !tj["category"].is_string())
        throw Error(errc::malformed_record, "triplet is missing string field \"category\"");
      t.category = tj["category"].get<std::string>();
      doc.triplets.push_back(std::move(t));
    }
  }
  return doc;
}

inline nlohmann::json document_to_json(const Document& doc) {
  nlohmann::json triplets = nlohmann::json::array();
  for (const Triplet& t : doc.triplets) {
    triplets.push_back({{"emotion", {{"text", t.emotion.text}, {"clause_index", t.emotion.clause_index}}},
                        {"cause", {{"text", t.cause.text}, {"clause_index", t.cause.clause_index}}},
                        {"category", t.category}});
  }
  return {{"id", doc.id}, {"text", doc.text}, {"triplets", triplets}};
}

inline std::vector<Document> load_corpus(
    const std::string& path, const CategorySet& categories = CategorySet::standard(),
    const std::u32string& delimiters = default_delimiters()) {
  std::ifstream in(path);
  if (!in) throw Error(errc::io_error, "cannot open corpus file: " + path);

  std::vector<Document> docs;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (CategorySet::trim(line).empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    Document doc;
    try {
      doc = document_from_json(j, delimiters);
    } catch (const Error& e) {
      throw Error(errc::malformed_record,
                  "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen_ids.insert(doc.id).second)
      throw Error(errc::duplicate_id,
                  "line " + std::to_string(line_no) + ": duplicate document id \"" + doc.id + "\"");
    const ValidationReport report = validate_document(doc, categories);
    if (!report.ok()) {
      std::ostringstream msg;
      msg << "line " << line_no << ": document \"" << doc.id << "\":";
      for (const Violation& v : report.violations) msg << " [" << v.code << "] " << v.detail;
      throw Error(errc::invariant_violation, msg.str());
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

inline void save_corpus(const std::string& path, const std::vector<Document>& docs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(errc::io_error, "cannot write corpus file: " + path);
  for (const Document& doc : docs) out << document_to_json(doc).dump() << "\n";
}

}  // namespace ecta
