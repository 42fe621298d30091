#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecta/corpus.hpp"

namespace ecta::codec {

// Canonical line grammar, shared by the prompt workflow, the mock fixtures
// and the annotation trailer:   (emotion span, cause span, Category)
// One triplet per line. The emotion span is the first comma field, the
// category is the last, everything in between is the cause span.

struct TripletCandidate {
  std::string emotion;
  std::string cause;
  std::string category;  // canonical label from the category set

  bool operator==(const TripletCandidate&) const = default;
};

enum class IssueCode { NotATriplet, UnknownCategory, EmptySpan, TooFewFields };

inline std::string_view to_string(IssueCode c) {
  switch (c) {
    case IssueCode::NotATriplet: return "NotATriplet";
    case IssueCode::UnknownCategory: return "UnknownCategory";
    case IssueCode::EmptySpan: return "EmptySpan";
    case IssueCode::TooFewFields: return "TooFewFields";
  }
  return "?";
}

struct ParseIssue {
  std::size_t line_no = 0;  // 1-based
  std::string raw;          // the offending line, verbatim
  IssueCode code = IssueCode::NotATriplet;

  bool operator==(const ParseIssue&) const = default;
};

struct ParseResult {
  std::vector<TripletCandidate> candidates;
  std::vector<ParseIssue> issues;
};

inline std::string format_triplet_line(std::string_view emotion, std::string_view cause,
                                       std::string_view category) {
  std::string line = "(";
  line += emotion;
  line += ", ";
  line += cause;
  line += ", ";
  line += category;
  line += ")";
  return line;
}

inline std::string format_triplets(const std::vector<Triplet>& triplets) {
  std::string out;
  for (std::size_t i = 0; i < triplets.size(); ++i) {
    if (i) out += "\n";
    out += format_triplet_line(triplets[i].emotion.text, triplets[i].cause.text,
                               triplets[i].category);
  }
  return out;
}

namespace detail {

inline std::string strip_numbering(std::string s) {
  // Tolerates "0." / "1." / "12." style prefixes seen in raw model output.
  std::size_t i = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
  if (i > 0 && i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    return s.substr(i);
  }
  return s;
}

inline std::string strip_brackets(std::string s) {
  auto matches = [](char open, char close, const std::string& t) {
    return !t.empty() && t.front() == open && t.back() == close;
  };
  if (matches('(', ')', s) || matches('[', ']', s)) return CategorySet::trim(s.substr(1, s.size() - 2));
  return s;
}

inline std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      fields.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

}  // namespace detail

// Parses one line that is expected to hold a triplet. Returns either a
// candidate or the issue code it failed on. With `any_category` the last
// field is taken verbatim (trimmed) instead of being matched against the
// category set; the augmentation filter uses this to separate shape errors
// from category errors.
inline std::pair<std::optional<TripletCandidate>, IssueCode> parse_triplet_line(
    std::string_view raw, const CategorySet& categories, bool any_category = false) {
  std::string line = CategorySet::trim(raw);
  line = detail::strip_numbering(std::move(line));
  line = detail::strip_brackets(std::move(line));
  line = detail::strip_numbering(std::move(line));

  const std::vector<std::string> fields = detail::split_commas(line);
  if (fields.size() < 2) return {std::nullopt, IssueCode::NotATriplet};
  if (fields.size() < 3) return {std::nullopt, IssueCode::TooFewFields};

  std::optional<std::string> category;
  if (any_category) {
    std::string raw_label = CategorySet::trim(fields.back());
    if (!raw_label.empty()) category = std::move(raw_label);
  } else {
    category = categories.match(fields.back());
  }
  if (!category) return {std::nullopt, IssueCode::UnknownCategory};

  TripletCandidate cand;
  cand.emotion = CategorySet::trim(fields.front());
  cand.category = *category;
  for (std::size_t i = 1; i + 1 < fields.size(); ++i) {
    if (i > 1) cand.cause += ", ";
    cand.cause += CategorySet::trim(fields[i]);
  }
  if (cand.emotion.empty() || cand.cause.empty()) return {std::nullopt, IssueCode::EmptySpan};
  return {std::move(cand), IssueCode::NotATriplet};
}

// Total over arbitrary model output: every non-blank line becomes either a
// candidate or an issue. Candidates carry span text only; resolving spans
// against a document is the caller's job.
inline ParseResult parse_triplets(std::string_view text,
                                  const CategorySet& categories = CategorySet::standard()) {
  ParseResult result;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string_view raw =
        text.substr(pos, (eol == std::string_view::npos ? text.size() : eol) - pos);
    ++line_no;
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    if (CategorySet::trim(raw).empty()) continue;
    auto [cand, code] = parse_triplet_line(raw, categories);
    if (cand)
      result.candidates.push_back(std::move(*cand));
    else
      result.issues.push_back({line_no, std::string(raw), code});
  }
  return result;
}

}  // namespace ecta::codec
