#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ecta/corpus.hpp"
#include "ecta/triplet_codec.hpp"
#include "ecta/unicode.hpp"

namespace ecta::annotation {

// Auxiliary labeling format: for the i-th triplet the emotion span is
// rewritten as [Emotion i]{span} and the cause span as [Cause i]<span>,
// and the triplet list is appended after the text behind a "Triplets:"
// separator line, one canonical triplet line per triplet.

inline constexpr std::string_view kTrailerSeparator = "Triplets:";

enum class MarkerKind { Emotion, Cause };

inline std::string_view to_string(MarkerKind k) {
  return k == MarkerKind::Emotion ? "Emotion" : "Cause";
}

struct AnnotatedMarker {
  MarkerKind kind = MarkerKind::Emotion;
  int ordinal = 0;            // 1-based triplet index
  std::string span_text;
  std::size_t char_begin = 0;  // marked region in the annotated string (code points)
  std::size_t char_end = 0;
  std::size_t plain_begin = 0;  // span position in the recovered plain text (code points)
  std::size_t plain_end = 0;

  bool operator==(const AnnotatedMarker&) const = default;
};

enum class ParseMode { Lenient, Strict };

struct AnnotatedParse {
  std::string plain_text;             // markers replaced by their bare span text
  std::vector<AnnotatedMarker> markers;
  std::vector<std::string> trailer_lines;  // appended triplet lines, verbatim
};

// ---------------------------------------------------------------------------
// annotate
// ---------------------------------------------------------------------------

inline std::string annotate(const Document& doc) {
  struct Insertion {
    std::size_t byte_begin, byte_end;
    MarkerKind kind;
    int ordinal;
    std::string span;
  };

  std::vector<unicode::CodePoint> cps = unicode::code_points(doc.text);
  auto clause_byte_range = [&](const Clause& cl) -> std::pair<std::size_t, std::size_t> {
    if (cl.char_start >= cps.size() || cl.char_end > cps.size())
      throw Error(errc::invariant_violation,
                  "clause " + std::to_string(cl.index) + " offsets exceed the document text");
    const std::size_t begin = cps[cl.char_start].byte_pos;
    const std::size_t end = cl.char_end < cps.size()
                                ? cps[cl.char_end].byte_pos
                                : doc.text.size();
    return {begin, end};
  };

  std::vector<Insertion> insertions;
  auto claim = [&](const Span& span, MarkerKind kind, int ordinal) {
    if (span.clause_index >= doc.clauses.size())
      throw Error(errc::span_not_found, "triplet " + std::to_string(ordinal) +
                                            " references missing clause " +
                                            std::to_string(span.clause_index));
    const auto [cl_begin, cl_end] = clause_byte_range(doc.clauses[span.clause_index]);
    bool found_any = false;
    std::size_t pos = doc.text.find(span.text, cl_begin);
    while (pos != std::string::npos && pos + span.text.size() <= cl_end) {
      found_any = true;
      const std::size_t end = pos + span.text.size();
      const bool clash = std::any_of(insertions.begin(), insertions.end(), [&](const Insertion& m) {
        return pos < m.byte_end && m.byte_begin < end;
      });
      if (!clash) {
        insertions.push_back({pos, end, kind, ordinal, span.text});
        return;
      }
      pos = doc.text.find(span.text, pos + 1);
    }
    if (found_any)
      throw Error(errc::overlapping_spans,
                  "no non-overlapping occurrence of \"" + span.text + "\" for triplet " +
                      std::to_string(ordinal));
    throw Error(errc::span_not_found, "span \"" + span.text + "\" not found in clause " +
                                          std::to_string(span.clause_index));
  };

  for (std::size_t i = 0; i < doc.triplets.size(); ++i) {
    claim(doc.triplets[i].emotion, MarkerKind::Emotion, static_cast<int>(i + 1));
    claim(doc.triplets[i].cause, MarkerKind::Cause, static_cast<int>(i + 1));
  }
  std::sort(insertions.begin(), insertions.end(),
            [](const Insertion& a, const Insertion& b) { return a.byte_begin < b.byte_begin; });

  std::string out;
  std::size_t cursor = 0;
  for (const Insertion& m : insertions) {
    out.append(doc.text, cursor, m.byte_begin - cursor);
    out += '[';
    out += to_string(m.kind);
    out += ' ';
    out += std::to_string(m.ordinal);
    out += ']';
    out += (m.kind == MarkerKind::Emotion) ? '{' : '<';
    out += m.span;
    out += (m.kind == MarkerKind::Emotion) ? '}' : '>';
    cursor = m.byte_end;
  }
  out.append(doc.text, cursor, doc.text.size() - cursor);

  if (!doc.triplets.empty()) {
    out += '\n';
    out += kTrailerSeparator;
    out += '\n';
    out += codec::format_triplets(doc.triplets);
  }
  return out;
}

// ---------------------------------------------------------------------------
// parse_annotated
// ---------------------------------------------------------------------------

namespace detail {

// Splits off the trailer behind the last line that equals "Triplets:".
// The separator line and the newline before it belong to the trailer syntax.
inline std::pair<std::string_view, std::vector<std::string>> split_trailer(std::string_view s) {
  std::size_t line_start = 0;
  std::optional<std::pair<std::size_t, std::size_t>> sep;  // (body_end, trailer_start)
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '\n') {
      const std::string_view line = s.substr(line_start, i - line_start);
      if (CategorySet::trim(line) == kTrailerSeparator) {
        const std::size_t body_end = line_start == 0 ? 0 : line_start - 1;
        sep = {body_end, i == s.size() ? s.size() : i + 1};
      }
      line_start = i + 1;
    }
  }
  if (!sep) return {s, {}};

  std::vector<std::string> trailer;
  std::string_view rest = s.substr(sep->second);
  std::size_t pos = 0;
  while (pos <= rest.size() && !rest.empty()) {
    const std::size_t eol = rest.find('\n', pos);
    const std::string_view line =
        rest.substr(pos, (eol == std::string_view::npos ? rest.size() : eol) - pos);
    if (!CategorySet::trim(line).empty()) trailer.emplace_back(line);
    if (eol == std::string_view::npos) break;
    pos = eol + 1;
  }
  return {s.substr(0, sep->first), trailer};
}

inline bool is_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\r' || cp == U'\n' || cp == 0x3000;
}

}  // namespace detail

inline AnnotatedParse parse_annotated(std::string_view annotated,
                                      ParseMode mode = ParseMode::Lenient) {
  AnnotatedParse out;
  auto [body, trailer] = detail::split_trailer(annotated);
  out.trailer_lines = std::move(trailer);

  const std::vector<unicode::CodePoint> cps = unicode::code_points(body);
  const std::size_t n = cps.size();
  std::set<std::pair<int, int>> seen;  // (kind, ordinal)

  std::string& plain = out.plain_text;
  std::size_t plain_cp = 0;
  auto append_bytes = [&](std::size_t cp_from, std::size_t cp_to) {
    if (cp_from >= cp_to) return;
    const std::size_t b0 = cps[cp_from].byte_pos;
    const std::size_t b1 = cp_to < n ? cps[cp_to].byte_pos : body.size();
    plain.append(body.substr(b0, b1 - b0));
    plain_cp += cp_to - cp_from;
  };

  std::size_t i = 0;
  while (i < n) {
    // Try to match a marker head at position i: [ ws* keyword ws+ digits ws* ]
    if (cps[i].value == U'[') {
      std::size_t j = i + 1;
      while (j < n && detail::is_space(cps[j].value)) ++j;
      std::optional<MarkerKind> kind;
      for (MarkerKind k : {MarkerKind::Emotion, MarkerKind::Cause}) {
        const std::string_view kw = to_string(k);
        if (j + kw.size() <= n) {
          bool match = true;
          for (std::size_t t = 0; t < kw.size(); ++t)
            if (cps[j + t].value != static_cast<char32_t>(kw[t])) { match = false; break; }
          if (match) { kind = k; j += kw.size(); break; }
        }
      }
      if (kind && j < n && detail::is_space(cps[j].value)) {
        while (j < n && detail::is_space(cps[j].value)) ++j;
        std::size_t digits_begin = j;
        long ordinal = 0;
        while (j < n && cps[j].value >= U'0' && cps[j].value <= U'9') {
          ordinal = ordinal * 10 + static_cast<long>(cps[j].value - U'0');
          ++j;
        }
        if (j > digits_begin) {
          while (j < n && detail::is_space(cps[j].value)) ++j;
          if (j < n && cps[j].value == U']') {
            ++j;
            std::size_t k2 = j;
            while (k2 < n && detail::is_space(cps[k2].value)) ++k2;
            const char32_t open = (*kind == MarkerKind::Emotion) ? U'{' : U'<';
            const char32_t close = (*kind == MarkerKind::Emotion) ? U'}' : U'>';
            if (k2 < n && cps[k2].value == open) {
              std::size_t span_begin = k2 + 1;
              std::size_t span_end = span_begin;
              while (span_end < n && cps[span_end].value != close) ++span_end;
              if (span_end == n)
                throw Error(errc::unbalanced_delimiter,
                            std::string("unterminated ") + std::string(to_string(*kind)) +
                                " marker " + std::to_string(ordinal));
              if (!seen.insert({static_cast<int>(*kind), static_cast<int>(ordinal)}).second)
                throw Error(errc::duplicate_ordinal,
                            std::string(to_string(*kind)) + " " + std::to_string(ordinal) +
                                " appears more than once");
              AnnotatedMarker m;
              m.kind = *kind;
              m.ordinal = static_cast<int>(ordinal);
              const std::size_t sb = cps[span_begin].byte_pos;
              const std::size_t se = span_end < n ? cps[span_end].byte_pos : body.size();
              m.span_text = std::string(body.substr(sb, se - sb));
              m.char_begin = i;
              m.char_end = span_end + 1;
              m.plain_begin = plain_cp;
              append_bytes(span_begin, span_end);
              m.plain_end = plain_cp;
              out.markers.push_back(std::move(m));
              i = span_end + 1;
              continue;
            }
          }
        }
      }
    }
    append_bytes(i, i + 1);
    ++i;
  }

  if (mode == ParseMode::Strict) {
    std::map<int, int> emotion_count, cause_count;
    int max_ordinal = 0;
    for (const AnnotatedMarker& m : out.markers) {
      (m.kind == MarkerKind::Emotion ? emotion_count : cause_count)[m.ordinal]++;
      max_ordinal = std::max(max_ordinal, m.ordinal);
    }
    for (int ord = 1; ord <= max_ordinal; ++ord) {
      if (emotion_count[ord] != 1 || cause_count[ord] != 1)
        throw Error(errc::dangling_ordinal,
                    "ordinal " + std::to_string(ord) + " lacks a matched Emotion/Cause pair");
    }
    if (!out.markers.empty() && max_ordinal * 2 != static_cast<int>(out.markers.size()))
      throw Error(errc::dangling_ordinal, "marker ordinals do not form 1..n");
  }
  return out;
}

// Locates the clause that fully contains [plain_begin, plain_end); nullopt if
// the span straddles a clause boundary.
inline std::optional<std::size_t> containing_clause(const std::vector<Clause>& clauses,
                                                    const AnnotatedMarker& m) {
  for (const Clause& cl : clauses)
    if (m.plain_begin >= cl.char_start && m.plain_end <= cl.char_end) return cl.index;
  return std::nullopt;
}

}  // namespace ecta::annotation
