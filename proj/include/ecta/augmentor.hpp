#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ecta/annotate.hpp"
#include "ecta/corpus.hpp"
#include "ecta/gateway.hpp"
#include "ecta/prompts.hpp"
#include "ecta/triplet_codec.hpp"

namespace ecta::aug {

inline const std::vector<std::string>& rule_ids() {
  static const std::vector<std::string> ids = {"R-A", "R-B", "R-C", "R-D"};
  return ids;
}

struct CandidateSample {
  Document source;
  int repetition = 1;  // 1-based
  std::string raw_generation;
  std::optional<Document> parsed;
  std::string note;  // generation/parse failure detail, empty when clean

  std::string id() const { return "aug-" + source.id + "-" + std::to_string(repetition); }
};

struct RuleResult {
  bool passed = true;
  std::string detail;
};

struct FilterDecision {
  bool accepted = false;
  std::map<std::string, RuleResult> rules;

  bool failed(const std::string& rule) const {
    const auto it = rules.find(rule);
    return it != rules.end() && !it->second.passed;
  }
};

namespace detail {

struct ParsedGeneration {
  annotation::AnnotatedParse parse;
  std::vector<Clause> clauses;
  // Trailer lines parsed with any_category so shape and category separate.
  std::vector<std::optional<codec::TripletCandidate>> trailer;
  std::vector<codec::IssueCode> trailer_issue;  // parallel, valid when !trailer[i]
};

}  // namespace detail

// Evaluates the four quality rules over a generated sample. All rules are
// checked so the decision reports every failure; a generation that does not
// even parse leniently fails R-B and leaves the rest unevaluated.
inline FilterDecision filter_candidate(
    const CandidateSample& candidate, const CategorySet& categories = CategorySet::standard(),
    const std::u32string& delimiters = default_delimiters()) {
  FilterDecision decision;
  for (const std::string& rule : rule_ids()) decision.rules[rule] = {true, ""};
  auto fail = [&](const std::string& rule, const std::string& detail) {
    RuleResult& r = decision.rules[rule];
    r.passed = false;
    if (!r.detail.empty()) r.detail += "; ";
    r.detail += detail;
  };
  auto skip_rest = [&](const char* why) {
    for (const std::string& rule : {"R-A", "R-C", "R-D"})
      if (decision.rules[rule].passed) decision.rules[rule].detail = why;
  };

  annotation::AnnotatedParse parse;
  try {
    if (candidate.raw_generation.empty())
      throw Error(errc::empty_input, candidate.note.empty() ? "empty generation" : candidate.note);
    parse = annotation::parse_annotated(candidate.raw_generation, annotation::ParseMode::Lenient);
    if (parse.plain_text.empty()) throw Error(errc::empty_input, "generation has no text body");
  } catch (const Error& e) {
    fail("R-B", e.what());
    skip_rest("not evaluated: generation did not parse");
    decision.accepted = false;
    return decision;
  }

  const std::vector<Clause> clauses = segment_clauses(parse.plain_text, delimiters);

  // R-B format criteria: ordinal pairing, non-empty spans present verbatim,
  // and a trailer consistent with the markers.
  std::map<int, const annotation::AnnotatedMarker*> emotion_of, cause_of;
  int max_ordinal = 0;
  bool pairing_ok = true;
  for (const annotation::AnnotatedMarker& m : parse.markers) {
    auto& slot = (m.kind == annotation::MarkerKind::Emotion ? emotion_of : cause_of);
    if (!slot.emplace(m.ordinal, &m).second) pairing_ok = false;
    max_ordinal = std::max(max_ordinal, m.ordinal);
    if (m.span_text.empty()) fail("R-B", "marker " + std::to_string(m.ordinal) + " has an empty span");
    else if (parse.plain_text.find(m.span_text) == std::string::npos)
      fail("R-B", "marker span \"" + m.span_text + "\" not found in text");
  }
  if (max_ordinal != static_cast<int>(candidate.source.triplets.size()))
    fail("R-B", "generation labels " + std::to_string(max_ordinal) + " triplets, source has " +
                    std::to_string(candidate.source.triplets.size()));
  for (int ord = 1; ord <= max_ordinal; ++ord) {
    if (!emotion_of.count(ord) || !cause_of.count(ord)) {
      pairing_ok = false;
      fail("R-B", "ordinal " + std::to_string(ord) + " lacks a matched Emotion/Cause pair");
    }
  }
  if (pairing_ok && max_ordinal * 2 != static_cast<int>(parse.markers.size())) {
    pairing_ok = false;
    fail("R-B", "marker ordinals do not form 1..n");
  }

  std::vector<std::optional<codec::TripletCandidate>> trailer;
  for (const std::string& line : parse.trailer_lines) {
    auto [cand, issue] = codec::parse_triplet_line(line, categories, /*any_category=*/true);
    if (!cand) fail("R-B", "trailer line not triplet-shaped: \"" + line + "\"");
    trailer.push_back(std::move(cand));
  }
  if (static_cast<int>(parse.trailer_lines.size()) != max_ordinal)
    fail("R-B", "trailer has " + std::to_string(parse.trailer_lines.size()) + " lines for " +
                    std::to_string(max_ordinal) + " marker pairs");
  if (pairing_ok) {
    for (int ord = 1; ord <= max_ordinal; ++ord) {
      if (ord > static_cast<int>(trailer.size()) || !trailer[ord - 1]) continue;
      const codec::TripletCandidate& t = *trailer[ord - 1];
      if (t.emotion != emotion_of[ord]->span_text || t.cause != cause_of[ord]->span_text)
        fail("R-B", "trailer triplet " + std::to_string(ord) + " does not match its markers");
    }
  }

  // R-A: every span contained within a single clause.
  for (const annotation::AnnotatedMarker& m : parse.markers) {
    if (!annotation::containing_clause(clauses, m))
      fail("R-A", std::string(annotation::to_string(m.kind)) + " " + std::to_string(m.ordinal) +
                      " span \"" + m.span_text + "\" crosses a clause boundary");
  }

  // R-C: categories restricted to the configured set.
  for (std::size_t i = 0; i < trailer.size(); ++i) {
    if (!trailer[i]) continue;
    if (!categories.match(trailer[i]->category))
      fail("R-C", "unknown category \"" + trailer[i]->category + "\" in trailer line " +
                      std::to_string(i + 1));
  }

  // R-D: source span content preserved verbatim.
  for (std::size_t i = 0; i < candidate.source.triplets.size(); ++i) {
    const Triplet& t = candidate.source.triplets[i];
    for (const Span* span : {&t.emotion, &t.cause}) {
      if (parse.plain_text.find(span->text) == std::string::npos)
        fail("R-D", "source span \"" + span->text + "\" of triplet " + std::to_string(i + 1) +
                        " is missing from the generation");
    }
  }

  decision.accepted = true;
  for (const auto& [rule, result] : decision.rules) decision.accepted &= result.passed;
  return decision;
}

// Builds a Document from a generation. Returns nullopt plus a note when the
// generation cannot be represented (parse failure, unmatched ordinals,
// cross-clause spans, unknown categories).
inline std::pair<std::optional<Document>, std::string> materialize_candidate(
    const CandidateSample& candidate, const CategorySet& categories = CategorySet::standard(),
    const std::u32string& delimiters = default_delimiters()) {
  if (candidate.raw_generation.empty())
    return {std::nullopt, candidate.note.empty() ? "empty generation" : candidate.note};
  annotation::AnnotatedParse parse;
  try {
    parse = annotation::parse_annotated(candidate.raw_generation, annotation::ParseMode::Strict);
  } catch (const Error& e) {
    return {std::nullopt, e.what()};
  }
  if (parse.plain_text.empty()) return {std::nullopt, "generation has no text body"};

  Document doc;
  doc.id = candidate.id();
  doc.text = parse.plain_text;
  doc.clauses = segment_clauses(parse.plain_text, delimiters);

  std::map<int, const annotation::AnnotatedMarker*> emotion_of, cause_of;
  int max_ordinal = 0;
  for (const annotation::AnnotatedMarker& m : parse.markers) {
    (m.kind == annotation::MarkerKind::Emotion ? emotion_of : cause_of)[m.ordinal] = &m;
    max_ordinal = std::max(max_ordinal, m.ordinal);
  }
  if (static_cast<int>(parse.trailer_lines.size()) != max_ordinal)
    return {std::nullopt, "trailer does not list one triplet per marker pair"};

  for (int ord = 1; ord <= max_ordinal; ++ord) {
    auto [cand, issue] = codec::parse_triplet_line(parse.trailer_lines[ord - 1], categories);
    if (!cand)
      return {std::nullopt, "trailer line " + std::to_string(ord) + " invalid: " +
                                std::string(codec::to_string(issue))};
    const annotation::AnnotatedMarker* em = emotion_of[ord];
    const annotation::AnnotatedMarker* cm = cause_of[ord];
    const auto e_clause = annotation::containing_clause(doc.clauses, *em);
    const auto c_clause = annotation::containing_clause(doc.clauses, *cm);
    if (!e_clause || !c_clause)
      return {std::nullopt, "triplet " + std::to_string(ord) + " span crosses a clause boundary"};
    Triplet t;
    t.emotion = {em->span_text, *e_clause};
    t.cause = {cm->span_text, *c_clause};
    t.category = cand->category;
    doc.triplets.push_back(std::move(t));
  }
  return {std::move(doc), ""};
}

// Runs the annotate -> prompt -> generate stage: n_per_doc candidates per
// document in (document order, repetition order). Generation failures become
// candidates with an empty parse and a failure note.
inline std::vector<CandidateSample> generate_candidates(
    const std::vector<Document>& docs, const prompts::PromptTemplate& tpl, llm::Gateway& gateway,
    int n_per_doc, double temperature = 0.8, int max_tokens = 2048, int parallelism = 1,
    const CategorySet& categories = CategorySet::standard(),
    const std::u32string& delimiters = default_delimiters()) {
  if (n_per_doc < 1) throw Error(errc::bad_config, "n_per_doc must be >= 1");

  std::vector<CandidateSample> candidates;
  std::vector<llm::GenerationRequest> requests;
  for (const Document& doc : docs) {
    const std::string annotated = annotation::annotate(doc);
    const std::vector<prompts::ChatTurn> turns = prompts::render_augmentation_prompt(tpl, annotated);
    for (int rep = 1; rep <= n_per_doc; ++rep) {
      CandidateSample c;
      c.source = doc;
      c.repetition = rep;
      candidates.push_back(std::move(c));
      llm::GenerationRequest req;
      req.turns = turns;
      req.temperature = temperature;
      req.max_tokens = max_tokens;
      req.request_tag = "aug-" + doc.id + "-" + std::to_string(rep);
      requests.push_back(std::move(req));
    }
  }

  const std::vector<llm::BatchOutcome> outcomes = gateway.complete_batch(requests, parallelism);
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    if (outcomes[i].ok()) {
      candidates[i].raw_generation = outcomes[i].result->text;
      auto [doc, note] = materialize_candidate(candidates[i], categories, delimiters);
      candidates[i].parsed = std::move(doc);
      candidates[i].note = note;
    } else {
      candidates[i].note = "generation failed: " + outcomes[i].error;
    }
  }
  return candidates;
}

struct MergeStats {
  std::size_t duplicates_dropped = 0;
};

namespace detail {

inline std::string normalize_ws(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
    } else {
      if (pending_space) out += ' ';
      pending_space = false;
      out += c;
    }
  }
  return out;
}

}  // namespace detail

// Appends accepted documents to the original corpus. Accepted documents whose
// whitespace-normalized text duplicates an original are dropped and counted.
inline std::vector<Document> merge_augmented(const std::vector<Document>& original,
                                             const std::vector<Document>& accepted,
                                             MergeStats* stats = nullptr) {
  std::set<std::string> original_texts;
  std::set<std::string> used_ids;
  for (const Document& doc : original) {
    original_texts.insert(detail::normalize_ws(doc.text));
    used_ids.insert(doc.id);
  }

  std::vector<Document> merged = original;
  MergeStats local;
  for (const Document& doc : accepted) {
    if (original_texts.count(detail::normalize_ws(doc.text))) {
      ++local.duplicates_dropped;
      continue;
    }
    Document copy = doc;
    std::string id = copy.id;
    int bump = 1;
    while (!used_ids.insert(id).second) id = copy.id + "-" + std::to_string(++bump);
    copy.id = id;
    merged.push_back(std::move(copy));
  }
  if (stats) *stats = local;
  return merged;
}

struct AugmentReport {
  std::size_t generated = 0;
  std::size_t parsed = 0;
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::map<std::string, std::size_t> rejected_by_rule;  // R-A..R-D
  std::size_t duplicates_dropped = 0;
};

struct AugmentOutcome {
  std::vector<Document> corpus;
  AugmentReport report;
  std::vector<std::pair<CandidateSample, FilterDecision>> audit;
};

// Full pipeline: annotate -> prompt -> generate -> parse -> rule-filter -> merge.
inline AugmentOutcome run_augmentation(
    const std::vector<Document>& docs, const prompts::PromptTemplate& tpl, llm::Gateway& gateway,
    int n_per_doc, double temperature = 0.8, int max_tokens = 2048, int parallelism = 1,
    const CategorySet& categories = CategorySet::standard(),
    const std::u32string& delimiters = default_delimiters()) {
  AugmentOutcome outcome;
  for (const std::string& rule : rule_ids()) outcome.report.rejected_by_rule[rule] = 0;

  std::vector<CandidateSample> candidates = generate_candidates(
      docs, tpl, gateway, n_per_doc, temperature, max_tokens, parallelism, categories, delimiters);
  outcome.report.generated = candidates.size();

  std::vector<Document> accepted_docs;
  for (CandidateSample& c : candidates) {
    const FilterDecision decision = filter_candidate(c, categories, delimiters);
    if (c.parsed) ++outcome.report.parsed;
    if (decision.accepted && c.parsed) {
      ++outcome.report.accepted;
      accepted_docs.push_back(*c.parsed);
    } else {
      ++outcome.report.rejected;
      for (const auto& [rule, result] : decision.rules)
        if (!result.passed) ++outcome.report.rejected_by_rule[rule];
    }
    outcome.audit.emplace_back(std::move(c), decision);
  }

  MergeStats stats;
  outcome.corpus = merge_augmented(docs, accepted_docs, &stats);
  outcome.report.duplicates_dropped = stats.duplicates_dropped;
  return outcome;
}

}  // namespace ecta::aug
