#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecta/augmentor.hpp"
#include "ecta/corpus.hpp"
#include "ecta/metrics.hpp"
#include "ecta/triplet_codec.hpp"

// JSON shapes for every report the toolkit writes. nlohmann's default object
// keeps keys sorted, which makes all outputs byte-stable across runs.

namespace ecta::io {

inline std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

inline nlohmann::json prf_to_json(const metrics::Prf& p) {
  return {{"precision", p.precision}, {"recall", p.recall}, {"f1", p.f1}};
}

inline nlohmann::json report_to_json(const metrics::MetricsReport& r) {
  nlohmann::json per_category = nlohmann::json::object();
  for (const auto& [cat, counts] : r.per_category)
    per_category[cat] = {{"ct", counts.ct}, {"pt", counts.pt}, {"at", counts.at}};
  return {
      {"span", prf_to_json(r.span)},
      {"word", {{"precision", r.word.precision},
                {"recall", r.word.recall},
                {"f1", r.word.f1},
                {"emotion", {{"precision", r.word_emotion.precision}, {"recall", r.word_emotion.recall}}},
                {"cause", {{"precision", r.word_cause.precision}, {"recall", r.word_cause.recall}}}}},
      {"counts",
       {{"ct", r.triplet_counts.ct},
        {"pt", r.triplet_counts.pt},
        {"at", r.triplet_counts.at},
        {"ce", r.word_counts.ce},
        {"pe", r.word_counts.pe},
        {"ae", r.word_counts.ae},
        {"cc", r.word_counts.cc},
        {"pc", r.word_counts.pc},
        {"ac", r.word_counts.ac}}},
      {"per_category", per_category},
      {"malformed_lines", r.malformed_lines},
      {"display",
       {{"span_precision", fixed4(r.span.precision)},
        {"span_recall", fixed4(r.span.recall)},
        {"span_f1", fixed4(r.span.f1)},
        {"word_precision", fixed4(r.word.precision)},
        {"word_recall", fixed4(r.word.recall)},
        {"word_f1", fixed4(r.word.f1)}}},
  };
}

inline metrics::MetricsReport report_from_json(const nlohmann::json& j) {
  metrics::MetricsReport r;
  auto read_prf = [](const nlohmann::json& p) {
    return metrics::Prf{p.at("precision").get<double>(), p.at("recall").get<double>(),
                        p.at("f1").get<double>()};
  };
  r.span = read_prf(j.at("span"));
  r.word = read_prf(j.at("word"));
  if (j.at("word").contains("emotion")) {
    r.word_emotion = {j["word"]["emotion"]["precision"].get<double>(),
                      j["word"]["emotion"]["recall"].get<double>()};
    r.word_cause = {j["word"]["cause"]["precision"].get<double>(),
                    j["word"]["cause"]["recall"].get<double>()};
  }
  if (j.contains("counts")) {
    const auto& c = j["counts"];
    r.triplet_counts = {c.value("ct", 0L), c.value("pt", 0L), c.value("at", 0L)};
    r.word_counts = {c.value("ce", 0L), c.value("pe", 0L), c.value("ae", 0L),
                     c.value("cc", 0L), c.value("pc", 0L), c.value("ac", 0L)};
  }
  if (j.contains("per_category"))
    for (const auto& [cat, counts] : j["per_category"].items())
      r.per_category[cat] = {counts.value("ct", 0L), counts.value("pt", 0L), counts.value("at", 0L)};
  r.malformed_lines = j.value("malformed_lines", 0L);
  return r;
}

inline nlohmann::json delta_to_json(const metrics::ComparisonDelta& d) {
  return {{"span", {{"precision_pp", d.span_precision_pp},
                    {"recall_pp", d.span_recall_pp},
                    {"f1_pp", d.span_f1_pp}}},
          {"word", {{"precision_pp", d.word_precision_pp},
                    {"recall_pp", d.word_recall_pp},
                    {"f1_pp", d.word_f1_pp}}}};
}

inline nlohmann::json fold_plan_to_json(const metrics::FoldPlan& plan) {
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(plan.k));
  for (std::size_t i = 0; i < plan.ids.size(); ++i)
    folds[static_cast<std::size_t>(plan.fold_of[i])].push_back(plan.ids[i]);
  nlohmann::json assignments = nlohmann::json::object();
  for (std::size_t i = 0; i < plan.ids.size(); ++i) assignments[plan.ids[i]] = plan.fold_of[i];
  return {{"k", plan.k}, {"seed", plan.seed}, {"folds", folds}, {"assignments", assignments}};
}

inline nlohmann::json summary_to_json(const metrics::FoldSummary& s) {
  return {{"folds", s.folds},
          {"mean", {{"span", prf_to_json(s.mean_span)}, {"word", prf_to_json(s.mean_word)}}},
          {"micro", report_to_json(s.micro)}};
}

inline nlohmann::json augment_report_to_json(const aug::AugmentReport& r) {
  nlohmann::json by_rule = nlohmann::json::object();
  for (const auto& [rule, n] : r.rejected_by_rule) by_rule[rule] = n;
  return {{"generated", r.generated},   {"parsed", r.parsed},
          {"accepted", r.accepted},     {"rejected", r.rejected},
          {"rejected_by_rule", by_rule}, {"duplicates_dropped", r.duplicates_dropped}};
}

inline nlohmann::json parse_result_to_json(const codec::ParseResult& result) {
  nlohmann::json candidates = nlohmann::json::array();
  for (const auto& c : result.candidates)
    candidates.push_back({{"emotion", c.emotion}, {"cause", c.cause}, {"category", c.category}});
  nlohmann::json issues = nlohmann::json::array();
  for (const auto& i : result.issues)
    issues.push_back({{"line", i.line_no}, {"raw", i.raw}, {"code", std::string(codec::to_string(i.code))}});
  return {{"candidates", candidates}, {"issues", issues}};
}

inline nlohmann::json clauses_to_json(const std::vector<Clause>& clauses) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Clause& c : clauses)
    arr.push_back({{"index", c.index},
                   {"text", c.text},
                   {"char_start", c.char_start},
                   {"char_end", c.char_end}});
  return {{"clauses", arr}};
}

// Per-fold CSV rows for spreadsheet use.
inline std::string reports_to_csv(const std::vector<metrics::MetricsReport>& reports) {
  std::string csv =
      "fold,ct,pt,at,span_precision,span_recall,span_f1,ce,pe,ae,cc,pc,ac,"
      "word_precision,word_recall,word_f1,malformed_lines\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const metrics::MetricsReport& r = reports[i];
    csv += std::to_string(i);
    csv += "," + std::to_string(r.triplet_counts.ct) + "," + std::to_string(r.triplet_counts.pt) +
           "," + std::to_string(r.triplet_counts.at);
    csv += "," + fixed4(r.span.precision) + "," + fixed4(r.span.recall) + "," + fixed4(r.span.f1);
    csv += "," + std::to_string(r.word_counts.ce) + "," + std::to_string(r.word_counts.pe) + "," +
           std::to_string(r.word_counts.ae) + "," + std::to_string(r.word_counts.cc) + "," +
           std::to_string(r.word_counts.pc) + "," + std::to_string(r.word_counts.ac);
    csv += "," + fixed4(r.word.precision) + "," + fixed4(r.word.recall) + "," + fixed4(r.word.f1);
    csv += "," + std::to_string(r.malformed_lines) + "\n";
  }
  return csv;
}

inline nlohmann::json validation_to_json(const std::string& doc_id, const ValidationReport& report) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Violation& v : report.violations)
    arr.push_back({{"code", v.code}, {"detail", v.detail}});
  return {{"id", doc_id}, {"violations", arr}};
}

}  // namespace ecta::io
