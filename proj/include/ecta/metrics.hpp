#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "ecta/corpus.hpp"
#include "ecta/triplet_codec.hpp"
#include "ecta/unicode.hpp"

namespace ecta::metrics {

// ---------------------------------------------------------------------------
// Basic scores
// ---------------------------------------------------------------------------

/// Harmonic mean of precision and recall; 0 when both are 0.
inline double f1(double p, double r) {
  const double denom = p + r;
  if (denom == 0.0) return 0.0;
  return 2.0 * p * r / denom;
}

inline double ratio(long num, long denom) { return denom == 0 ? 0.0 : static_cast<double>(num) / denom; }

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  bool operator==(const Prf&) const = default;
};

struct Pr {
  double precision = 0.0;
  double recall = 0.0;

  bool operator==(const Pr&) const = default;
};

struct TripletCounts {
  long ct = 0;  // correct predicted triplets
  long pt = 0;  // predicted triplets
  long at = 0;  // annotated gold triplets

  TripletCounts& operator+=(const TripletCounts& o) {
    ct += o.ct; pt += o.pt; at += o.at;
    return *this;
  }
  bool operator==(const TripletCounts&) const = default;
};

struct WordCounts {
  long ce = 0, pe = 0, ae = 0;  // emotion-span words: correct / predicted / annotated
  long cc = 0, pc = 0, ac = 0;  // cause-span words

  WordCounts& operator+=(const WordCounts& o) {
    ce += o.ce; pe += o.pe; ae += o.ae;
    cc += o.cc; pc += o.pc; ac += o.ac;
    return *this;
  }
  bool operator==(const WordCounts&) const = default;
};

enum class MalformedPolicy { Exclude, Penalize };

// ---------------------------------------------------------------------------
// Span-level metrics: a prediction is correct only when emotion span, cause
// span and category all match a gold triplet exactly, each gold matched once.
// ---------------------------------------------------------------------------

struct SpanScores {
  TripletCounts counts;
  Prf prf;
};

namespace detail {

using Key = std::tuple<std::string, std::string, std::string>;

inline long multiset_match(const std::vector<Key>& pred, const std::vector<Key>& gold) {
  std::map<Key, long> gold_count;
  for (const Key& k : gold) ++gold_count[k];
  long matched = 0;
  for (const Key& k : pred) {
    auto it = gold_count.find(k);
    if (it != gold_count.end() && it->second > 0) {
      --it->second;
      ++matched;
    }
  }
  return matched;
}

}  // namespace detail

inline SpanScores span_metrics(const std::vector<codec::TripletCandidate>& pred,
                               const std::vector<Triplet>& gold, long malformed = 0,
                               MalformedPolicy policy = MalformedPolicy::Exclude) {
  std::vector<detail::Key> pkeys, gkeys;
  pkeys.reserve(pred.size());
  gkeys.reserve(gold.size());
  for (const auto& p : pred) pkeys.emplace_back(p.emotion, p.cause, p.category);
  for (const auto& g : gold) gkeys.emplace_back(g.emotion.text, g.cause.text, g.category);

  SpanScores s;
  s.counts.ct = detail::multiset_match(pkeys, gkeys);
  s.counts.pt = static_cast<long>(pred.size()) +
                (policy == MalformedPolicy::Penalize ? malformed : 0);
  s.counts.at = static_cast<long>(gold.size());
  s.prf.precision = ratio(s.counts.ct, s.counts.pt);
  s.prf.recall = ratio(s.counts.ct, s.counts.at);
  s.prf.f1 = f1(s.prf.precision, s.prf.recall);
  return s;
}

// ---------------------------------------------------------------------------
// Word-level metrics: order-insensitive partial credit inside spans, gated on
// the predicted category matching the gold category.
// ---------------------------------------------------------------------------

using Tokenizer = std::function<std::vector<std::string>(std::string_view)>;

namespace detail {

inline bool is_word_space(char32_t cp) {
  return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == 0x3000;
}

}  // namespace detail

// Whitespace tokens; spans with no whitespace that contain CJK fall back to
// one token per code point (the corpus language has no space segmentation).
inline std::vector<std::string> default_tokenizer(std::string_view span) {
  const std::vector<unicode::CodePoint> cps = unicode::code_points(span);
  const bool has_space =
      std::any_of(cps.begin(), cps.end(), [](const unicode::CodePoint& c) {
        return detail::is_word_space(c.value);
      });
  std::vector<std::string> tokens;
  if (!has_space && unicode::contains_cjk(span)) {
    for (const unicode::CodePoint& c : cps)
      tokens.emplace_back(span.substr(c.byte_pos, c.byte_len));
    return tokens;
  }
  std::string current;
  for (const unicode::CodePoint& c : cps) {
    if (detail::is_word_space(c.value)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.append(span.substr(c.byte_pos, c.byte_len));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

struct WordScores {
  WordCounts counts;
  Pr emotion;
  Pr cause;
  Prf overall;
};

namespace detail {

inline long multiset_intersection(const std::vector<std::string>& a,
                                  const std::vector<std::string>& b) {
  std::map<std::string, long> count;
  for (const std::string& w : a) ++count[w];
  long inter = 0;
  for (const std::string& w : b) {
    auto it = count.find(w);
    if (it != count.end() && it->second > 0) {
      --it->second;
      ++inter;
    }
  }
  return inter;
}

}  // namespace detail

inline WordScores word_metrics(const std::vector<codec::TripletCandidate>& pred,
                               const std::vector<Triplet>& gold, const Tokenizer& tokenize) {
  struct Tokens {
    std::vector<std::string> emotion, cause;
    std::string category;
  };
  std::vector<Tokens> p(pred.size()), g(gold.size());
  for (std::size_t i = 0; i < pred.size(); ++i)
    p[i] = {tokenize(pred[i].emotion), tokenize(pred[i].cause), pred[i].category};
  for (std::size_t j = 0; j < gold.size(); ++j)
    g[j] = {tokenize(gold[j].emotion.text), tokenize(gold[j].cause.text), gold[j].category};

  WordScores s;
  for (const Tokens& t : p) {
    s.counts.pe += static_cast<long>(t.emotion.size());
    s.counts.pc += static_cast<long>(t.cause.size());
  }
  for (const Tokens& t : g) {
    s.counts.ae += static_cast<long>(t.emotion.size());
    s.counts.ac += static_cast<long>(t.cause.size());
  }

  // Same-category pairs ranked by summed word overlap, greedy one-to-one;
  // ties broken by earlier gold index, then earlier prediction index.
  struct Pair {
    long overlap;
    std::size_t gold_idx, pred_idx;
    long emotion_inter, cause_inter;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (std::size_t j = 0; j < g.size(); ++j) {
      if (p[i].category != g[j].category) continue;
      const long ei = detail::multiset_intersection(p[i].emotion, g[j].emotion);
      const long ci = detail::multiset_intersection(p[i].cause, g[j].cause);
      if (ei + ci > 0) pairs.push_back({ei + ci, j, i, ei, ci});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.overlap != b.overlap) return a.overlap > b.overlap;
    if (a.gold_idx != b.gold_idx) return a.gold_idx < b.gold_idx;
    return a.pred_idx < b.pred_idx;
  });
  std::vector<bool> pred_used(p.size(), false), gold_used(g.size(), false);
  for (const Pair& pr : pairs) {
    if (pred_used[pr.pred_idx] || gold_used[pr.gold_idx]) continue;
    pred_used[pr.pred_idx] = true;
    gold_used[pr.gold_idx] = true;
    s.counts.ce += pr.emotion_inter;
    s.counts.cc += pr.cause_inter;
  }

  s.emotion = {ratio(s.counts.ce, s.counts.pe), ratio(s.counts.ce, s.counts.ae)};
  s.cause = {ratio(s.counts.cc, s.counts.pc), ratio(s.counts.cc, s.counts.ac)};
  s.overall.precision = (s.emotion.precision + s.cause.precision) / 2.0;
  s.overall.recall = (s.emotion.recall + s.cause.recall) / 2.0;
  s.overall.f1 = f1(s.overall.precision, s.overall.recall);
  return s;
}

// ---------------------------------------------------------------------------
// Cause-span extraction metrics: exact-text one-to-one matching on causes.
// ---------------------------------------------------------------------------

inline SpanScores cause_span_metrics(const std::vector<Span>& pred_causes,
                                     const std::vector<Span>& gold_causes) {
  std::vector<detail::Key> pkeys, gkeys;
  for (const Span& s : pred_causes) pkeys.emplace_back(s.text, "", "");
  for (const Span& s : gold_causes) gkeys.emplace_back(s.text, "", "");
  SpanScores s;
  s.counts.ct = detail::multiset_match(pkeys, gkeys);
  s.counts.pt = static_cast<long>(pred_causes.size());
  s.counts.at = static_cast<long>(gold_causes.size());
  s.prf.precision = ratio(s.counts.ct, s.counts.pt);
  s.prf.recall = ratio(s.counts.ct, s.counts.at);
  s.prf.f1 = f1(s.prf.precision, s.prf.recall);
  return s;
}

// ---------------------------------------------------------------------------
// Full report
// ---------------------------------------------------------------------------

struct MetricsReport {
  Prf span;
  Prf word;
  Pr word_emotion;
  Pr word_cause;
  TripletCounts triplet_counts;
  WordCounts word_counts;
  std::map<std::string, TripletCounts> per_category;
  long malformed_lines = 0;
};

inline MetricsReport evaluate(const std::vector<codec::TripletCandidate>& pred,
                              const std::vector<Triplet>& gold, long malformed = 0,
                              MalformedPolicy policy = MalformedPolicy::Exclude,
                              const Tokenizer& tokenize = nullptr) {
  const Tokenizer& tok = tokenize ? tokenize : default_tokenizer;
  MetricsReport r;
  const SpanScores span = span_metrics(pred, gold, malformed, policy);
  const WordScores word = word_metrics(pred, gold, tok);
  r.span = span.prf;
  r.triplet_counts = span.counts;
  r.word = word.overall;
  r.word_emotion = word.emotion;
  r.word_cause = word.cause;
  r.word_counts = word.counts;
  r.malformed_lines = malformed;

  std::set<std::string> cats;
  for (const auto& p : pred) cats.insert(p.category);
  for (const auto& g : gold) cats.insert(g.category);
  for (const std::string& cat : cats) {
    std::vector<codec::TripletCandidate> pc;
    std::vector<Triplet> gc;
    for (const auto& p : pred)
      if (p.category == cat) pc.push_back(p);
    for (const auto& g : gold)
      if (g.category == cat) gc.push_back(g);
    r.per_category[cat] = span_metrics(pc, gc).counts;
  }
  return r;
}

// Convenience: raw model output against a document's gold triplets.
inline MetricsReport evaluate_output(std::string_view model_output, const Document& doc,
                                     const CategorySet& categories = CategorySet::standard(),
                                     MalformedPolicy policy = MalformedPolicy::Exclude,
                                     const Tokenizer& tokenize = nullptr) {
  const codec::ParseResult parsed = codec::parse_triplets(model_output, categories);
  return evaluate(parsed.candidates, doc.triplets, static_cast<long>(parsed.issues.size()),
                  policy, tokenize);
}

// ---------------------------------------------------------------------------
// k-fold splitting
// ---------------------------------------------------------------------------

struct FoldPlan {
  int k = 10;
  std::uint64_t seed = 42;
  std::vector<std::string> ids;  // original corpus order
  std::vector<int> fold_of;      // parallel to ids
};

// Deterministic across platforms: explicit Fisher-Yates over mt19937_64.
inline FoldPlan kfold_split(const std::vector<std::string>& ids, int k = 10,
                            std::uint64_t seed = 42) {
  if (k < 2) throw Error(errc::bad_config, "fold count must be >= 2");
  if (static_cast<int>(ids.size()) < k)
    throw Error(errc::too_few_documents,
                std::to_string(ids.size()) + " documents cannot fill " + std::to_string(k) + " folds");
  if (std::set<std::string>(ids.begin(), ids.end()).size() != ids.size())
    throw Error(errc::duplicate_id, "ids must be unique for fold assignment");

  std::vector<std::size_t> order(ids.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(seed);
  for (std::size_t i = order.size() - 1; i > 0; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
    std::swap(order[i], order[j]);
  }

  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.ids = ids;
  plan.fold_of.assign(ids.size(), 0);
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    plan.fold_of[order[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  return plan;
}

inline std::vector<std::string> test_ids(const FoldPlan& plan, int fold) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < plan.ids.size(); ++i)
    if (plan.fold_of[i] == fold) out.push_back(plan.ids[i]);
  return out;
}

inline std::vector<std::string> train_ids(const FoldPlan& plan, int fold) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < plan.ids.size(); ++i)
    if (plan.fold_of[i] != fold) out.push_back(plan.ids[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Fold aggregation: unweighted mean of fold metrics plus pooled micro metrics
// recomputed from summed counts. The headline number is the mean.
// ---------------------------------------------------------------------------

struct FoldSummary {
  Prf mean_span;
  Prf mean_word;
  MetricsReport micro;
  std::size_t folds = 0;
};

inline MetricsReport report_from_counts(TripletCounts tc, WordCounts wc,
                                        std::map<std::string, TripletCounts> per_category = {},
                                        long malformed = 0) {
  MetricsReport r;
  r.triplet_counts = tc;
  r.word_counts = wc;
  r.per_category = std::move(per_category);
  r.malformed_lines = malformed;
  r.span.precision = ratio(tc.ct, tc.pt);
  r.span.recall = ratio(tc.ct, tc.at);
  r.span.f1 = f1(r.span.precision, r.span.recall);
  r.word_emotion = {ratio(wc.ce, wc.pe), ratio(wc.ce, wc.ae)};
  r.word_cause = {ratio(wc.cc, wc.pc), ratio(wc.cc, wc.ac)};
  r.word.precision = (r.word_emotion.precision + r.word_cause.precision) / 2.0;
  r.word.recall = (r.word_emotion.recall + r.word_cause.recall) / 2.0;
  r.word.f1 = f1(r.word.precision, r.word.recall);
  return r;
}

inline FoldSummary aggregate_folds(const std::vector<MetricsReport>& reports) {
  if (reports.empty()) throw Error(errc::empty_input, "no fold reports to aggregate");
  FoldSummary s;
  s.folds = reports.size();
  TripletCounts tc;
  WordCounts wc;
  std::map<std::string, TripletCounts> per_category;
  long malformed = 0;
  for (const MetricsReport& r : reports) {
    s.mean_span.precision += r.span.precision;
    s.mean_span.recall += r.span.recall;
    s.mean_span.f1 += r.span.f1;
    s.mean_word.precision += r.word.precision;
    s.mean_word.recall += r.word.recall;
    s.mean_word.f1 += r.word.f1;
    tc += r.triplet_counts;
    wc += r.word_counts;
    for (const auto& [cat, counts] : r.per_category) per_category[cat] += counts;
    malformed += r.malformed_lines;
  }
  const double n = static_cast<double>(reports.size());
  s.mean_span = {s.mean_span.precision / n, s.mean_span.recall / n, s.mean_span.f1 / n};
  s.mean_word = {s.mean_word.precision / n, s.mean_word.recall / n, s.mean_word.f1 / n};
  s.micro = report_from_counts(tc, wc, std::move(per_category), malformed);
  return s;
}

// ---------------------------------------------------------------------------
// Report comparison in absolute percentage points (2 decimals)
// ---------------------------------------------------------------------------

inline double round2(double x) { return std::round(x * 100.0) / 100.0; }

struct ComparisonDelta {
  double span_precision_pp = 0.0;
  double span_recall_pp = 0.0;
  double span_f1_pp = 0.0;
  double word_precision_pp = 0.0;
  double word_recall_pp = 0.0;
  double word_f1_pp = 0.0;
};

inline ComparisonDelta compare(const MetricsReport& a, const MetricsReport& b) {
  ComparisonDelta d;
  d.span_precision_pp = round2(100.0 * (a.span.precision - b.span.precision));
  d.span_recall_pp = round2(100.0 * (a.span.recall - b.span.recall));
  d.span_f1_pp = round2(100.0 * (a.span.f1 - b.span.f1));
  d.word_precision_pp = round2(100.0 * (a.word.precision - b.word.precision));
  d.word_recall_pp = round2(100.0 * (a.word.recall - b.word.recall));
  d.word_f1_pp = round2(100.0 * (a.word.f1 - b.word.f1));
  return d;
}

}  // namespace ecta::metrics
