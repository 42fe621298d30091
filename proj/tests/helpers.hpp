#pragma once

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <unistd.h>
#include <vector>

#include "ecta/corpus.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
  return std::string(ECTA_FIXTURE_DIR) + "/" + name;
}

inline std::string asset_path(const std::string& name) {
  return std::string(ECTA_ASSET_DIR) + "/" + name;
}

inline std::string golden_path(const std::string& name) {
  return std::string(ECTA_GOLDEN_DIR) + "/" + name;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Scratch file removed on destruction.
class TempFile {
 public:
  explicit TempFile(const std::string& contents, const std::string& suffix = ".tmp") {
    static std::atomic<int> counter{0};
    path_ = (std::filesystem::temp_directory_path() /
             ("ecta_test_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter.fetch_add(1)) + suffix))
                .string();
    std::ofstream out(path_, std::ios::binary);
    out << contents;
  }
  ~TempFile() { std::error_code ec; std::filesystem::remove(path_, ec); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

inline std::string temp_path(const std::string& suffix) {
  static std::atomic<int> counter{0};
  return (std::filesystem::temp_directory_path() /
          ("ecta_out_" + std::to_string(::getpid()) + "_" +
           std::to_string(counter.fetch_add(1)) + suffix))
      .string();
}

// ---------------------------------------------------------------------------
// Synthetic corpus generator. Produces structurally valid documents whose
// spans sit at unambiguous positions inside their clauses, so annotation
// must round-trip. Repeated span text across clauses happens naturally; a
// clause never repeats a token, keeping span positions unique within it.
// ---------------------------------------------------------------------------

struct SyntheticOptions {
  std::size_t documents = 60;
  std::uint64_t seed = 20240817;
  int max_triplets = 3;
};

inline std::vector<ecta::Document> synthetic_corpus(const SyntheticOptions& opt = {}) {
  static const std::vector<std::string> words = {
      "storm",  "harvest", "lantern", "river",   "signal",   "garden", "letter", "bridge",
      "doctor", "market",  "window",  "thunder", "friend",   "ticket", "journey",
      "meadow", "engine",  "teacher", "forest",  "supper",   "village", "anchor"};
  static const std::vector<std::string> emotions = {"happy", "afraid", "angry", "gloomy",
                                                    "disgusted", "astonished", "moved", "anxious"};
  static const std::vector<std::string> delims = {",", ";", "!", "?",
                                                  "，", "。", "；"};
  static const std::vector<std::string> categories = {"Happiness", "Sadness", "Fear",
                                                      "Anger",     "Disgust", "Surprise"};

  std::mt19937_64 rng(opt.seed);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };

  std::vector<ecta::Document> docs;
  for (std::size_t d = 0; d < opt.documents; ++d) {
    struct ClauseDraft {
      std::vector<std::string> tokens;
      std::vector<bool> claimed;
    };
    const std::size_t n_clauses = 2 + pick(4);
    std::vector<ClauseDraft> drafts(n_clauses);
    for (ClauseDraft& cd : drafts) {
      std::vector<std::string> pool = words;
      const std::size_t n_words = 3 + pick(3);
      for (std::size_t w = 0; w < n_words; ++w) {
        const std::size_t p = pick(pool.size());
        cd.tokens.push_back(pool[p]);
        pool.erase(pool.begin() + static_cast<long>(p));
      }
      if (rng() % 2 == 0) cd.tokens[pick(cd.tokens.size())] = emotions[pick(emotions.size())];
      cd.claimed.assign(cd.tokens.size(), false);
    }

    ecta::Document doc;
    doc.id = "syn-" + std::to_string(d);

    // (emotion clause, emotion text, cause clause, cause text, category)
    std::vector<std::tuple<std::size_t, std::string, std::size_t, std::string, std::string>> picks;
    const std::size_t n_triplets = pick(static_cast<std::size_t>(opt.max_triplets) + 1);
    for (std::size_t t = 0; t < n_triplets; ++t) {
      const std::size_t eci = pick(n_clauses);
      ClauseDraft& ec = drafts[eci];
      std::vector<std::size_t> free_tokens;
      for (std::size_t i = 0; i < ec.tokens.size(); ++i)
        if (!ec.claimed[i]) free_tokens.push_back(i);
      if (free_tokens.empty()) continue;
      const std::size_t et = free_tokens[pick(free_tokens.size())];
      ec.claimed[et] = true;

      const std::size_t cci = pick(n_clauses);
      ClauseDraft& cc = drafts[cci];
      std::vector<std::pair<std::size_t, std::size_t>> ranges;
      for (std::size_t start = 0; start < cc.tokens.size(); ++start) {
        for (std::size_t len = 1; len <= 3 && start + len <= cc.tokens.size(); ++len) {
          bool free = true;
          for (std::size_t i = start; i < start + len; ++i) free &= !cc.claimed[i];
          if (free) ranges.emplace_back(start, len);
        }
      }
      if (ranges.empty()) continue;
      const auto [cstart, clen] = ranges[pick(ranges.size())];
      for (std::size_t i = cstart; i < cstart + clen; ++i) cc.claimed[i] = true;

      std::string cause;
      for (std::size_t i = cstart; i < cstart + clen; ++i) {
        if (i > cstart) cause += " ";
        cause += cc.tokens[i];
      }
      picks.emplace_back(eci, ec.tokens[et], cci, cause, categories[pick(categories.size())]);
    }

    std::string text;
    for (std::size_t c = 0; c < n_clauses; ++c) {
      for (std::size_t i = 0; i < drafts[c].tokens.size(); ++i) {
        if (i) text += " ";
        text += drafts[c].tokens[i];
      }
      text += delims[pick(delims.size())];
      if (c + 1 < n_clauses) text += " ";
    }
    doc.text = text;
    doc.clauses = ecta::segment_clauses(text);

    // Each draft maps 1:1 onto a segmented clause: drafts contain no
    // delimiter characters and every draft ends with exactly one.
    for (const auto& [eci, espan, cci, cspan, cat] : picks) {
      ecta::Triplet trip;
      trip.emotion = {espan, eci};
      trip.cause = {cspan, cci};
      trip.category = cat;
      doc.triplets.push_back(trip);
    }
    docs.push_back(std::move(doc));
  }
  return docs;
}

}  // namespace testutil
