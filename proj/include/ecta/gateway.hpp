#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "ecta/error.hpp"
#include "ecta/prompts.hpp"

namespace ecta::llm {

enum class BackendKind { Http, Mock };

inline std::string_view to_string(BackendKind k) {
  return k == BackendKind::Http ? "http" : "mock";
}

struct GenerationRequest {
  std::vector<prompts::ChatTurn> turns;
  std::string model_id;
  double temperature = 0.0;
  int max_tokens = 1024;
  std::string request_tag;
};

struct GenerationResult {
  std::string text;
  BackendKind backend = BackendKind::Mock;
  long latency_ms = 0;
  int attempts = 1;
};

// What a single send attempt produced. `retryable` is only meaningful when
// !ok; non-retryable failures surface immediately.
struct SendOutcome {
  bool ok = false;
  std::string text;
  bool retryable = false;
  errc code = errc::backend_unreachable;
  int http_status = 0;
  std::string detail;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual SendOutcome send(const GenerationRequest& request) = 0;
  virtual BackendKind kind() const = 0;
};

// ---------------------------------------------------------------------------
// Request digests (mock table keys)
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ULL) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stable digest of the turn sequence; identical across runs and platforms.
inline std::string digest_turns(const std::vector<prompts::ChatTurn>& turns) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const prompts::ChatTurn& t : turns) {
    h = fnv1a64(prompts::to_string(t.role), h);
    h = fnv1a64("\n", h);
    h = fnv1a64(t.content, h);
    h = fnv1a64("\x1e", h);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// ---------------------------------------------------------------------------
// Wire format (chat-completions JSON shape)
// ---------------------------------------------------------------------------

inline nlohmann::json build_chat_request(const GenerationRequest& request) {
  nlohmann::json messages = nlohmann::json::array();
  for (const prompts::ChatTurn& t : request.turns)
    messages.push_back({{"role", prompts::to_string(t.role)}, {"content", t.content}});
  return {{"model", request.model_id},
          {"messages", messages},
          {"temperature", request.temperature},
          {"max_tokens", request.max_tokens}};
}

inline std::string extract_completion_text(const nlohmann::json& response) {
  if (!response.contains("choices") || !response["choices"].is_array() ||
      response["choices"].empty())
    throw Error(errc::malformed_backend_response, "response has no choices");
  const auto& choice = response["choices"][0];
  if (!choice.contains("message") || !choice["message"].contains("content") ||
      !choice["message"]["content"].is_string())
    throw Error(errc::malformed_backend_response, "choices[0].message.content missing");
  return choice["message"]["content"].get<std::string>();
}

// ---------------------------------------------------------------------------
// Mock backend
// ---------------------------------------------------------------------------

class MockBackend : public Backend {
 public:
  explicit MockBackend(bool echo = true) : echo_(echo) {}

  // JSONL of {"digest": str, "response": str}
  static std::shared_ptr<MockBackend> from_table_file(const std::string& path, bool echo = false) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io_error, "cannot open mock table: " + path);
    auto backend = std::make_shared<MockBackend>(echo);
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
                    "mock table line " + std::to_string(line_no) + ": " + e.what());
      }
      if (!j.contains("digest") || !j.contains("response"))
        throw Error(errc::malformed_record,
                    "mock table line " + std::to_string(line_no) + ": need digest and response");
      backend->table_[j["digest"].get<std::string>()] = j["response"].get<std::string>();
    }
    return backend;
  }

  void add(const std::string& digest, const std::string& response) { table_[digest] = response; }
  void add_for_turns(const std::vector<prompts::ChatTurn>& turns, const std::string& response) {
    table_[digest_turns(turns)] = response;
  }

  SendOutcome send(const GenerationRequest& request) override {
    const std::string digest = digest_turns(request.turns);
    if (const auto it = table_.find(digest); it != table_.end())
      return {.ok = true, .text = it->second};
    if (echo_) {
      for (auto it = request.turns.rbegin(); it != request.turns.rend(); ++it)
        if (it->role == prompts::Role::User) return {.ok = true, .text = it->content};
      return {.ok = true, .text = request.turns.back().content};
    }
    return {.ok = false,
            .retryable = false,
            .code = errc::mock_miss,
            .detail = "no mock entry for digest " + digest + " and echo disabled"};
  }

  BackendKind kind() const override { return BackendKind::Mock; }

 private:
  std::map<std::string, std::string> table_;
  bool echo_;
};

// ---------------------------------------------------------------------------
// HTTP backend
// ---------------------------------------------------------------------------

struct HttpBackendConfig {
  std::string base_url;                            // e.g. "http://localhost:8089"
  std::string endpoint_path = "/v1/chat/completions";
  std::string api_key;                             // resolved from ECTA_API_KEY
  int timeout_ms = 30000;
};

inline bool is_retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

// Declared here, defined in gateway_http.hpp which pulls in cpp-httplib;
// keeps the heavyweight header out of translation units that only mock.
class HttpBackend;

// ---------------------------------------------------------------------------
// Gateway with retry/backoff and bounded-parallelism batching
// ---------------------------------------------------------------------------

struct RetryPolicy {
  int max_retries = 3;
  int backoff_base_ms = 500;
  double backoff_factor = 2.0;
  double jitter = 0.2;  // +-20%
  std::uint64_t jitter_seed = 42;
};

struct BatchOutcome {
  std::optional<GenerationResult> result;
  errc code = errc::backend_unreachable;
  std::string error;

  bool ok() const { return result.has_value(); }
};

class Gateway {
 public:
  using Sleeper = std::function<void(std::chrono::milliseconds)>;

  explicit Gateway(std::shared_ptr<Backend> backend, RetryPolicy policy = {},
                   Sleeper sleeper = nullptr)
      : backend_(std::move(backend)),
        policy_(policy),
        sleeper_(sleeper ? std::move(sleeper) : [](std::chrono::milliseconds d) {
          std::this_thread::sleep_for(d);
        }) {}

  const RetryPolicy& policy() const { return policy_; }
  Backend& backend() { return *backend_; }

  GenerationResult complete(const GenerationRequest& request) {
    validate(request);
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 jitter_rng(policy_.jitter_seed ^ fnv1a64(request.request_tag));
    const int max_attempts = policy_.max_retries + 1;
    for (int attempt = 1;; ++attempt) {
      SendOutcome outcome = backend_->send(request);
      if (outcome.ok) {
        GenerationResult result;
        result.text = std::move(outcome.text);
        result.backend = backend_->kind();
        result.attempts = attempt;
        if (result.backend == BackendKind::Http)
          result.latency_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                                  std::chrono::steady_clock::now() - start)
                                  .count();
        return result;
      }
      if (!outcome.retryable || attempt >= max_attempts) {
        const std::string suffix = " (attempt " + std::to_string(attempt) + " of " +
                                   std::to_string(max_attempts) + ", tag \"" +
                                   request.request_tag + "\")";
        throw Error(outcome.code, outcome.detail + suffix);
      }
      sleeper_(std::chrono::milliseconds(backoff_ms(attempt, jitter_rng)));
    }
  }

  // Results come back in input order; per-request failures are embedded
  // positionally and never abort the batch.
  std::vector<BatchOutcome> complete_batch(const std::vector<GenerationRequest>& requests,
                                           int parallelism) {
    if (parallelism < 1) throw Error(errc::bad_config, "parallelism must be >= 1");
    std::vector<BatchOutcome> out(requests.size());
    auto run_one = [&](std::size_t i) {
      try {
        out[i].result = complete(requests[i]);
      } catch (const Error& e) {
        out[i].code = e.code();
        out[i].error = e.what();
      }
    };
    if (parallelism == 1 || requests.size() <= 1) {
      for (std::size_t i = 0; i < requests.size(); ++i) run_one(i);
      return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= requests.size()) return;
        run_one(i);
      }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(parallelism), requests.size());
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    return out;
  }

  // Exposed for tests: the delay before retrying after `attempt` failures.
  long backoff_ms(int attempt, std::mt19937_64& rng) const {
    double delay = policy_.backoff_base_ms;
    for (int i = 1; i < attempt; ++i) delay *= policy_.backoff_factor;
    // uniform in [-1, 1), bit-stable across platforms
    const double u = 2.0 * ((rng() >> 11) * (1.0 / 9007199254740992.0)) - 1.0;
    delay *= 1.0 + policy_.jitter * u;
    return static_cast<long>(delay);
  }

 private:
  static void validate(const GenerationRequest& request) {
    if (request.turns.empty())
      throw Error(errc::invariant_violation, "request has no turns");
    if (request.temperature < 0.0 || request.temperature > 2.0)
      throw Error(errc::invariant_violation, "temperature must be in [0, 2]");
    if (request.max_tokens < 1)
      throw Error(errc::invariant_violation, "max_tokens must be positive");
  }

  std::shared_ptr<Backend> backend_;
  RetryPolicy policy_;
  Sleeper sleeper_;
};

}  // namespace ecta::llm
