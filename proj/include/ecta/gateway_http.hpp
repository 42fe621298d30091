#pragma once

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "ecta/gateway.hpp"

namespace ecta::llm {

// Chat-completions client over plain HTTP. One httplib::Client per call so
// concurrent batch requests never share connection state.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
    if (config_.api_key.empty()) {
      if (const char* key = std::getenv("ECTA_API_KEY")) config_.api_key = key;
    }
  }

  SendOutcome send(const GenerationRequest& request) override {
    httplib::Client client(config_.base_url);
    client.set_connection_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_read_timeout(std::chrono::milliseconds(config_.timeout_ms));
    client.set_write_timeout(std::chrono::milliseconds(config_.timeout_ms));
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);

    const std::string body = build_chat_request(request).dump();
    httplib::Result res = client.Post(config_.endpoint_path, headers, body, "application/json");

    if (!res) {
      const httplib::Error err = res.error();
      if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
          err == httplib::Error::Write)
        return {.ok = false, .retryable = true, .code = errc::timeout,
                .detail = "request timed out (" + httplib::to_string(err) + ")"};
      return {.ok = false, .retryable = true, .code = errc::backend_unreachable,
              .detail = "transport failure: " + httplib::to_string(err)};
    }
    if (res->status != 200) {
      return {.ok = false,
              .retryable = is_retryable_status(res->status),
              .code = errc::http_status,
              .http_status = res->status,
              .detail = "backend returned HTTP " + std::to_string(res->status)};
    }
    try {
      const nlohmann::json parsed = nlohmann::json::parse(res->body);
      return {.ok = true, .text = extract_completion_text(parsed)};
    } catch (const nlohmann::json::exception& e) {
      return {.ok = false, .retryable = false, .code = errc::malformed_backend_response,
              .detail = std::string("response is not valid JSON: ") + e.what()};
    } catch (const Error& e) {
      return {.ok = false, .retryable = false, .code = errc::malformed_backend_response,
              .detail = e.what()};
    }
  }

  BackendKind kind() const override { return BackendKind::Http; }

 private:
  HttpBackendConfig config_;
};

}  // namespace ecta::llm
