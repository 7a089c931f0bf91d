#pragma once

#include <chrono>
#include <string>
#include <string_view>

#include "json.hpp"

namespace augcap {

// A JSON-over-HTTP service: base URL such as "http://localhost:8000/v1", model name,
// and the name of the environment variable that holds the bearer token.
struct Endpoint {
  std::string base_url;
  std::string model;
  std::string api_key_env = "AUGCAP_API_KEY";
  std::chrono::milliseconds timeout{60000};
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{500};
};

// Raised when a request cannot be completed within the retry budget.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// POSTs `body` to base_url + path and parses the JSON reply. Connection failures,
// HTTP 429 and 5xx are retried with exponential backoff; other statuses fail at once.
// Safe to call from several threads: every call opens its own connection.
nlohmann::json post_json(const Endpoint& endpoint, std::string_view path,
                         const nlohmann::json& body);

}  // namespace augcap
