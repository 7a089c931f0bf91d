#include "augcap/http.hpp"

#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace augcap {

namespace {

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path without trailing slash
};

SplitUrl split_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  const std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  SplitUrl out;
  if (path_start == std::string::npos) {
    out.origin = url;
  } else {
    out.origin = url.substr(0, path_start);
    out.prefix = url.substr(path_start);
  }
  while (!out.prefix.empty() && out.prefix.back() == '/') out.prefix.pop_back();
  return out;
}

bool retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

nlohmann::json post_json(const Endpoint& endpoint, std::string_view path,
                         const nlohmann::json& body) {
  if (endpoint.base_url.empty()) throw TransportError("endpoint base URL is empty");
  const SplitUrl url = split_url(endpoint.base_url);
  const std::string full_path = url.prefix + std::string(path);

  httplib::Headers headers;
  if (!endpoint.api_key_env.empty()) {
    if (const char* key = std::getenv(endpoint.api_key_env.c_str()); key && *key) {
      headers.emplace("Authorization", std::string("Bearer ") + key);
    }
  }
  const std::string payload = body.dump();

  std::string last_error;
  auto backoff = endpoint.initial_backoff;
  for (int attempt = 0; attempt <= endpoint.max_retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    httplib::Client client(url.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(endpoint.timeout);
    const auto micros = std::chrono::duration_cast<std::chrono::microseconds>(
        endpoint.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    auto result = client.Post(full_path, headers, payload, "application/json");
    if (!result) {
      last_error = "request to " + endpoint.base_url + std::string(path) +
                   " failed: " + httplib::to_string(result.error());
      continue;
    }
    if (result->status >= 200 && result->status < 300) {
      try {
        return nlohmann::json::parse(result->body);
      } catch (const nlohmann::json::exception& e) {
        throw TransportError("response from " + endpoint.base_url + " is not JSON: " +
                             e.what());
      }
    }
    last_error = "HTTP " + std::to_string(result->status) + " from " + endpoint.base_url +
                 std::string(path);
    if (!retryable(result->status)) break;
  }
  throw TransportError(last_error);
}

}  // namespace augcap
