#include "genquest/llm/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace genquest::llm {

using nlohmann::json;

namespace {

std::string default_path(ApiFlavor flavor) {
  return flavor == ApiFlavor::anthropic_messages ? "/v1/messages" : "/v1/chat/completions";
}

std::string extract_text(ApiFlavor flavor, const json& body) {
  std::string out;
  if (flavor == ApiFlavor::anthropic_messages) {
    for (const auto& block : body.value("content", json::array())) {
      if (block.value("type", "") == "text") {
        out += block.value("text", "");
      }
    }
    return out;
  }
  const auto& choices = body.value("choices", json::array());
  if (!choices.empty()) {
    const auto& message = choices.front().value("message", json::object());
    if (message.contains("content") && message["content"].is_string()) {
      out = message["content"].get<std::string>();
    }
  }
  return out;
}

}  // namespace

HttpProvider::HttpProvider(HttpProviderConfig config) : config_(std::move(config)) {
  if (config_.path.empty()) {
    config_.path = default_path(config_.flavor);
  }
}

std::string HttpProvider::generate(const CompletionRequest& request) {
  const char* key = config_.api_key_env.empty() ? nullptr : std::getenv(config_.api_key_env.c_str());
  if (key == nullptr || *key == '\0') {
    throw ProviderError(ProviderError::Kind::auth,
                        "credential environment variable '" + config_.api_key_env + "' is not set");
  }

  json body;
  httplib::Headers headers;
  if (config_.flavor == ApiFlavor::anthropic_messages) {
    body = {{"model", config_.model},
            {"max_tokens", request.params.max_tokens},
            {"temperature", request.params.temperature},
            {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    headers.emplace("x-api-key", key);
    headers.emplace("anthropic-version", "2023-06-01");
  } else {
    body = {{"model", config_.model},
            {"max_tokens", request.params.max_tokens},
            {"temperature", request.params.temperature},
            {"messages", json::array({{{"role", "user"}, {"content", request.prompt}}})}};
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  httplib::Client client(config_.endpoint);
  const auto timeout = static_cast<time_t>(config_.timeout.count());
  client.set_connection_timeout(timeout, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);

  auto response = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!response) {
    throw ProviderError(ProviderError::Kind::transient,
                        "request to " + config_.endpoint + " failed: " + httplib::to_string(response.error()));
  }
  const int status = response->status;
  if (status == 401 || status == 403) {
    throw ProviderError(ProviderError::Kind::auth, "provider rejected credentials (HTTP " + std::to_string(status) + ")");
  }
  if (status == 408 || status == 429 || status >= 500) {
    throw ProviderError(ProviderError::Kind::transient, "provider returned HTTP " + std::to_string(status));
  }
  if (status >= 400) {
    throw ProviderError(ProviderError::Kind::config, "provider returned HTTP " + std::to_string(status));
  }

  json parsed = json::parse(response->body, nullptr, false);
  if (parsed.is_discarded()) {
    throw ProviderError(ProviderError::Kind::transient, "provider returned a non-JSON body");
  }
  return extract_text(config_.flavor, parsed);
}

}  // namespace genquest::llm
