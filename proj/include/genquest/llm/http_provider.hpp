#pragma once

#include <chrono>
#include <string>

#include "genquest/llm/provider.hpp"

namespace genquest::llm {

enum class ApiFlavor { openai_chat, anthropic_messages };

struct HttpProviderConfig {
  std::string name;            // provider id in logs and config
  ApiFlavor flavor = ApiFlavor::openai_chat;
  std::string endpoint;        // scheme://host[:port]
  std::string path;            // defaults per flavor when empty
  std::string model;
  std::string api_key_env;     // name of the environment variable holding the key
  std::chrono::seconds timeout{60};
};

/// JSON-over-HTTP(S) chat provider. The key is read from the environment at
/// call time and only ever placed in a request header.
class HttpProvider : public Provider {
 public:
  explicit HttpProvider(HttpProviderConfig config);

  std::string id() const override { return config_.name; }
  std::string generate(const CompletionRequest& request) override;

  const HttpProviderConfig& config() const { return config_; }

 private:
  HttpProviderConfig config_;
};

}  // namespace genquest::llm
