#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "genquest/llm/gateway.hpp"
#include "genquest/llm/http_provider.hpp"

namespace genquest::llm {

/// Role -> provider bindings as loaded from a JSON config file:
///
///     {
///       "providers": {
///         "story":    {"kind": "anthropic", "endpoint": "https://...", "model": "...", "api_key_env": "..."},
///         "language": {"kind": "openai",    "endpoint": "https://...", "model": "...", "api_key_env": "..."}
///       },
///       "roles": {"proficiency": "story", "outline": "story", "plot": "story",
///                 "summary": "story", "language": "language"},
///       "retry": {"max_attempts": 3, "initial_backoff_ms": 1000}
///     }
///
/// `kind` is one of openai | anthropic | mock. Credentials never appear in the
/// file, only the names of the environment variables that hold them.
struct ProviderConfig {
  struct Entry {
    std::string kind;
    HttpProviderConfig http;
    std::uint64_t mock_seed = 0;
  };

  std::map<std::string, Entry> providers;
  std::map<ModelRole, std::string> roles;
  RetryPolicy retry;

  /// Story roles on one provider, the language role on another.
  static ProviderConfig defaults();
  static ProviderConfig from_json(const nlohmann::json& j);
  static ProviderConfig load(const std::filesystem::path& path);
};

/// Builds a gateway with every role bound per `config`.
std::unique_ptr<Gateway> make_gateway(const ProviderConfig& config, TemplateCatalog catalog, Sleeper sleeper = {});

/// Gateway with a MockProvider on every role.
std::unique_ptr<Gateway> make_mock_gateway(std::uint64_t seed, TemplateCatalog catalog = TemplateCatalog::builtin(),
                                           RetryPolicy retry = {}, Sleeper sleeper = {});

}  // namespace genquest::llm
