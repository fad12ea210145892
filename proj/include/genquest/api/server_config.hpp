#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

namespace genquest::api {

/// Server settings. Sources, later ones winning: built-in defaults, a JSON
/// file, environment variables, command-line flags (applied by the caller).
///
///     GENQUEST_LISTEN           host:port
///     GENQUEST_STORAGE          storage root directory
///     GENQUEST_PROVIDER_CONFIG  provider config JSON (see llm::ProviderConfig)
///     GENQUEST_MOCK             1/true/yes to use the offline mock provider
///     GENQUEST_CORS_ORIGIN      allowed browser origin
struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path storage = "genquest-data";
  std::optional<std::filesystem::path> provider_config;
  bool mock = false;
  std::uint64_t mock_seed = 0;
  std::chrono::milliseconds mock_latency{0};
  std::optional<std::filesystem::path> genres;     // genre catalog file; built-in list when unset
  std::optional<std::filesystem::path> templates;  // directory overriding built-in prompt templates
  std::string cors_origin;                         // empty: no CORS headers
  std::chrono::milliseconds job_wait{2000};        // longer generations answer 202 + poll URL
  bool capture_log = false;
  bool fsync = true;

  /// Keys absent from `j` keep their value from `base`.
  static ServerConfig from_json(const nlohmann::json& j, ServerConfig base);
  static ServerConfig from_json(const nlohmann::json& j);
  static ServerConfig load(const std::filesystem::path& path, ServerConfig base);
  static ServerConfig load(const std::filesystem::path& path);

  /// `getenv` is injectable for tests.
  void apply_env(const std::function<const char*(const char*)>& getenv = nullptr);

  /// Parses "host:port" or ":port" into host/port; throws Error(validation).
  void set_listen(const std::string& listen);
};

}  // namespace genquest::api
