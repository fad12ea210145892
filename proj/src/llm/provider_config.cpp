#include "genquest/llm/provider_config.hpp"

#include <fstream>

#include "genquest/error.hpp"
#include "genquest/llm/mock_provider.hpp"

namespace genquest::llm {

using nlohmann::json;

ProviderConfig ProviderConfig::defaults() {
  ProviderConfig config;
  Entry story;
  story.kind = "anthropic";
  story.http = {"story", ApiFlavor::anthropic_messages, "https://api.anthropic.com", "", "", "GENQUEST_STORY_API_KEY"};
  Entry language;
  language.kind = "openai";
  language.http = {"language", ApiFlavor::openai_chat, "https://api.openai.com", "", "", "GENQUEST_LANGUAGE_API_KEY"};
  config.providers["story"] = story;
  config.providers["language"] = language;
  for (ModelRole role : {ModelRole::proficiency, ModelRole::outline, ModelRole::plot, ModelRole::summary}) {
    config.roles[role] = "story";
  }
  config.roles[ModelRole::language] = "language";
  return config;
}

ProviderConfig ProviderConfig::from_json(const json& j) {
  ProviderConfig config = defaults();
  try {
    if (j.contains("providers")) {
      config.providers.clear();
      for (const auto& [name, p] : j.at("providers").items()) {
        Entry entry;
        entry.kind = p.at("kind").get<std::string>();
        entry.http.name = name;
        if (entry.kind == "openai") {
          entry.http.flavor = ApiFlavor::openai_chat;
        } else if (entry.kind == "anthropic") {
          entry.http.flavor = ApiFlavor::anthropic_messages;
        } else if (entry.kind != "mock") {
          throw Error(ErrorCode::provider_config, "provider '" + name + "': unknown kind '" + entry.kind + "'");
        }
        entry.http.endpoint = p.value("endpoint", "");
        entry.http.path = p.value("path", "");
        entry.http.model = p.value("model", "");
        entry.http.api_key_env = p.value("api_key_env", "");
        entry.http.timeout = std::chrono::seconds(p.value("timeout_seconds", 60));
        entry.mock_seed = p.value("seed", std::uint64_t{0});
        if (p.contains("api_key")) {
          throw Error(ErrorCode::provider_config,
                      "provider '" + name + "': put credentials in an environment variable and name it in api_key_env");
        }
        config.providers[name] = std::move(entry);
      }
    }
    if (j.contains("roles")) {
      for (const auto& [role_name, provider] : j.at("roles").items()) {
        auto role = parse_role(role_name);
        if (!role) {
          throw Error(ErrorCode::provider_config, "unknown model role '" + role_name + "'");
        }
        config.roles[*role] = provider.get<std::string>();
      }
    }
    if (j.contains("retry")) {
      const auto& r = j.at("retry");
      config.retry.max_attempts = r.value("max_attempts", config.retry.max_attempts);
      config.retry.initial_backoff =
          std::chrono::milliseconds(r.value("initial_backoff_ms", config.retry.initial_backoff.count()));
      config.retry.backoff_multiplier = r.value("backoff_multiplier", config.retry.backoff_multiplier);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::provider_config, std::string("malformed provider config: ") + e.what());
  }
  for (const auto& [role, provider] : config.roles) {
    if (!config.providers.contains(provider)) {
      throw Error(ErrorCode::provider_config,
                  "role '" + std::string(to_string(role)) + "' is bound to undefined provider '" + provider + "'");
    }
  }
  return config;
}

ProviderConfig ProviderConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::provider_config, "cannot read provider config " + path.string());
  }
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) {
    throw Error(ErrorCode::provider_config, "provider config " + path.string() + " is not valid JSON");
  }
  return from_json(j);
}

std::unique_ptr<Gateway> make_gateway(const ProviderConfig& config, TemplateCatalog catalog, Sleeper sleeper) {
  auto gateway = std::make_unique<Gateway>(std::move(catalog), config.retry, std::move(sleeper));
  std::map<std::string, std::shared_ptr<Provider>> built;
  for (const auto& [name, entry] : config.providers) {
    if (entry.kind == "mock") {
      built[name] = std::make_shared<MockProvider>(entry.mock_seed);
    } else {
      built[name] = std::make_shared<HttpProvider>(entry.http);
    }
  }
  for (const auto& [role, provider] : config.roles) {
    gateway->bind(role, built.at(provider));
  }
  return gateway;
}

std::unique_ptr<Gateway> make_mock_gateway(std::uint64_t seed, TemplateCatalog catalog, RetryPolicy retry,
                                           Sleeper sleeper) {
  auto gateway = std::make_unique<Gateway>(std::move(catalog), retry, std::move(sleeper));
  gateway->bind_all(std::make_shared<MockProvider>(seed));
  return gateway;
}

}  // namespace genquest::llm
