#include "genquest/api/server_config.hpp"

#include <cstdlib>
#include <fstream>

#include "genquest/error.hpp"
#include "genquest/text.hpp"

namespace genquest::api {

namespace {

bool parse_flag(std::string_view value, std::string_view name) {
  const std::string v = text::to_lower_ascii(text::trim(value));
  if (v == "1" || v == "true" || v == "yes" || v == "on") {
    return true;
  }
  if (v.empty() || v == "0" || v == "false" || v == "no" || v == "off") {
    return false;
  }
  throw Error(ErrorCode::validation, std::string(name) + " must be a boolean, got '" + std::string(value) + "'");
}

}  // namespace

void ServerConfig::set_listen(const std::string& listen) {
  const auto colon = listen.rfind(':');
  if (colon == std::string::npos) {
    throw Error(ErrorCode::validation, "listen address must be host:port, got '" + listen + "'");
  }
  const std::string port_text = listen.substr(colon + 1);
  int value = 0;
  try {
    std::size_t used = 0;
    value = std::stoi(port_text, &used);
    if (used != port_text.size()) {
      throw std::invalid_argument(port_text);
    }
  } catch (const std::exception&) {
    throw Error(ErrorCode::validation, "invalid port in listen address '" + listen + "'");
  }
  if (value < 0 || value > 65535) {
    throw Error(ErrorCode::validation, "port out of range in listen address '" + listen + "'");
  }
  if (colon > 0) {
    host = listen.substr(0, colon);
  }
  port = value;
}

ServerConfig ServerConfig::from_json(const nlohmann::json& j, ServerConfig c) {
  if (!j.is_object()) {
    throw Error(ErrorCode::validation, "server config must be a JSON object");
  }
  try {
    if (j.contains("listen")) c.set_listen(j.at("listen").get<std::string>());
    if (j.contains("storage")) c.storage = j.at("storage").get<std::string>();
    if (j.contains("provider_config")) c.provider_config = j.at("provider_config").get<std::string>();
    if (j.contains("mock")) c.mock = j.at("mock").get<bool>();
    if (j.contains("mock_seed")) c.mock_seed = j.at("mock_seed").get<std::uint64_t>();
    if (j.contains("mock_latency_ms")) c.mock_latency = std::chrono::milliseconds(j.at("mock_latency_ms").get<int>());
    if (j.contains("genres")) c.genres = j.at("genres").get<std::string>();
    if (j.contains("templates")) c.templates = j.at("templates").get<std::string>();
    if (j.contains("cors_origin")) c.cors_origin = j.at("cors_origin").get<std::string>();
    if (j.contains("job_wait_ms")) c.job_wait = std::chrono::milliseconds(j.at("job_wait_ms").get<int>());
    if (j.contains("capture_log")) c.capture_log = j.at("capture_log").get<bool>();
    if (j.contains("fsync")) c.fsync = j.at("fsync").get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, std::string("server config: ") + e.what());
  }
  return c;
}

ServerConfig ServerConfig::from_json(const nlohmann::json& j) { return from_json(j, ServerConfig{}); }

ServerConfig ServerConfig::load(const std::filesystem::path& path) { return load(path, ServerConfig{}); }

ServerConfig ServerConfig::load(const std::filesystem::path& path, ServerConfig base) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::validation, "cannot read server config " + path.string());
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::validation, "server config " + path.string() + ": " + e.what());
  }
  return from_json(j, std::move(base));
}

void ServerConfig::apply_env(const std::function<const char*(const char*)>& getenv) {
  auto get = [&](const char* name) -> const char* { return getenv ? getenv(name) : std::getenv(name); };
  if (const char* v = get("GENQUEST_LISTEN"); v && *v) set_listen(v);
  if (const char* v = get("GENQUEST_STORAGE"); v && *v) storage = v;
  if (const char* v = get("GENQUEST_PROVIDER_CONFIG"); v && *v) provider_config = v;
  if (const char* v = get("GENQUEST_MOCK"); v) mock = parse_flag(v, "GENQUEST_MOCK");
  if (const char* v = get("GENQUEST_CORS_ORIGIN"); v) cors_origin = v;
}

}  // namespace genquest::api
