#pragma once

#include <chrono>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "genquest/api/server_config.hpp"
#include "genquest/language/language_assistant.hpp"
#include "genquest/llm/gateway.hpp"
#include "genquest/persistence/event_store.hpp"
#include "genquest/persistence/session_repository.hpp"
#include "genquest/story/story_engine.hpp"

namespace genquest::api {

/// The object graph behind one server process, built from a ServerConfig.
/// Members are declared in dependency order so destruction runs backwards.
struct Services {
  std::shared_ptr<persistence::EventStore> store;
  std::unique_ptr<persistence::SessionRepository> repository;
  std::unique_ptr<llm::Gateway> gateway;
  std::unique_ptr<story::StoryEngine> engine;
  std::unique_ptr<language::LanguageAssistant> assistant;

  static Services from_config(const ServerConfig& config);
};

struct ApiOptions {
  std::string cors_origin;
  std::chrono::milliseconds job_wait{2000};
  std::chrono::milliseconds job_ttl{std::chrono::minutes(15)};  // finished jobs stay pollable this long
};

/// HTTP+JSON facade over the story engine and language assistant.
///
/// Generation endpoints run as jobs: if a job finishes within `job_wait` the
/// response is returned directly, otherwise the client gets 202 with a
/// `poll_url` under /jobs/{id}. Polling a finished job yields exactly the
/// response the direct call would have produced.
///
/// The optional X-Learner-Token header scopes listings and is recorded as
/// the session's learner on creation; it is not authentication.
class ApiServer {
 public:
  ApiServer(story::StoryEngine& engine, language::LanguageAssistant& assistant, ApiOptions options = {});
  ~ApiServer();

  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  /// Binds without serving; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves on the bound socket until stop().
  void serve();
  /// serve() on a background thread.
  void start();
  void stop();

  /// Machine-readable description of every route, as served at /openapi.
  nlohmann::json openapi() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace genquest::api
