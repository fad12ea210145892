// HTTP server for the game. Settings come from defaults, then --config,
// then GENQUEST_* environment variables, then flags.

#include <csignal>
#include <iostream>
#include <pthread.h>
#include <thread>

#include <CLI11.hpp>

#include "genquest/api/api_server.hpp"
#include "genquest/api/server_config.hpp"
#include "genquest/error.hpp"

namespace {

int fail(std::string_view code, const std::string& message) {
  std::cerr << "error\t" << code << '\t' << message << '\n';
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GenQuest story server"};

  std::string config_path;
  std::optional<std::string> listen, storage, provider_config, cors_origin, genres, templates;
  std::optional<std::uint64_t> seed;
  std::optional<int> mock_latency_ms, job_wait_ms;
  bool mock = false;
  bool capture_log = false;
  bool no_fsync = false;

  app.add_option("--config", config_path, "Server config JSON file")->check(CLI::ExistingFile);
  app.add_option("--listen", listen, "host:port to listen on (port 0 picks one)");
  app.add_option("--storage", storage, "Directory for session event logs");
  app.add_option("--provider-config", provider_config, "Provider config JSON (roles -> providers)")
      ->check(CLI::ExistingFile);
  app.add_flag("--mock", mock, "Use the offline mock provider for every role");
  app.add_option("--seed", seed, "Mock provider seed");
  app.add_option("--mock-latency-ms", mock_latency_ms, "Artificial mock provider latency");
  app.add_option("--cors-origin", cors_origin, "Browser origin allowed to call the API");
  app.add_option("--genres", genres, "Genre catalog file")->check(CLI::ExistingFile);
  app.add_option("--templates", templates, "Directory of prompt templates overriding the built-ins")
      ->check(CLI::ExistingDirectory);
  app.add_option("--job-wait-ms", job_wait_ms, "How long a generation request waits before answering 202");
  app.add_flag("--capture-log", capture_log, "Keep every prompt and completion in memory");
  app.add_flag("--no-fsync", no_fsync, "Skip fsync after appends (tests only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  // Block termination signals before any thread starts so only the waiter sees them.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    genquest::api::ServerConfig config;
    if (!config_path.empty()) {
      config = genquest::api::ServerConfig::load(config_path);
    }
    config.apply_env();
    if (listen) config.set_listen(*listen);
    if (storage) config.storage = *storage;
    if (provider_config) config.provider_config = *provider_config;
    if (mock) config.mock = true;
    if (seed) config.mock_seed = *seed;
    if (mock_latency_ms) config.mock_latency = std::chrono::milliseconds(*mock_latency_ms);
    if (cors_origin) config.cors_origin = *cors_origin;
    if (genres) config.genres = *genres;
    if (templates) config.templates = *templates;
    if (job_wait_ms) config.job_wait = std::chrono::milliseconds(*job_wait_ms);
    if (capture_log) config.capture_log = true;
    if (no_fsync) config.fsync = false;

    auto services = genquest::api::Services::from_config(config);
    genquest::api::ApiServer server(*services.engine, *services.assistant,
                                    {config.cors_origin, config.job_wait, std::chrono::minutes(15)});
    const int port = server.bind(config.host, config.port);
    std::cerr << "genquest: listening on http://" << config.host << ':' << port << " (storage "
              << config.storage.string() << (config.mock ? ", mock provider" : "") << ")\n";

    std::thread waiter([&server, signals] {
      int received = 0;
      sigwait(&signals, &received);
      server.stop();
    });
    server.serve();
    // serve() can also return on its own (socket failure); wake the waiter.
    pthread_kill(waiter.native_handle(), SIGTERM);
    waiter.join();
    std::cerr << "genquest: stopped\n";
  } catch (const genquest::Error& e) {
    return fail(genquest::to_string(e.code()), e.what());
  } catch (const std::exception& e) {
    return fail("startup", e.what());
  }
  return 0;
}
