#include "genquest/api/api_server.hpp"

#include <algorithm>
#include <condition_variable>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include <httplib.h>

#include "genquest/api/envelope.hpp"
#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"
#include "genquest/llm/mock_provider.hpp"
#include "genquest/llm/provider_config.hpp"
#include "genquest/text.hpp"

namespace genquest::api {

using nlohmann::json;

Services Services::from_config(const ServerConfig& config) {
  Services s;
  s.store = std::make_shared<persistence::FileEventStore>(config.storage, config.fsync);
  s.repository = std::make_unique<persistence::SessionRepository>(s.store);

  llm::TemplateCatalog catalog = llm::TemplateCatalog::builtin();
  if (config.templates) {
    catalog.load_directory(*config.templates);
  }
  if (config.mock) {
    s.gateway = std::make_unique<llm::Gateway>(std::move(catalog));
    s.gateway->bind_all(std::make_shared<llm::MockProvider>(config.mock_seed, config.mock_latency));
  } else {
    const auto providers = config.provider_config ? llm::ProviderConfig::load(*config.provider_config)
                                                  : llm::ProviderConfig::defaults();
    s.gateway = llm::make_gateway(providers, std::move(catalog));
  }
  s.gateway->set_logging(config.capture_log);

  auto genres = config.genres ? story::GenreCatalog::load(*config.genres) : story::GenreCatalog::builtin();
  s.engine = std::make_unique<story::StoryEngine>(*s.repository, *s.gateway, std::move(genres));
  s.assistant = std::make_unique<language::LanguageAssistant>(*s.repository, *s.gateway);
  return s;
}

namespace {

constexpr const char* kLearnerHeader = "X-Learner-Token";

struct Reply {
  Reply(Response r) : response(std::move(r)) {}  // NOLINT: implicit by design
  Reply(std::string text, std::string type, std::string filename)
      : raw(std::move(text)), content_type(std::move(type)), attachment(std::move(filename)) {}

  Response response;
  std::string raw;  // non-JSON body (query log exports)
  std::string content_type;
  std::string attachment;
};

struct Call {
  const httplib::Request& req;
  std::vector<std::string> params;

  const std::string& id() const { return params.at(0); }

  std::optional<std::string> learner() const {
    if (!req.has_header(kLearnerHeader)) {
      return std::nullopt;
    }
    auto v = req.get_header_value(kLearnerHeader);
    return v.empty() ? std::nullopt : std::optional(v);
  }

  json body() const {
    if (text::trim(req.body).empty()) {
      return json::object();
    }
    json j;
    try {
      j = json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::validation, std::string("request body is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) {
      throw Error(ErrorCode::validation, "request body must be a JSON object");
    }
    return j;
  }

  std::optional<std::string> query(const char* name) const {
    if (!req.has_param(name)) {
      return std::nullopt;
    }
    return req.get_param_value(name);
  }
};

using Handler = std::function<Reply(const Call&)>;

struct Route {
  std::string method;
  std::string path;  // OpenAPI form, e.g. /sessions/{id}
  std::string summary;
  int success;
  Handler handler;
};

std::string path_regex(const std::string& path) {
  std::string out;
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (path[i] == '{') {
      i = path.find('}', i);
      out += "([A-Za-z0-9_-]+)";
    } else {
      out += path[i];
    }
  }
  return out;
}

std::optional<std::string> optional_string(const json& body, const char* field) {
  if (!body.contains(field) || body[field].is_null()) {
    return std::nullopt;
  }
  if (!body[field].is_string()) {
    throw Error(ErrorCode::validation, std::string(field) + " must be a string", {{"field", field}});
  }
  return body[field].get<std::string>();
}

std::string required_string(const json& body, const char* field) {
  auto v = optional_string(body, field);
  if (!v) {
    throw Error(ErrorCode::validation, std::string(field) + " is required", {{"field", field}});
  }
  return *v;
}

std::size_t required_index(const json& body, const char* field) {
  if (!body.contains(field)) {
    throw Error(ErrorCode::validation, std::string(field) + " is required", {{"field", field}});
  }
  const auto& v = body[field];
  if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
    throw Error(ErrorCode::validation, std::string(field) + " must be a non-negative integer", {{"field", field}});
  }
  return v.get<std::size_t>();
}

std::size_t parse_limit(const std::optional<std::string>& text) {
  if (!text) {
    return 20;
  }
  try {
    std::size_t used = 0;
    const long v = std::stol(*text, &used);
    if (used == text->size() && v >= 1 && v <= 200) {
      return static_cast<std::size_t>(v);
    }
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::validation, "limit must be an integer between 1 and 200", {{"field", "limit"}});
}

json session_view(const GameSession& s) {
  json segments = json::array();
  for (const auto& seg : s.segments) {
    segments.push_back(seg);
  }
  json current = nullptr;
  if (!s.segments.empty() && (s.cursor.awaiting == Awaiting::choice || s.cursor.awaiting == Awaiting::done)) {
    current = s.segments.back();
  }
  return {{"session_id", s.session_id},
          {"genre", s.genre},
          {"premise", s.premise ? json(*s.premise) : json(nullptr)},
          {"learner", s.learner ? json(*s.learner) : json(nullptr)},
          {"config", s.config},
          {"status", to_string(s.status)},
          {"cursor", s.cursor},
          {"level", s.level() ? json(to_string(*s.level())) : json(nullptr)},
          {"samples", s.samples},
          {"outline_ready", s.outline().has_value()},
          {"segments", segments},
          {"current_segment", current},
          {"summary_count", s.memory.summaries.size()},
          {"query_count", s.queries.size()},
          {"created_at", timestamp_to_json(s.created_at)}};
}

json envelope_schema() {
  return {{"oneOf",
           {{{"type", "object"},
             {"required", {"data"}},
             {"additionalProperties", false},
             {"properties", {{"data", json::object()}}}},
            {{"type", "object"},
             {"required", {"error"}},
             {"additionalProperties", false},
             {"properties",
              {{"error",
                {{"type", "object"},
                 {"required", {"code", "message", "retriable"}},
                 {"properties",
                  {{"code", {{"type", "string"}, {"enum", error_codes()}}},
                   {"message", {{"type", "string"}}},
                   {"retriable", {{"type", "boolean"}}},
                   {"details", {{"type", "object"}}}}}}}}}}}}};
}

}  // namespace

struct ApiServer::Impl {
  struct Job {
    std::string id;
    std::string kind;
    std::string session_id;
    std::mutex mutex;
    std::condition_variable cv;
    bool done = false;
    Response response;
    std::chrono::steady_clock::time_point finished;
    std::thread worker;
  };

  story::StoryEngine& engine;
  language::LanguageAssistant& assistant;
  ApiOptions options;
  httplib::Server http;
  std::vector<Route> routes;
  std::thread serve_thread;
  int port = -1;

  std::mutex jobs_mutex;
  std::map<std::string, std::shared_ptr<Job>> jobs;
  std::map<std::string, std::shared_ptr<Job>> outline_jobs;  // latest background outline per session
  IdGenerator job_ids;

  Impl(story::StoryEngine& e, language::LanguageAssistant& a, ApiOptions o)
      : engine(e), assistant(a), options(std::move(o)) {
    define_routes();
    install();
  }

  ~Impl() {
    http.stop();
    if (serve_thread.joinable()) {
      serve_thread.join();
    }
    std::lock_guard lock(jobs_mutex);
    for (auto& [id, job] : jobs) {
      if (job->worker.joinable()) {
        job->worker.join();
      }
    }
  }

  // --- jobs -------------------------------------------------------------

  void prune_jobs_locked() {
    const auto now = std::chrono::steady_clock::now();
    for (auto it = jobs.begin(); it != jobs.end();) {
      auto& job = it->second;
      bool expired = false;
      {
        std::lock_guard lock(job->mutex);
        expired = job->done && now - job->finished > options.job_ttl;
      }
      if (expired) {
        if (job->worker.joinable()) {
          job->worker.join();
        }
        it = jobs.erase(it);
      } else {
        ++it;
      }
    }
  }

  std::shared_ptr<Job> start_job(std::string kind, std::string session_id, std::function<Response()> work) {
    auto job = std::make_shared<Job>();
    job->kind = std::move(kind);
    job->session_id = std::move(session_id);
    std::lock_guard lock(jobs_mutex);
    prune_jobs_locked();
    job->id = job_ids.next("job");
    jobs[job->id] = job;
    job->worker = std::thread([job, work = std::move(work)] {
      Response r;
      try {
        r = work();
      } catch (...) {
        r = error_from_exception(std::current_exception());
      }
      {
        std::lock_guard job_lock(job->mutex);
        job->response = std::move(r);
        job->done = true;
        job->finished = std::chrono::steady_clock::now();
      }
      job->cv.notify_all();
    });
    return job;
  }

  static Response pending(const Job& job) {
    return ok({{"job_id", job.id},
               {"kind", job.kind},
               {"session_id", job.session_id},
               {"status", "running"},
               {"poll_url", "/jobs/" + job.id}},
              202);
  }

  Response await(const std::shared_ptr<Job>& job, std::chrono::milliseconds wait) {
    std::unique_lock lock(job->mutex);
    if (job->cv.wait_for(lock, wait, [&] { return job->done; })) {
      return job->response;
    }
    return pending(*job);
  }

  Response run_job(std::string kind, std::string session_id, std::function<Response()> work) {
    return await(start_job(std::move(kind), std::move(session_id), std::move(work)), options.job_wait);
  }

  void start_background_outline(const std::string& sid) {
    const GameSession s = engine.session(sid);
    if (s.outline() || (s.status != SessionStatus::created && s.status != SessionStatus::sampling) ||
        engine.in_flight(sid, story::SessionOp::outline)) {
      return;
    }
    {
      std::lock_guard lock(jobs_mutex);
      auto it = outline_jobs.find(sid);
      if (it != outline_jobs.end()) {
        std::lock_guard job_lock(it->second->mutex);
        if (!it->second->done) {
          return;
        }
      }
    }
    auto job = start_job("outline", sid, [this, sid] {
      engine.generate_outline(sid);
      return ok({{"status", "ready"}});
    });
    std::lock_guard lock(jobs_mutex);
    outline_jobs[sid] = job;
  }

  // --- helpers ----------------------------------------------------------

  /// Session lookup honouring the learner token: a session owned by another
  /// learner is reported as missing.
  GameSession checked_session(const Call& call) const {
    GameSession s = engine.session(call.id());
    const auto learner = call.learner();
    if (learner && s.learner && *learner != *s.learner) {
      throw Error(ErrorCode::not_found, "session " + call.id() + " not found", {{"session_id", call.id()}});
    }
    return s;
  }

  // --- routes -----------------------------------------------------------

  void add(std::string method, std::string path, std::string summary, int success, Handler handler) {
    routes.push_back({std::move(method), std::move(path), std::move(summary), success, std::move(handler)});
  }

  void define_routes() {
    add("GET", "/healthz", "Liveness probe", 200, [](const Call&) { return ok({{"status", "ok"}}); });

    add("GET", "/openapi", "This API description (inside the data envelope)", 200,
        [this](const Call&) { return ok(openapi()); });

    add("GET", "/genres", "Genre catalog", 200, [this](const Call&) {
      json out = json::array();
      for (const auto& g : engine.genres().genres()) {
        out.push_back({{"id", g.id}, {"display_name", g.display_name}, {"example_works", g.example_works}});
      }
      return ok(out);
    });

    add("POST", "/sessions", "Create a session: {genre, premise?, config?, learner?}", 201, [this](const Call& call) {
      const json body = call.body();
      const std::string genre = required_string(body, "genre");
      const auto premise = optional_string(body, "premise");
      auto learner = optional_string(body, "learner");
      if (!learner) {
        learner = call.learner();
      }
      GameConfig config;
      if (body.contains("config") && !body["config"].is_null()) {
        if (!body["config"].is_object()) {
          throw Error(ErrorCode::validation, "config must be an object", {{"field", "config"}});
        }
        config = body["config"].get<GameConfig>();
      }
      return ok(session_view(engine.create_session(genre, premise, config, learner)), 201);
    });

    add("GET", "/sessions", "List sessions (?status=&genre=; scoped by X-Learner-Token)", 200,
        [this](const Call& call) {
          persistence::SessionFilter filter;
          if (auto status = call.query("status")) {
            const auto parsed = parse_session_status(*status);
            if (!parsed) {
              throw Error(ErrorCode::validation, "unknown status '" + *status + "'", {{"field", "status"}});
            }
            filter.status = *parsed;
          }
          filter.genre = call.query("genre");
          filter.learner = call.learner();
          json out = json::array();
          for (const auto& s : engine.repository().list_sessions(filter)) {
            out.push_back({{"session_id", s.session_id},
                           {"genre", s.genre},
                           {"status", to_string(s.status)},
                           {"cursor", s.cursor},
                           {"segment_count", s.segment_count},
                           {"summary_count", s.summary_count},
                           {"created_at", timestamp_to_json(s.created_at)}});
          }
          return ok(out);
        });

    add("GET", "/sessions/{id}", "Session state and story history", 200,
        [this](const Call& call) { return ok(session_view(checked_session(call))); });

    add("POST", "/sessions/{id}/samples",
        "Generate the six leveled sample texts; also starts outline generation in the background", 200,
        [this](const Call& call) {
          checked_session(call);
          const std::string sid = call.id();
          start_background_outline(sid);
          return run_job("samples", sid, [this, sid] {
            json samples = engine.generate_proficiency_samples(sid);
            return ok({{"samples", samples}});
          });
        });

    add("POST", "/sessions/{id}/outline", "Generate the story outline", 200, [this](const Call& call) {
      checked_session(call);
      const std::string sid = call.id();
      return run_job("outline", sid, [this, sid] {
        engine.generate_outline(sid);
        return ok({{"status", "ready"}});
      });
    });

    add("GET", "/sessions/{id}/outline-status", "pending | running | ready | failed", 200, [this](const Call& call) {
      const GameSession s = checked_session(call);
      if (s.outline()) {
        return ok({{"status", "ready"}});
      }
      if (engine.in_flight(s.session_id, story::SessionOp::outline)) {
        return ok({{"status", "running"}});
      }
      std::lock_guard lock(jobs_mutex);
      auto it = outline_jobs.find(s.session_id);
      if (it != outline_jobs.end()) {
        std::lock_guard job_lock(it->second->mutex);
        if (!it->second->done) {
          return ok({{"status", "running"}});
        }
        if (it->second->response.body.contains("error")) {
          return ok({{"status", "failed"}, {"error", it->second->response.body["error"]}});
        }
      }
      return ok({{"status", "pending"}});
    });

    add("POST", "/sessions/{id}/level", "Select the CEFR level: {level}", 200, [this](const Call& call) {
      checked_session(call);
      const json body = call.body();
      const auto level = parse_cefr(required_string(body, "level"));
      return ok(session_view(engine.select_proficiency(call.id(), level)));
    });

    add("POST", "/sessions/{id}/segments", "Generate the next story segment and its options", 200,
        [this](const Call& call) {
          checked_session(call);
          const std::string sid = call.id();
          return run_job("segment", sid, [this, sid] {
            json segment = engine.generate_segment(sid);
            const GameSession s = engine.session(sid);
            return ok({{"segment", segment}, {"cursor", s.cursor}, {"status", to_string(s.status)}});
          });
        });

    add("POST", "/sessions/{id}/choices", "Apply a choice: {option_index, request_token?}", 200,
        [this](const Call& call) {
          checked_session(call);
          const json body = call.body();
          const std::size_t index = required_index(body, "option_index");
          const auto token = optional_string(body, "request_token");
          const std::string sid = call.id();
          return run_job("choice", sid,
                         [this, sid, index, token] { return ok(session_view(engine.apply_choice(sid, index, token))); });
        });

    add("POST", "/sessions/{id}/ending", "Generate the ending", 200, [this](const Call& call) {
      checked_session(call);
      const std::string sid = call.id();
      return run_job("ending", sid, [this, sid] {
        json segment = engine.generate_ending(sid);
        return ok({{"segment", segment}, {"status", to_string(engine.session(sid).status)}});
      });
    });

    add("POST", "/sessions/{id}/queries",
        "Explain a selection: {segment_id, selected_string, selection_start, selection_end} (UTF-8 byte offsets)", 201,
        [this](const Call& call) {
          checked_session(call);
          const json body = call.body();
          const std::string sid = call.id();
          const std::string segment_id = required_string(body, "segment_id");
          const std::string selected = required_string(body, "selected_string");
          const std::size_t start = required_index(body, "selection_start");
          const std::size_t end = required_index(body, "selection_end");
          return run_job("query", sid, [this, sid, segment_id, selected, start, end] {
            return ok(json(assistant.explain(sid, segment_id, selected, start, end)), 201);
          });
        });

    add("GET", "/sessions/{id}/queries", "Query history, newest first (?limit=&after=<query_id>)", 200,
        [this](const Call& call) {
          checked_session(call);
          const auto page = assistant.list_queries(call.id(), parse_limit(call.query("limit")), call.query("after"));
          return ok({{"items", page.items},
                     {"next_cursor", page.next_cursor ? json(*page.next_cursor) : json(nullptr)},
                     {"total", page.total}});
        });

    add("GET", "/sessions/{id}/queries/export", "Query log of one session as TSV", 200, [this](const Call& call) {
      checked_session(call);
      std::ostringstream out;
      assistant.export_log(out, call.id());
      return Reply(out.str(), "text/tab-separated-values; charset=utf-8", call.id() + "-queries.tsv");
    });

    add("GET", "/queries/export", "Query log of every session as TSV", 200, [this](const Call&) {
      std::ostringstream out;
      assistant.export_log(out);
      return Reply(out.str(), "text/tab-separated-values; charset=utf-8", "queries.tsv");
    });

    add("GET", "/jobs/{id}", "Poll a generation job", 200, [this](const Call& call) {
      std::shared_ptr<Job> job;
      {
        std::lock_guard lock(jobs_mutex);
        auto it = jobs.find(call.id());
        if (it == jobs.end()) {
          throw Error(ErrorCode::not_found, "job " + call.id() + " not found", {{"job_id", call.id()}});
        }
        job = it->second;
      }
      std::lock_guard job_lock(job->mutex);
      return job->done ? job->response : pending(*job);
    });
  }

  void write(httplib::Response& res, const Reply& reply) {
    if (!reply.content_type.empty()) {
      res.status = 200;
      if (!reply.attachment.empty()) {
        res.set_header("Content-Disposition", "attachment; filename=\"" + reply.attachment + "\"");
      }
      res.set_content(reply.raw, reply.content_type);
      return;
    }
    res.status = reply.response.status;
    if (reply.response.status == 202 && reply.response.body["data"].contains("poll_url")) {
      res.set_header("Location", reply.response.body["data"]["poll_url"].get<std::string>());
    }
    res.set_content(reply.response.body.dump(), "application/json");
  }

  void install() {
    for (const auto& route : routes) {
      const Handler handler = route.handler;
      auto adapter = [this, handler](const httplib::Request& req, httplib::Response& res) {
        Call call{req, {}};
        for (std::size_t i = 1; i < req.matches.size(); ++i) {
          call.params.push_back(req.matches[i].str());
        }
        try {
          write(res, handler(call));
        } catch (...) {
          write(res, error_from_exception(std::current_exception()));
        }
      };
      const std::string pattern = path_regex(route.path);
      if (route.method == "GET") {
        http.Get(pattern, adapter);
      } else {
        http.Post(pattern, adapter);
      }
    }
    http.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    http.set_error_handler([this](const httplib::Request& req, httplib::Response& res) {
      if (res.body.empty()) {
        const int status = res.status;
        const char* code = status == 404 ? "not_found" : status >= 500 ? "internal_error" : "validation_error";
        write(res, error_response(status, code, "cannot serve " + req.method + " " + req.path));
      }
    });
    http.set_post_routing_handler([this](const httplib::Request&, httplib::Response& res) {
      if (!options.cors_origin.empty()) {
        res.set_header("Access-Control-Allow-Origin", options.cors_origin);
        res.set_header("Vary", "Origin");
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", std::string("Content-Type, ") + kLearnerHeader);
        res.set_header("Access-Control-Expose-Headers", "Location");
      }
    });
    http.set_payload_max_length(1 << 20);
  }

  json openapi() const {
    json paths = json::object();
    for (const auto& route : routes) {
      std::string method = text::to_lower_ascii(route.method);
      json responses = {{std::to_string(route.success),
                         {{"description", "success"},
                          {"content",
                           {{route.path.ends_with("/export") ? "text/tab-separated-values" : "application/json",
                             {{"schema", {{"$ref", "#/components/schemas/Envelope"}}}}}}}}},
                        {"default",
                         {{"description", "error envelope"},
                          {"content", {{"application/json", {{"schema", {{"$ref", "#/components/schemas/Envelope"}}}}}}}}}};
      if (route.method == "POST" && route.path.starts_with("/sessions/")) {
        responses["202"] = {{"description", "still running; poll data.poll_url"}};
      }
      json op = {{"summary", route.summary}, {"responses", responses}};
      if (route.path.find("{id}") != std::string::npos) {
        op["parameters"] = json::array({{{"name", "id"}, {"in", "path"}, {"required", true}, {"schema", {{"type", "string"}}}}});
      }
      paths[route.path][method] = op;
    }
    return {{"openapi", "3.0.3"},
            {"info", {{"title", "GenQuest API"}, {"version", "1"}}},
            {"paths", paths},
            {"components", {{"schemas", {{"Envelope", envelope_schema()}}}}}};
  }
};

ApiServer::ApiServer(story::StoryEngine& engine, language::LanguageAssistant& assistant, ApiOptions options)
    : impl_(std::make_unique<Impl>(engine, assistant, std::move(options))) {}

ApiServer::~ApiServer() = default;

int ApiServer::bind(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->http.bind_to_any_port(host);
  } else {
    impl_->port = impl_->http.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port < 0) {
    throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  }
  return impl_->port;
}

void ApiServer::serve() { impl_->http.listen_after_bind(); }

void ApiServer::start() {
  impl_->serve_thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
}

void ApiServer::stop() {
  impl_->http.stop();
  if (impl_->serve_thread.joinable()) {
    impl_->serve_thread.join();
  }
}

json ApiServer::openapi() const { return impl_->openapi(); }

}  // namespace genquest::api
