#include <doctest.h>

#include <filesystem>
#include <map>
#include <sstream>
#include <thread>

#include "api_fixture.hpp"
#include "genquest/api/envelope.hpp"
#include "genquest/api/server_config.hpp"
#include "genquest/language/query_log.hpp"

using namespace genquest;
using namespace genquest::api;
using gqtest::ApiFixture;
using gqtest::HttpResult;
using nlohmann::json;

namespace {

void check_envelope(const HttpResult& r) {
  INFO("status " << r.status << " body " << r.raw);
  CHECK(envelope_violation(r.body) == "");
  if (r.status >= 400) {
    CHECK(r.body.contains("error"));
  } else {
    CHECK(r.body.contains("data"));
  }
}

void check_error(const HttpResult& r, int status, const std::string& code, bool retriable) {
  check_envelope(r);
  CHECK(r.status == status);
  if (r.body.contains("error")) {
    CHECK(r.code() == code);
    CHECK(r.retriable() == retriable);
    CHECK(r.body["error"]["details"].is_object());
  }
}

ApiFixture over_provider(std::shared_ptr<llm::Provider> provider, ApiOptions api = gqtest::default_api_options()) {
  return ApiFixture(gqtest::with_provider(std::move(provider)), api);
}

}  // namespace

TEST_CASE("envelope helpers") {
  CHECK(envelope_violation(ok(json::array()).body) == "");
  CHECK(envelope_violation(error_response(Error(ErrorCode::busy, "later")).body) == "");
  CHECK(error_response(Error(ErrorCode::busy, "later")).body["error"]["retriable"] == true);
  CHECK(error_response(Error(ErrorCode::validation, "x", json::array({1}))).body["error"]["details"]["info"] ==
        json::array({1}));
  CHECK(envelope_violation(json::array()) != "");
  CHECK(envelope_violation({{"data", 1}, {"error", 2}}) != "");
  CHECK(envelope_violation({{"data", 1}, {"extra", 2}}) != "");
  CHECK(envelope_violation({{"error", {{"code", "nope"}, {"message", "m"}, {"retriable", false}}}}) != "");
  CHECK(envelope_violation({{"error", {{"code", "busy"}, {"message", "m"}}}}) != "");

  const std::map<ErrorCode, int> expected{{ErrorCode::validation, 400},         {ErrorCode::not_found, 404},
                                          {ErrorCode::sequencing, 409},         {ErrorCode::busy, 409},
                                          {ErrorCode::provider_unavailable, 502}, {ErrorCode::provider_config, 502},
                                          {ErrorCode::structured_output, 502},  {ErrorCode::storage, 500},
                                          {ErrorCode::integrity, 500}};
  for (const auto& [code, status] : expected) {
    CHECK(http_status(code) == status);
  }
  CHECK(error_codes().size() == 10);

  Response r;
  try {
    throw std::logic_error("boom");
  } catch (...) {
    r = error_from_exception(std::current_exception());
  }
  CHECK(r.status == 500);
  CHECK(r.body["error"]["code"] == "internal_error");
}

TEST_CASE("server config layering") {
  const auto base = ServerConfig::from_json(json{{"listen", "0.0.0.0:9000"}, {"mock", true}, {"job_wait_ms", 50}});
  CHECK(base.host == "0.0.0.0");
  CHECK(base.port == 9000);
  CHECK(base.mock);
  CHECK(base.job_wait == std::chrono::milliseconds(50));
  CHECK(base.storage == "genquest-data");

  auto layered = ServerConfig::from_json(json{{"storage", "/tmp/x"}}, base);
  CHECK(layered.port == 9000);
  CHECK(layered.storage == "/tmp/x");

  std::map<std::string, std::string> env{{"GENQUEST_LISTEN", ":7000"}, {"GENQUEST_MOCK", "false"},
                                         {"GENQUEST_CORS_ORIGIN", "http://ui"}};
  layered.apply_env([&](const char* name) -> const char* {
    auto it = env.find(name);
    return it == env.end() ? nullptr : it->second.c_str();
  });
  CHECK(layered.host == "0.0.0.0");
  CHECK(layered.port == 7000);
  CHECK_FALSE(layered.mock);
  CHECK(layered.cors_origin == "http://ui");

  ServerConfig c;
  CHECK_THROWS_AS(c.set_listen("nohost"), Error);
  CHECK_THROWS_AS(c.set_listen("h:99999"), Error);
  CHECK_THROWS_AS(c.set_listen("h:abc"), Error);
  CHECK_THROWS_AS(ServerConfig::from_json(json{{"mock", "yes"}}), Error);
  CHECK_THROWS_AS(ServerConfig::from_json(json::array()), Error);
}

TEST_CASE("services build from a mock config") {
  gqtest::TempDir dir;
  ServerConfig config;
  config.storage = dir.path() / "data";
  config.mock = true;
  config.fsync = false;
  auto services = Services::from_config(config);
  const auto s = services.engine->create_session("fantasy", std::nullopt, {});
  CHECK(std::filesystem::exists(dir.path() / "data" / "events" / (s.session_id + ".jsonl")));
  CHECK_FALSE(services.gateway->logging());
}

TEST_CASE("meta endpoints") {
  ApiFixture api;
  const auto health = api.get("/healthz");
  check_envelope(health);
  CHECK(health.data()["status"] == "ok");

  const auto genres = api.get("/genres");
  check_envelope(genres);
  CHECK(genres.data().size() == 6);
  CHECK(genres.data()[0].contains("example_works"));

  const auto spec = api.get("/openapi");
  check_envelope(spec);
  const auto& paths = spec.data()["paths"];
  for (const char* p : {"/healthz", "/genres", "/sessions", "/sessions/{id}", "/sessions/{id}/samples",
                        "/sessions/{id}/level", "/sessions/{id}/outline-status", "/sessions/{id}/segments",
                        "/sessions/{id}/choices", "/sessions/{id}/ending", "/sessions/{id}/queries",
                        "/jobs/{id}"}) {
    CHECK_MESSAGE(paths.contains(p), p);
  }
  CHECK(spec.data()["components"]["schemas"]["Envelope"].contains("oneOf"));
}

TEST_CASE("a whole game over HTTP") {
  ApiFixture api;
  const auto created = api.post("/sessions", {{"genre", "mystery"}, {"config", {{"milestone_count", 2}}}});
  check_envelope(created);
  CHECK(created.status == 201);
  const std::string sid = created.data()["session_id"];
  CHECK(created.data()["status"] == "created");
  CHECK(created.data()["premise"].is_null());

  const auto samples = api.post("/sessions/" + sid + "/samples");
  check_envelope(samples);
  CHECK(samples.data()["samples"].size() == 6);
  CHECK(api.wait_outline(sid) == "ready");

  const auto level = api.post("/sessions/" + sid + "/level", {{"level", "A2"}});
  check_envelope(level);
  CHECK(level.data()["status"] == "ready");
  CHECK(level.data()["level"] == "A2");

  int segments = 0;
  while (true) {
    const auto seg = api.post("/sessions/" + sid + "/segments");
    check_envelope(seg);
    REQUIRE(seg.status == 200);
    ++segments;
    CHECK(seg.data()["segment"]["options"].size() == 3);
    const auto choice =
        api.post("/sessions/" + sid + "/choices", {{"option_index", 1}, {"request_token", "t" + std::to_string(segments)}});
    check_envelope(choice);
    REQUIRE(choice.status == 200);
    if (choice.data()["cursor"]["awaiting"] == "ending") {
      break;
    }
  }
  CHECK(segments == 4);
  const auto ending = api.post("/sessions/" + sid + "/ending");
  check_envelope(ending);
  CHECK(ending.data()["status"] == "ended");

  const auto state = api.get("/sessions/" + sid);
  check_envelope(state);
  CHECK(state.data()["segments"].size() == 5);
  CHECK(state.data()["summary_count"] == 4);
  CHECK(state.data()["current_segment"]["segment_id"] == "seg-end");

  const auto listing = api.get("/sessions?status=ended");
  check_envelope(listing);
  CHECK(listing.data().size() == 1);
}

TEST_CASE("queries over HTTP, with paging and export") {
  ApiFixture api;
  const auto sid = api.open_story();
  const auto state = api.get("/sessions/" + sid).data();
  const std::string text = state["current_segment"]["text"];
  const std::string seg_id = state["current_segment"]["segment_id"];
  const auto word_end = text.find(' ');
  REQUIRE(word_end != std::string::npos);
  const std::string word = text.substr(0, word_end);
  json q = {{"segment_id", seg_id}, {"selected_string", word}, {"selection_start", 0}, {"selection_end", word_end}};
  for (int i = 0; i < 3; ++i) {
    const auto r = api.post("/sessions/" + sid + "/queries", q);
    check_envelope(r);
    CHECK(r.status == 201);
    CHECK(r.data()["selected_string"] == word);
  }
  const auto page = api.get("/sessions/" + sid + "/queries?limit=2");
  check_envelope(page);
  CHECK(page.data()["items"].size() == 2);
  CHECK(page.data()["total"] == 3);
  const std::string cursor = page.data()["next_cursor"];
  const auto rest = api.get("/sessions/" + sid + "/queries?limit=2&after=" + cursor);
  CHECK(rest.data()["items"].size() == 1);
  CHECK(rest.data()["next_cursor"].is_null());

  check_error(api.get("/sessions/" + sid + "/queries?limit=0"), 400, "validation_error", false);
  check_error(api.get("/sessions/" + sid + "/queries?after=q-nope"), 400, "validation_error", false);

  auto c = api.client();
  const auto exported = c.Get("/sessions/" + sid + "/queries/export");
  REQUIRE(exported);
  CHECK(exported->status == 200);
  CHECK(exported->get_header_value("Content-Type").rfind("text/tab-separated-values", 0) == 0);
  std::istringstream in(exported->body);
  const auto records = language::read_query_log(in);
  CHECK(records == api.game.assistant->collect(sid));
  const auto all = c.Get("/queries/export");
  REQUIRE(all);
  CHECK(all->body == exported->body);
}

TEST_CASE("all five error classes arrive in the envelope") {
  SUBCASE("400 validation") {
    ApiFixture api;
    const auto r = api.post("/sessions", {{"genre", "western"}});
    check_error(r, 400, "validation_error", false);
    CHECK(r.body["error"]["details"]["valid_genres"].size() == 6);
    check_error(api.post_raw("/sessions", "{not json"), 400, "validation_error", false);
    check_error(api.post_raw("/sessions", "[1,2]"), 400, "validation_error", false);
    check_error(api.post("/sessions", {{"genre", "fantasy"}, {"config", {{"milestone_count", "three"}}}}), 400,
                "validation_error", false);
    check_error(api.post("/sessions", {{"genre", "fantasy"}, {"config", {{"options_per_decision", 1}}}}), 400,
                "validation_error", false);
    const auto sid = api.open_story();
    check_error(api.post("/sessions/" + sid + "/choices", json::object()), 400, "validation_error", false);
    check_error(api.post("/sessions/" + sid + "/choices", {{"option_index", -1}}), 400, "validation_error", false);
    check_error(api.post("/sessions/" + sid + "/choices", {{"option_index", 7}}), 400, "validation_error", false);
    check_error(api.post("/sessions/" + sid + "/queries", {{"segment_id", "seg-1-1"},
                                                          {"selected_string", "zzz"},
                                                          {"selection_start", 0},
                                                          {"selection_end", 3}}),
                400, "validation_error", false);
    check_error(api.get("/sessions?status=sleeping"), 400, "validation_error", false);
  }
  SUBCASE("400 on an unknown level") {
    ApiFixture api;
    const std::string sid = api.post("/sessions", {{"genre", "fantasy"}}).data()["session_id"];
    api.post("/sessions/" + sid + "/samples");
    check_error(api.post("/sessions/" + sid + "/level", {{"level", "D1"}}), 400, "validation_error", false);
  }
  SUBCASE("404 not found") {
    ApiFixture api;
    check_error(api.get("/sessions/s-missing"), 404, "not_found", false);
    check_error(api.post("/sessions/s-missing/segments"), 404, "not_found", false);
    check_error(api.get("/jobs/job-missing"), 404, "not_found", false);
    check_error(api.get("/no/such/route"), 404, "not_found", false);
  }
  SUBCASE("409 sequencing") {
    ApiFixture api;
    const std::string sid = api.post("/sessions", {{"genre", "fantasy"}}).data()["session_id"];
    check_error(api.post("/sessions/" + sid + "/segments"), 409, "sequencing_error", false);
    check_error(api.post("/sessions/" + sid + "/ending"), 409, "sequencing_error", false);
    check_error(api.post("/sessions/" + sid + "/choices", {{"option_index", 0}}), 409, "sequencing_error", false);
  }
  SUBCASE("409 busy") {
    auto gate = std::make_shared<gqtest::GateProvider>(std::make_shared<llm::MockProvider>(3));
    auto api = over_provider(gate);
    const auto sid = api.open_story();
    gate->hold("segment_summary");
    std::thread first([&] { api.post("/sessions/" + sid + "/choices", {{"option_index", 0}}); });
    gate->wait_for_waiting();
    check_error(api.post("/sessions/" + sid + "/choices", {{"option_index", 1}}), 409, "busy", true);
    check_error(api.post("/sessions/" + sid + "/segments"), 409, "busy", true);
    gate->release();
    first.join();
  }
  SUBCASE("502 provider unavailable") {
    auto routing = std::make_shared<gqtest::RoutingProvider>(std::make_shared<llm::MockProvider>(3));
    routing->route("plot_segment",
                   std::make_shared<gqtest::ScriptedProvider>(std::vector<gqtest::ScriptedProvider::Step>{
                       llm::ProviderError(llm::ProviderError::Kind::transient, "overloaded")}));
    auto api = over_provider(routing);
    const std::string sid = api.post("/sessions", {{"genre", "fantasy"}}).data()["session_id"];
    api.post("/sessions/" + sid + "/samples");
    api.wait_outline(sid);
    api.post("/sessions/" + sid + "/level", {{"level", "B1"}});
    check_error(api.post("/sessions/" + sid + "/segments"), 502, "provider_unavailable", true);
    CHECK(api.get("/sessions/" + sid).data()["status"] == "ready");
  }
  SUBCASE("500 storage") {
    gqtest::TempDir dir;
    auto store = std::make_shared<persistence::FileEventStore>(dir.path());
    ApiFixture api(gqtest::with_store(store));
    const std::string sid = api.post("/sessions", {{"genre", "fantasy"}}).data()["session_id"];
    api.post("/sessions/" + sid + "/samples");
    api.wait_outline(sid);
    const auto path = store->event_path(sid);
    std::filesystem::remove(path);
    std::filesystem::create_directory(path);
    check_error(api.post("/sessions/" + sid + "/level", {{"level", "B1"}}), 500, "storage_error", false);
  }
}

TEST_CASE("slow generations answer 202 and are polled to the same result") {
  auto gate = std::make_shared<gqtest::GateProvider>(std::make_shared<llm::MockProvider>(3));
  auto options = gqtest::default_api_options();
  options.job_wait = std::chrono::milliseconds(50);
  auto api = over_provider(gate, options);
  const std::string sid = api.post("/sessions", {{"genre", "fantasy"}}).data()["session_id"];
  api.post("/sessions/" + sid + "/samples");
  api.wait_outline(sid);
  api.post("/sessions/" + sid + "/level", {{"level", "B1"}});

  gate->hold("plot_segment");
  const auto accepted = api.post("/sessions/" + sid + "/segments");
  check_envelope(accepted);
  REQUIRE(accepted.status == 202);
  const std::string poll = accepted.data()["poll_url"];
  CHECK(accepted.data()["status"] == "running");
  CHECK(accepted.data()["kind"] == "segment");
  bool has_location = false;
  for (const auto& [k, v] : accepted.headers) {
    has_location = has_location || (k == "Location" && v == poll);
  }
  CHECK(has_location);

  const auto still = api.get(poll);
  check_envelope(still);
  CHECK(still.status == 202);

  gate->release();
  const auto done = api.finish(still);
  check_envelope(done);
  CHECK(done.status == 200);
  CHECK(done.data()["segment"]["segment_id"] == "seg-1-1");
  // Polling again returns the same stored response.
  CHECK(api.get(poll).raw == done.raw);

  // A failed job is polled as its error envelope.
  gate->hold("segment_summary");
  const auto failing = api.post("/sessions/" + sid + "/choices", {{"option_index", 9}});
  check_error(failing, 400, "validation_error", false);
  gate->release();
}

TEST_CASE("replayed choices never double-advance, even when racing") {
  auto gate = std::make_shared<gqtest::GateProvider>(std::make_shared<llm::MockProvider>(3));
  auto api = over_provider(gate);
  const auto sid = api.open_story();

  SUBCASE("two racing requests with one token: one 409, story advances once") {
    gate->hold("segment_summary");
    HttpResult first;
    std::thread t([&] { first = api.post("/sessions/" + sid + "/choices", {{"option_index", 2}, {"request_token", "tok"}}); });
    gate->wait_for_waiting();
    const auto second = api.post("/sessions/" + sid + "/choices", {{"option_index", 2}, {"request_token", "tok"}});
    check_error(second, 409, "busy", true);
    gate->release();
    t.join();
    check_envelope(first);
    CHECK(first.status == 200);
    // The client retries the 409 with the same token and gets the same state.
    const auto retry = api.post("/sessions/" + sid + "/choices", {{"option_index", 2}, {"request_token", "tok"}});
    check_envelope(retry);
    CHECK(retry.status == 200);
    CHECK(retry.data() == first.data());
    CHECK(api.game.engine->session(sid).choices_applied() == 1);
    CHECK(api.game.engine->session(sid).memory.summaries.size() == 1);
  }
  SUBCASE("a burst of duplicates") {
    std::vector<std::thread> threads;
    std::vector<int> statuses(16);
    for (int i = 0; i < 16; ++i) {
      threads.emplace_back([&, i] {
        const auto r = api.post("/sessions/" + sid + "/choices", {{"option_index", 0}, {"request_token", "burst"}});
        CHECK(envelope_violation(r.body) == "");
        statuses[i] = r.status;
      });
    }
    for (auto& t : threads) {
      t.join();
    }
    for (int s : statuses) {
      CHECK((s == 200 || s == 409));
    }
    CHECK(std::count(statuses.begin(), statuses.end(), 200) >= 1);
    const auto s = api.game.engine->session(sid);
    CHECK(s.choices_applied() == 1);
    CHECK(s.memory.summaries.size() == 1);
    CHECK(s.cursor.decision_index == 1);
  }
}

TEST_CASE("learner token scopes listings and lookups") {
  ApiFixture api;
  const httplib::Headers ana{{"X-Learner-Token", "ana"}};
  const httplib::Headers bo{{"X-Learner-Token", "bo"}};
  const std::string a = api.post("/sessions", {{"genre", "fantasy"}}, ana).data()["session_id"];
  api.post("/sessions", {{"genre", "horror"}}, bo);
  api.post("/sessions", {{"genre", "romance"}});

  CHECK(api.get("/sessions", ana).data().size() == 1);
  CHECK(api.get("/sessions").data().size() == 3);
  CHECK(api.get("/sessions?genre=horror").data().size() == 1);
  CHECK(api.get("/sessions/" + a, ana).status == 200);
  check_error(api.get("/sessions/" + a, bo), 404, "not_found", false);
  CHECK(api.get("/sessions/" + a, ana).data()["learner"] == "ana");
}

TEST_CASE("CORS headers for the configured origin") {
  ApiFixture api;
  auto c = api.client();
  const auto r = c.Get("/healthz");
  REQUIRE(r);
  CHECK(r->get_header_value("Access-Control-Allow-Origin") == "http://localhost:5173");
  const auto pre = c.Options("/sessions");
  REQUIRE(pre);
  CHECK(pre->status == 204);
  CHECK(pre->get_header_value("Access-Control-Allow-Headers").find("X-Learner-Token") != std::string::npos);
}

TEST_CASE("the shipped example server config and genre list load") {
  const std::string root = GENQUEST_SOURCE_DIR;
  const auto config = ServerConfig::load(root + "/config/server.example.json");
  CHECK(config.port == 8080);
  CHECK(config.cors_origin == "http://localhost:5173");
  CHECK(config.provider_config);
  const auto file = story::GenreCatalog::load(root + "/config/genres.txt");
  const auto builtin = story::GenreCatalog::builtin();
  REQUIRE(file.genres().size() == builtin.genres().size());
  for (std::size_t i = 0; i < file.genres().size(); ++i) {
    CHECK(file.genres()[i].id == builtin.genres()[i].id);
  }
}
