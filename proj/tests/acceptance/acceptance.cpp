// Acceptance suite: one PASS/FAIL line per top-level criterion. Exits
// nonzero when any criterion fails.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <csignal>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "api_fixture.hpp"
#include "genquest/api/envelope.hpp"
#include "genquest/error.hpp"
#include "genquest/language/query_log.hpp"
#include "genquest/study/statistics.hpp"
#include "genquest/study/vocab.hpp"
#include "genquest/text.hpp"
#include "harness.hpp"

using namespace genquest;
using gqtest::Game;
using gqtest::GameOptions;
using nlohmann::json;

namespace {

struct Failed {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) {
    throw Failed{why};
  }
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --- story --------------------------------------------------------------

void playthrough_property() {
  const auto start = std::chrono::steady_clock::now();
  constexpr int kRuns = 200;
  for (int run = 0; run < kRuns; ++run) {
    GameOptions o;
    o.mock_seed = static_cast<std::uint64_t>(run);
    o.id_seed = static_cast<std::uint64_t>(run) + 1000;
    Game g(o);
    const auto sid = g.ready_session();
    std::mt19937_64 rng(static_cast<std::uint64_t>(run));
    const auto choices = g.play_to_end(sid, rng);
    const auto s = g.engine->session(sid);
    const std::string tag = "run " + std::to_string(run) + ": ";
    expect(choices.size() == 6 && s.choices_applied() == 6, tag + "expected 6 choices");
    expect(s.memory.summaries.size() == 6, tag + "expected 6 summaries");
    expect(s.segments.size() == 7, tag + "expected 7 segments");
    expect(s.status == SessionStatus::ended && s.segments.back().is_ending(), tag + "did not end");
    std::vector<std::size_t> milestones;
    for (std::size_t i = 0; i + 1 < s.segments.size(); ++i) {
      milestones.push_back(s.segments[i].cursor_at_generation.milestone_index);
    }
    expect(milestones == std::vector<std::size_t>{0, 0, 1, 1, 2, 2}, tag + "milestones not visited 0,1,2 in order");
  }
  const auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  expect(elapsed < 10.0, "took " + std::to_string(elapsed) + "s");
}

void replay_determinism() {
  const std::vector<std::size_t> script{2, 0, 1, 1, 0, 2};
  auto run = [&](const std::filesystem::path& dir, std::uint64_t seed) {
    auto store = std::make_shared<persistence::FileEventStore>(dir, false);
    GameOptions o;
    o.store = store;
    o.mock_seed = seed;
    Game g(o);
    const auto sid = g.ready_session();
    for (std::size_t c : script) {
      g.engine->generate_segment(sid);
      g.engine->apply_choice(sid, c);
    }
    g.engine->generate_ending(sid);
    return read_file(store->event_path(sid));
  };
  gqtest::TempDir a, b, c;
  const auto first = run(a.path(), 7);
  const auto second = run(b.path(), 7);
  expect(!first.empty(), "empty event log");
  expect(first == second, "event logs differ");
  // A different seed must show up in the log, or the comparison proves nothing.
  expect(run(c.path(), 8) != first, "seed has no effect on the log");
}

void replay_equivalence() {
  std::mt19937_64 rng(20240601);
  auto store = std::make_shared<persistence::MemoryEventStore>();
  Game g(gqtest::with_store(store));
  for (int run = 0; run < 100; ++run) {
    const auto sid = g.ready_session();
    std::uniform_int_distribution<int> steps_dist(0, 16);
    const int steps = steps_dist(rng);
    for (int step = 0; step < steps; ++step) {
      const auto s = g.engine->session(sid);
      if (s.cursor.awaiting == Awaiting::segment) {
        g.engine->generate_segment(sid);
      } else if (s.cursor.awaiting == Awaiting::choice) {
        std::uniform_int_distribution<std::size_t> pick(0, 2);
        g.engine->apply_choice(sid, pick(rng), "tok-" + std::to_string(step));
      } else if (s.cursor.awaiting == Awaiting::ending) {
        g.engine->generate_ending(sid);
      } else {
        break;
      }
      if (!s.segments.empty() && rng() % 3 == 0) {
        const auto& seg = s.segments.back();
        const auto cut = seg.text.find(' ');
        if (cut != std::string::npos) {
          g.assistant->explain(sid, seg.segment_id, seg.text.substr(0, cut), 0, cut);
        }
      }
    }
    const auto live = g.engine->session(sid);
    persistence::SessionRepository fresh(store, stepping_clock(gqtest::fixed_epoch()));
    const std::string tag = "run " + std::to_string(run) + ": ";
    expect(fresh.load_session(sid, false) == live, tag + "full replay differs from live state");
    expect(fresh.load_session(sid, true) == live, tag + "snapshot replay differs from live state");
  }
}

void call_accounting() {
  Game g;
  expect(g.gateway->logging(), "capture log is off");
  const auto sid = g.ready_session();
  std::mt19937_64 rng(3);
  g.play_to_end(sid, rng);
  std::map<llm::ModelRole, int> by_role;
  std::map<std::string, int> by_template;
  for (const auto& e : g.gateway->capture_log(sid)) {
    ++by_role[e.role];
    ++by_template[e.template_id];
  }
  const GameConfig config;
  const int md = static_cast<int>(config.decision_total());
  expect(by_role[llm::ModelRole::proficiency] == 1, "proficiency calls " + std::to_string(by_role[llm::ModelRole::proficiency]));
  expect(by_role[llm::ModelRole::outline] == 1, "outline calls " + std::to_string(by_role[llm::ModelRole::outline]));
  expect(by_role[llm::ModelRole::plot] == md + 1, "plot calls " + std::to_string(by_role[llm::ModelRole::plot]));
  expect(by_role[llm::ModelRole::summary] == md, "summary calls " + std::to_string(by_role[llm::ModelRole::summary]));
  expect(by_template["plot_segment"] == md && by_template["story_ending"] == 1, "plot calls split wrongly");
  expect(g.gateway->capture_log(sid).size() == static_cast<std::size_t>(2 + 2 * md + 1), "unexpected extra calls");
}

// --- study --------------------------------------------------------------

void table_one_stats() {
  const std::vector<double> scores{17.5, 9, 13, 13, 9, 17, 18, 6, 18.5};
  const auto d = study::descriptive_stats(scores);
  expect(std::abs(d.mean - 13.44) <= 0.005, "mean " + std::to_string(d.mean));
  expect(std::abs(d.sd - 4.62) <= 0.005, "sd " + std::to_string(d.sd));
}

void scoring_truth_table() {
  using study::Judgment;
  const std::vector<std::optional<Judgment>> judgments{std::nullopt, Judgment::correct, Judgment::partial,
                                                       Judgment::incorrect};
  for (bool known : {false, true}) {
    for (const auto& j : judgments) {
      double expected = 0;
      bool throws = false;
      if (known) {
        if (!j) {
          throws = true;
        } else {
          expected = *j == Judgment::correct ? 1.0 : *j == Judgment::partial ? 0.5 : 0.0;
        }
      }
      try {
        const double got = study::score_item(known, j);
        expect(!throws && got == expected, "wrong score for one combination");
      } catch (const Error&) {
        expect(throws, "unexpected error");
      }
    }
  }
}

double covariance_alpha(const study::Matrix& rows) {
  const std::size_t n = rows.size(), k = rows[0].size();
  std::vector<double> means(k, 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < k; ++c) means[c] += r[c];
  for (auto& m : means) m /= static_cast<double>(n);
  double trace = 0, total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double cov = 0;
      for (const auto& r : rows) cov += (r[i] - means[i]) * (r[j] - means[j]);
      cov /= static_cast<double>(n - 1);
      total += cov;
      if (i == j) trace += cov;
    }
  }
  const double kd = static_cast<double>(k);
  return kd / (kd - 1) * (1 - trace / total);
}

void alpha_oracle() {
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<int> rows_dist(2, 30), cols_dist(2, 12), rating(1, 7);
  std::normal_distribution<double> noise;
  int checked = 0;
  while (checked < 1000) {
    study::Matrix m(static_cast<std::size_t>(rows_dist(rng)), std::vector<double>(static_cast<std::size_t>(cols_dist(rng))));
    const bool continuous = checked % 2 == 0;
    for (auto& row : m) {
      const double trait = noise(rng);
      for (auto& v : row) v = continuous ? trait + noise(rng) : rating(rng);
    }
    double got = 0;
    try {
      got = study::cronbach_alpha(m);
    } catch (const Error&) {
      continue;  // constant totals
    }
    const double want = covariance_alpha(m);
    expect(std::abs(got - want) < 1e-9, "differs from covariance form by " + std::to_string(std::abs(got - want)));
    ++checked;
  }
  study::Matrix dup;
  for (int i = 0; i < 50; ++i) {
    const double v = rating(rng);
    dup.push_back({v, v, v});
  }
  expect(std::abs(study::cronbach_alpha(dup) - 1.0) < 1e-12, "duplicated columns do not give 1");
  study::Matrix independent(20000, std::vector<double>(5));
  for (auto& row : independent)
    for (auto& v : row) v = noise(rng);
  const double a = study::cronbach_alpha(independent);
  expect(std::abs(a) < 0.1, "independent columns give " + std::to_string(a));
}

// --- api ----------------------------------------------------------------

void api_contract() {
  using gqtest::ApiFixture;
  using gqtest::HttpResult;
  int checked = 0;
  auto envelope = [&](const HttpResult& r, const std::string& what) {
    const auto v = api::envelope_violation(r.body);
    expect(v.empty(), what + ": " + v + " in " + r.raw);
    expect((r.status >= 400) == r.body.contains("error"), what + ": status and envelope disagree");
    ++checked;
    return r;
  };
  auto error = [&](const HttpResult& r, int status, const std::string& code, const std::string& what) {
    envelope(r, what);
    expect(r.status == status && r.code() == code,
           what + ": got " + std::to_string(r.status) + " " + r.raw);
  };

  // Success on every JSON endpoint, 202 polling included.
  auto gate = std::make_shared<gqtest::GateProvider>(std::make_shared<llm::MockProvider>(7));
  auto options = gqtest::default_api_options();
  options.job_wait = std::chrono::milliseconds(100);
  ApiFixture api(gqtest::with_provider(gate), options);
  envelope(api.get("/healthz"), "healthz");
  envelope(api.get("/openapi"), "openapi");
  envelope(api.get("/genres"), "genres");
  const auto created = envelope(api.post("/sessions", {{"genre", "fantasy"}}), "create");
  const std::string sid = created.data()["session_id"];
  envelope(api.get("/sessions"), "list");
  envelope(api.get("/sessions/" + sid), "get");
  const std::string other = api.post("/sessions", {{"genre", "horror"}}).data()["session_id"];
  envelope(api.post("/sessions/" + other + "/outline"), "outline");
  envelope(api.finish(api.post("/sessions/" + sid + "/samples")), "samples");
  envelope(api.get("/sessions/" + sid + "/outline-status"), "outline-status");
  expect(api.wait_outline(sid) == "ready", "outline never ready");
  envelope(api.post("/sessions/" + sid + "/level", {{"level", "B1"}}), "level");
  gate->hold("plot_segment");
  const auto accepted = envelope(api.post("/sessions/" + sid + "/segments"), "segments 202");
  expect(accepted.status == 202, "held segment did not answer 202");
  envelope(api.get(accepted.data()["poll_url"].get<std::string>()), "job pending");
  gate->release();
  const auto segment = envelope(api.finish(accepted), "job done");
  expect(segment.status == 200, "polled job did not finish");
  const std::string text = segment.data()["segment"]["text"];
  const std::string seg_id = segment.data()["segment"]["segment_id"];
  const auto cut = text.find(' ');
  envelope(api.post("/sessions/" + sid + "/queries", {{"segment_id", seg_id},
                                                     {"selected_string", text.substr(0, cut)},
                                                     {"selection_start", 0},
                                                     {"selection_end", cut}}),
           "query");
  envelope(api.get("/sessions/" + sid + "/queries"), "query list");
  auto client = api.client();
  for (const std::string& path : {"/sessions/" + sid + "/queries/export", std::string("/queries/export")}) {
    const auto r = client.Get(path);
    expect(r && r->status == 200 && r->get_header_value("Content-Type").starts_with("text/tab-separated-values"),
           path + " is not TSV");
  }

  // Idempotent choice under a race: one token, many clients, one advance.
  gate->hold("segment_summary");
  std::vector<std::thread> racers;
  std::vector<HttpResult> results(12);
  for (std::size_t i = 0; i < results.size(); ++i) {
    racers.emplace_back([&, i] {
      results[i] = api.finish(api.post("/sessions/" + sid + "/choices", {{"option_index", 1}, {"request_token", "race"}}));
    });
  }
  gate->wait_for_waiting();
  std::this_thread::sleep_for(std::chrono::milliseconds(50));
  gate->release();
  for (auto& t : racers) t.join();
  for (const auto& r : results) {
    envelope(r, "racing choice");
    expect(r.status == 200 || (r.status == 409 && r.code() == "busy"), "racing choice got " + r.raw);
  }
  const auto retry = envelope(api.post("/sessions/" + sid + "/choices", {{"option_index", 1}, {"request_token", "race"}}),
                              "choice replay");
  expect(retry.status == 200, "replay was not answered");
  auto s = api.game.engine->session(sid);
  expect(s.choices_applied() == 1 && s.memory.summaries.size() == 1 && s.cursor.decision_index == 1,
         "choice applied more than once");
  envelope(api.post("/sessions/" + sid + "/segments"), "second segment");

  // The five error classes.
  error(api.post("/sessions", {{"genre", "western"}}), 400, "validation_error", "validation");
  error(api.post_raw("/sessions", "{oops"), 400, "validation_error", "bad json");
  error(api.get("/sessions/s-none"), 404, "not_found", "not found");
  error(api.get("/jobs/job-none"), 404, "not_found", "job not found");
  error(api.post("/sessions/" + other + "/ending"), 409, "sequencing_error", "sequencing");
  gate->hold("segment_summary");
  std::thread holder([&] { api.finish(api.post("/sessions/" + sid + "/choices", {{"option_index", 0}})); });
  gate->wait_for_waiting();
  error(api.post("/sessions/" + sid + "/choices", {{"option_index", 0}}), 409, "busy", "busy");
  gate->release();
  holder.join();

  {
    auto routing = std::make_shared<gqtest::RoutingProvider>(std::make_shared<llm::MockProvider>(7));
    routing->route("plot_segment", std::make_shared<gqtest::ScriptedProvider>(std::vector<gqtest::ScriptedProvider::Step>{
                                       llm::ProviderError(llm::ProviderError::Kind::transient, "overloaded")}));
    ApiFixture down(gqtest::with_provider(routing));
    const std::string d = down.post("/sessions", {{"genre", "mystery"}}).data()["session_id"];
    down.post("/sessions/" + d + "/samples");
    down.wait_outline(d);
    down.post("/sessions/" + d + "/level", {{"level", "A2"}});
    const auto r = down.post("/sessions/" + d + "/segments");
    error(r, 502, "provider_unavailable", "provider");
    expect(r.retriable(), "provider outage not retriable");
  }
  {
    gqtest::TempDir dir;
    auto store = std::make_shared<persistence::FileEventStore>(dir.path(), false);
    ApiFixture broken(gqtest::with_store(store));
    const std::string b = broken.post("/sessions", {{"genre", "romance"}}).data()["session_id"];
    std::filesystem::remove(store->event_path(b));
    std::filesystem::create_directory(store->event_path(b));
    error(broken.post("/sessions/" + b + "/samples"), 500, "storage_error", "storage");
  }
  expect(checked > 30, "too few responses checked");
}

// --- language -----------------------------------------------------------

void language_invariants() {
  // Substring check on fuzzed selections.
  Game g;
  const auto sid = g.ready_session();
  std::mt19937_64 rng(77);
  g.play_to_end(sid, rng);
  const auto s = g.engine->session(sid);
  int accepted = 0, rejected = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& seg = s.segments[rng() % s.segments.size()];
    const auto& t = seg.text;
    std::size_t a = rng() % t.size(), b = rng() % t.size();
    if (a > b) std::swap(a, b);
    b = std::min(t.size(), b + 1);
    while (a > 0 && (static_cast<unsigned char>(t[a]) & 0xC0) == 0x80) --a;
    while (b < t.size() && (static_cast<unsigned char>(t[b]) & 0xC0) == 0x80) ++b;
    const std::string selection = t.substr(a, b - a);
    if (text::trim(selection).empty()) {
      continue;
    }
    const bool corrupt = i % 4 == 3;
    const std::string claimed = corrupt ? selection + "#" : selection;
    try {
      const auto rec = g.assistant->explain(sid, seg.segment_id, claimed, a, b);
      expect(!corrupt, "a mismatched selection was accepted");
      expect(t.substr(rec.selection_start, rec.selection_end - rec.selection_start) == rec.selected_string,
             "stored selection is not the segment substring");
      expect(rec.context_window.find(rec.selected_string) != std::string::npos, "context lacks the selection");
      ++accepted;
    } catch (const Error& e) {
      expect(corrupt && e.code() == ErrorCode::validation, std::string("unexpected error: ") + e.what());
      ++rejected;
    }
  }
  expect(accepted > 50 && rejected > 10, "fuzzing did not exercise both outcomes");

  // Persistence before response: the child dies right after explain() returns.
  gqtest::TempDir dir;
  std::string sid2;
  {
    auto store = std::make_shared<persistence::FileEventStore>(dir.path());
    Game setup(gqtest::with_store(store));
    sid2 = setup.ready_session();
    setup.engine->generate_segment(sid2);
  }
  int fds[2];
  expect(pipe(fds) == 0, "pipe failed");
  const pid_t child = fork();
  if (child == 0) {
    close(fds[0]);
    auto store = std::make_shared<persistence::FileEventStore>(dir.path());
    GameOptions o;
    o.store = store;
    o.id_seed = 99;
    Game g2(o);
    const auto seg = g2.engine->session(sid2).segments.back();
    const auto cut = seg.text.find(' ');
    const auto rec = g2.assistant->explain(sid2, seg.segment_id, seg.text.substr(0, cut), 0, cut);
    const std::string id = rec.query_id + "\n";
    (void)!write(fds[1], id.data(), id.size());
    kill(getpid(), SIGKILL);
  }
  close(fds[1]);
  std::string returned;
  char buf[128];
  for (ssize_t n; (n = read(fds[0], buf, sizeof buf)) > 0;) returned.append(buf, static_cast<std::size_t>(n));
  close(fds[0]);
  int status = 0;
  waitpid(child, &status, 0);
  expect(WIFSIGNALED(status) && WTERMSIG(status) == SIGKILL, "child was not killed");
  expect(!returned.empty() && returned.back() == '\n', "child returned no query id");
  returned.pop_back();
  auto store = std::make_shared<persistence::FileEventStore>(dir.path());
  persistence::SessionRepository reopened(store);
  const auto recovered = reopened.load_session(sid2, false).queries;
  expect(std::any_of(recovered.begin(), recovered.end(), [&](const auto& q) { return q.query_id == returned; }),
         "returned query " + returned + " was lost");

  // TSV export and import.
  const auto records = g.assistant->collect(sid);
  std::stringstream tsv;
  g.assistant->export_log(tsv, sid);
  expect(language::read_query_log(tsv) == records, "TSV round trip is lossy");
  std::vector<QueryRecord> tricky = records;
  tricky[0].explanation = "tab\there\nnewline \\ backslash \xC3\xA9";
  tricky[0].selected_string = "line\r\nbreak";
  std::stringstream tsv2;
  language::write_query_log(tsv2, tricky);
  expect(language::read_query_log(tsv2) == tricky, "TSV round trip loses escapes");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void()>>> criteria{
      {"full playthroughs under the mock provider", playthrough_property},
      {"replay determinism", replay_determinism},
      {"persistence replay equivalence", replay_equivalence},
      {"LLM call accounting", call_accounting},
      {"vocabulary score statistics", table_one_stats},
      {"scoring truth table", scoring_truth_table},
      {"Cronbach's alpha oracle", alpha_oracle},
      {"API contract", api_contract},
      {"language assistant invariants", language_invariants},
  };
  // The fork-based check must run before any server threads exist.
  std::map<std::string, std::string> failures;
  std::vector<std::size_t> order(criteria.size());
  std::iota(order.begin(), order.end(), 0);
  std::swap(order[7], order[8]);
  for (std::size_t i : order) {
    try {
      criteria[i].second();
    } catch (const Failed& f) {
      failures[criteria[i].first] = f.why;
    } catch (const std::exception& e) {
      failures[criteria[i].first] = std::string("exception: ") + e.what();
    }
  }
  for (const auto& [name, run] : criteria) {
    auto it = failures.find(name);
    if (it == failures.end()) {
      std::cout << "PASS " << name << '\n';
    } else {
      std::cout << "FAIL " << name << ": " << it->second << '\n';
    }
  }
  return failures.empty() ? 0 : 1;
}
