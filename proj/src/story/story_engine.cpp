#include "genquest/story/story_engine.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"
#include "genquest/story/structured_output.hpp"
#include "genquest/text.hpp"

namespace genquest::story {

using nlohmann::json;
using persistence::EventKind;
using persistence::PendingEvent;

namespace {

constexpr std::string_view kNoPremise = "(none: invent the characters and setting freely)";

bool compatible(SessionOp a, SessionOp b) {
  auto pair_is = [&](SessionOp x, SessionOp y) { return (a == x && b == y) || (a == y && b == x); };
  return pair_is(SessionOp::samples, SessionOp::outline) || pair_is(SessionOp::level, SessionOp::outline);
}

std::string_view to_string(SessionOp op) {
  switch (op) {
    case SessionOp::samples:
      return "sampling";
    case SessionOp::outline:
      return "outline generation";
    case SessionOp::level:
      return "level selection";
    case SessionOp::story:
      return "story generation";
  }
  return "?";
}

[[noreturn]] void sequencing(const std::string& message, const GameSession& s) {
  throw Error(ErrorCode::sequencing, message,
              {{"status", std::string(genquest::to_string(s.status))},
               {"awaiting", std::string(genquest::to_string(s.cursor.awaiting))}});
}

std::string render_summaries(const std::vector<std::string>& summaries) {
  if (summaries.empty()) {
    return "(nothing yet; this is the beginning of the story)";
  }
  std::string out;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    out += std::to_string(i + 1) + ". " + summaries[i] + "\n";
  }
  return out;
}

std::string render_endings(const std::vector<std::string>& endings) {
  std::string out;
  for (std::size_t i = 0; i < endings.size(); ++i) {
    out += std::to_string(i + 1) + ". " + endings[i] + "\n";
  }
  return out;
}

std::string segment_id_for(const ProgressCursor& cursor) {
  return "seg-" + std::to_string(cursor.milestone_index + 1) + "-" + std::to_string(cursor.decision_index + 1);
}

}  // namespace

class StoryEngine::OpGuard {
 public:
  OpGuard(StoryEngine& engine, std::string_view session_id, SessionOp op)
      : engine_(engine), session_id_(session_id), op_(op) {
    std::lock_guard lock(engine_.in_flight_mutex_);
    auto& ops = engine_.in_flight_[session_id_];
    for (SessionOp running : ops) {
      if (!compatible(running, op)) {
        throw Error(ErrorCode::busy,
                    "session " + session_id_ + " is busy with " + std::string(to_string(running)),
                    {{"session_id", session_id_}, {"in_flight", std::string(to_string(running))}});
      }
    }
    ops.insert(op);
  }

  ~OpGuard() {
    std::lock_guard lock(engine_.in_flight_mutex_);
    auto it = engine_.in_flight_.find(session_id_);
    if (it == engine_.in_flight_.end()) {
      return;
    }
    auto op = it->second.find(op_);
    if (op != it->second.end()) {
      it->second.erase(op);
    }
    if (it->second.empty()) {
      engine_.in_flight_.erase(it);
    }
  }

  OpGuard(const OpGuard&) = delete;
  OpGuard& operator=(const OpGuard&) = delete;

 private:
  StoryEngine& engine_;
  std::string session_id_;
  SessionOp op_;
};

StoryEngine::StoryEngine(persistence::SessionRepository& repository, llm::Gateway& gateway, GenreCatalog genres,
                         EngineOptions options)
    : repository_(repository),
      gateway_(gateway),
      genres_(std::move(genres)),
      options_(std::move(options)),
      ids_(options_.id_seed ? IdGenerator(*options_.id_seed) : IdGenerator()) {
  if (!options_.clock) {
    options_.clock = system_now;
  }
}

bool StoryEngine::in_flight(std::string_view session_id, SessionOp op) const {
  std::lock_guard lock(in_flight_mutex_);
  auto it = in_flight_.find(session_id);
  return it != in_flight_.end() && it->second.contains(op);
}

GameSession StoryEngine::create_session(std::string_view genre, std::optional<std::string> premise, GameConfig config,
                                        std::optional<std::string> learner) {
  if (!genres_.contains(genre)) {
    throw Error(ErrorCode::validation, "unknown genre '" + std::string(genre) + "'",
                {{"field", "genre"}, {"valid_genres", genres_.ids()}});
  }
  validate(config);
  if (premise && text::trim(*premise).empty()) {
    premise.reset();
  }
  std::string id;
  do {
    id = ids_.next("s");
  } while (repository_.exists(id));

  json payload{{"session_id", id},
               {"genre", std::string(genre)},
               {"premise", premise ? json(*premise) : json(nullptr)},
               {"learner", learner ? json(*learner) : json(nullptr)},
               {"config", config},
               {"created_at", format_iso8601(options_.clock())}};
  repository_.append_event(id, EventKind::session_created, std::move(payload));
  return repository_.get(id);
}

llm::Bindings StoryEngine::story_bindings(const GameSession& s) const {
  const Genre* genre = genres_.find(s.genre);
  llm::Bindings b;
  b["genre"] = s.genre;
  b["genre_name"] = genre ? genre->display_name : s.genre;
  b["genre_examples"] = genre ? genre->example_works : "";
  b["premise"] = s.premise ? *s.premise : std::string(kNoPremise);
  b["milestone_count"] = std::to_string(s.config.milestone_count);
  b["decisions_per_milestone"] = std::to_string(s.config.decisions_per_milestone);
  b["ending_count"] = std::to_string(s.config.ending_count);
  b["options_per_decision"] = std::to_string(s.config.options_per_decision);
  if (s.memory.level) {
    b["level"] = std::string(genquest::to_string(*s.memory.level));
  }
  if (s.memory.outline) {
    b["outline"] = render_outline(*s.memory.outline);
  }
  b["summaries"] = render_summaries(s.memory.summaries);
  b["summary_count"] = std::to_string(s.memory.summaries.size());
  return b;
}

template <typename Parsed, typename Parser>
Parsed StoryEngine::complete_structured(llm::ModelRole role, std::string_view template_id,
                                        const llm::Bindings& bindings, std::string_view session_id,
                                        std::string_view format, Parser&& parse) {
  llm::CompletionRequest request;
  request.role = role;
  request.template_id = std::string(template_id);
  request.bindings = bindings;
  request.session_id = std::string(session_id);
  const std::string base_prompt = gateway_.render_prompt(template_id, bindings);
  request.prompt = base_prompt;

  const int attempts = 1 + std::max(0, options_.structured_retries);
  std::string last_error;
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    const auto result = gateway_.complete(request);
    try {
      return parse(result.text);
    } catch (const FormatError& e) {
      last_error = e.what();
    }
    request.prompt = base_prompt + "\n\n" +
                     gateway_.render_prompt("format_correction", {{"error", last_error}, {"format", std::string(format)}});
  }
  throw Error(ErrorCode::structured_output,
              "provider reply for '" + std::string(template_id) + "' could not be parsed after " +
                  std::to_string(attempts) + " attempts: " + last_error,
              {{"template_id", std::string(template_id)}, {"attempts", attempts}});
}

std::vector<ProficiencySample> StoryEngine::generate_proficiency_samples(std::string_view session_id) {
  OpGuard guard(*this, session_id, SessionOp::samples);
  const GameSession s = repository_.get(session_id);
  if (s.status != SessionStatus::created && s.status != SessionStatus::sampling) {
    sequencing("proficiency samples can only be generated before a level is locked in", s);
  }
  llm::Bindings b = story_bindings(s);
  std::string levels;
  for (CefrLevel level : kAllCefrLevels) {
    levels += levels.empty() ? "" : ", ";
    levels += genquest::to_string(level);
  }
  b["levels"] = levels;
  auto samples = complete_structured<std::vector<ProficiencySample>>(
      llm::ModelRole::proficiency, "proficiency_samples", b, session_id, "samples",
      [](std::string_view reply) { return parse_samples(reply); });
  repository_.append_event(session_id, EventKind::samples_generated, json{{"samples", samples}});
  return samples;
}

GameSession StoryEngine::select_proficiency(std::string_view session_id, CefrLevel level) {
  OpGuard guard(*this, session_id, SessionOp::level);
  const GameSession s = repository_.get(session_id);
  if (s.status == SessionStatus::created) {
    sequencing("no proficiency samples to choose from yet", s);
  }
  if (s.status != SessionStatus::sampling && s.status != SessionStatus::ready) {
    sequencing("the level is fixed once the story has started", s);
  }
  repository_.append_event(session_id, EventKind::level_selected,
                           json{{"level", std::string(genquest::to_string(level))}});
  return repository_.get(session_id);
}

StoryOutline StoryEngine::generate_outline(std::string_view session_id) {
  OpGuard guard(*this, session_id, SessionOp::outline);
  const GameSession s = repository_.get(session_id);
  if (s.status != SessionStatus::created && s.status != SessionStatus::sampling) {
    sequencing("the outline can only be generated before the story is ready", s);
  }
  const GameConfig config = s.config;
  auto outline = complete_structured<StoryOutline>(
      llm::ModelRole::outline, "story_outline", story_bindings(s), session_id, "outline",
      [&config](std::string_view reply) { return parse_outline(reply, config); });
  repository_.append_event(session_id, EventKind::outline_generated, json(outline));
  return outline;
}

std::pair<std::vector<ProficiencySample>, StoryOutline> StoryEngine::initialize(std::string_view session_id) {
  const std::string id(session_id);
  auto outline = std::async(std::launch::async, [this, id] { return generate_outline(id); });
  std::vector<ProficiencySample> samples;
  try {
    samples = generate_proficiency_samples(id);
  } catch (...) {
    outline.wait();
    throw;
  }
  return {std::move(samples), outline.get()};
}

PlotSegment StoryEngine::generate_segment(std::string_view session_id) {
  OpGuard guard(*this, session_id, SessionOp::story);
  const GameSession s = repository_.get(session_id);
  if (s.status != SessionStatus::ready && s.status != SessionStatus::in_progress) {
    sequencing(s.status == SessionStatus::ended ? "the story has ended"
                                                : "the story is not ready: a level and an outline are required",
               s);
  }
  if (s.cursor.awaiting != Awaiting::segment) {
    sequencing("the current segment is awaiting " + std::string(genquest::to_string(s.cursor.awaiting)), s);
  }
  const auto i = s.cursor.milestone_index;
  const auto j = s.cursor.decision_index;
  llm::Bindings b = story_bindings(s);
  b["milestone_number"] = std::to_string(i + 1);
  b["decision_number"] = std::to_string(j + 1);
  b["milestone"] = s.memory.outline->milestones.at(i);
  b["decision_slot"] = s.memory.outline->decision_slots.at(i).at(j);

  const std::size_t option_count = s.config.options_per_decision;
  auto parsed = complete_structured<ParsedSegment>(
      llm::ModelRole::plot, "plot_segment", b, session_id, "segment",
      [option_count](std::string_view reply) { return parse_segment(reply, option_count); });

  const std::string segment_id = segment_id_for(s.cursor);
  repository_.append_event(session_id, EventKind::segment_generated,
                           json{{"segment_id", segment_id},
                                {"milestone_index", i},
                                {"decision_index", j},
                                {"text", parsed.text},
                                {"options", parsed.options}});
  return *repository_.get(session_id).find_segment(segment_id);
}

GameSession StoryEngine::apply_choice(std::string_view session_id, std::size_t option_index,
                                      std::optional<std::string> request_token) {
  if (request_token && request_token->empty()) {
    request_token.reset();
  }
  {
    GameSession s = repository_.get(session_id);
    if (request_token && s.choice_tokens.contains(*request_token)) {
      return s;
    }
  }
  OpGuard guard(*this, session_id, SessionOp::story);
  const GameSession s = repository_.get(session_id);
  if (request_token && s.choice_tokens.contains(*request_token)) {
    return s;
  }
  if (s.cursor.awaiting != Awaiting::choice || s.segments.empty()) {
    sequencing(s.status == SessionStatus::ended ? "the story has ended" : "there is no open decision point", s);
  }
  const PlotSegment& segment = s.segments.back();
  if (option_index >= segment.options.size()) {
    throw Error(ErrorCode::validation,
                "option_index " + std::to_string(option_index) + " is out of range (segment offers " +
                    std::to_string(segment.options.size()) + " options)",
                {{"field", "option_index"}, {"option_count", segment.options.size()}});
  }
  std::string summary = summarize_segment(segment, option_index, session_id);

  std::vector<PendingEvent> batch;
  batch.push_back({EventKind::choice_applied,
                   json{{"segment_id", segment.segment_id},
                        {"option_index", option_index},
                        {"request_token", request_token ? json(*request_token) : json(nullptr)}}});
  batch.push_back({EventKind::summary_appended, json{{"summary", std::move(summary)}}});
  repository_.append_events(session_id, std::move(batch));
  return repository_.get(session_id);
}

std::string StoryEngine::summarize_segment(const PlotSegment& segment, std::size_t chosen_option,
                                           std::string_view session_id) {
  if (text::trim(segment.text).empty()) {
    throw Error(ErrorCode::validation, "cannot summarize an empty segment", {{"field", "text"}});
  }
  if (chosen_option >= segment.options.size()) {
    throw Error(ErrorCode::validation, "chosen option is out of range", {{"field", "option_index"}});
  }
  const std::size_t length = text::utf8_length(segment.text);
  const auto budget = static_cast<std::size_t>(std::floor(static_cast<double>(length) * options_.summary_ratio));
  if (budget == 0) {
    throw Error(ErrorCode::validation, "segment is too short to summarize", {{"field", "text"}});
  }
  const std::string& option = segment.options[chosen_option];
  llm::Bindings b{{"segment", segment.text}, {"chosen_option", option}, {"max_chars", std::to_string(budget)}};
  std::string summary(text::trim(gateway_.complete(llm::ModelRole::summary, "segment_summary", b, session_id).text));
  if (text::utf8_length(summary) <= budget) {
    return summary;
  }
  llm::Bindings retry{{"previous", summary}, {"chosen_option", option}, {"max_chars", std::to_string(budget)}};
  summary = std::string(text::trim(gateway_.complete(llm::ModelRole::summary, "segment_summary_shorter", retry, session_id).text));
  if (text::utf8_length(summary) <= budget) {
    return summary;
  }
  return text::truncate_at_sentence(summary, budget);
}

PlotSegment StoryEngine::generate_ending(std::string_view session_id) {
  OpGuard guard(*this, session_id, SessionOp::story);
  const GameSession s = repository_.get(session_id);
  if (s.cursor.awaiting != Awaiting::ending) {
    sequencing(s.status == SessionStatus::ended ? "the story has already ended"
                                                : "the final decision point has not been reached",
               s);
  }
  llm::Bindings b = story_bindings(s);
  b["endings"] = render_endings(s.memory.outline->endings);
  std::string text = complete_structured<std::string>(llm::ModelRole::plot, "story_ending", b, session_id, "ending",
                                                      [](std::string_view reply) { return parse_ending(reply); });
  repository_.append_event(session_id, EventKind::ending_generated,
                           json{{"segment_id", "seg-end"}, {"text", std::move(text)}});
  return repository_.get(session_id).segments.back();
}

SessionSnapshot StoryEngine::session_status(std::string_view session_id) const {
  const GameSession s = repository_.get(session_id);
  return SessionSnapshot{s.status, s.cursor, s.segments};
}

}  // namespace genquest::story
