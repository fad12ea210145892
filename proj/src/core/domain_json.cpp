#include "genquest/domain_json.hpp"

#include "genquest/error.hpp"

namespace genquest {

using nlohmann::json;

namespace {

template <typename T>
json optional_to_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from_json(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) {
    return std::nullopt;
  }
  return j.at(key).get<T>();
}

CefrLevel level_from_json(const json& j) {
  return parse_cefr(j.get<std::string>());
}

}  // namespace

json timestamp_to_json(Timestamp t) { return format_iso8601(t); }

Timestamp timestamp_from_json(const json& j) {
  auto t = parse_iso8601(j.get<std::string>());
  if (!t) {
    throw Error(ErrorCode::validation, "malformed timestamp '" + j.get<std::string>() + "'");
  }
  return *t;
}

void to_json(json& j, const GameConfig& v) {
  j = json{{"milestone_count", v.milestone_count},
           {"decisions_per_milestone", v.decisions_per_milestone},
           {"ending_count", v.ending_count},
           {"options_per_decision", v.options_per_decision}};
}

void from_json(const json& j, GameConfig& v) {
  GameConfig defaults;
  v.milestone_count = j.value("milestone_count", defaults.milestone_count);
  v.decisions_per_milestone = j.value("decisions_per_milestone", defaults.decisions_per_milestone);
  v.ending_count = j.value("ending_count", defaults.ending_count);
  v.options_per_decision = j.value("options_per_decision", defaults.options_per_decision);
}

void to_json(json& j, const StoryOutline& v) {
  j = json{{"milestones", v.milestones}, {"decision_slots", v.decision_slots}, {"endings", v.endings}};
}

void from_json(const json& j, StoryOutline& v) {
  j.at("milestones").get_to(v.milestones);
  j.at("decision_slots").get_to(v.decision_slots);
  j.at("endings").get_to(v.endings);
}

void to_json(json& j, const ProgressCursor& v) {
  j = json{{"milestone_index", v.milestone_index},
           {"decision_index", v.decision_index},
           {"awaiting", std::string(to_string(v.awaiting))}};
}

void from_json(const json& j, ProgressCursor& v) {
  j.at("milestone_index").get_to(v.milestone_index);
  j.at("decision_index").get_to(v.decision_index);
  auto awaiting = parse_awaiting(j.at("awaiting").get<std::string>());
  if (!awaiting) {
    throw Error(ErrorCode::validation, "unknown cursor state");
  }
  v.awaiting = *awaiting;
}

void to_json(json& j, const PlotSegment& v) {
  j = json{{"segment_id", v.segment_id},
           {"cursor", v.cursor_at_generation},
           {"text", v.text},
           {"options", v.options},
           {"chosen_option", optional_to_json(v.chosen_option)},
           {"is_ending", v.is_ending()}};
}

void from_json(const json& j, PlotSegment& v) {
  j.at("segment_id").get_to(v.segment_id);
  j.at("cursor").get_to(v.cursor_at_generation);
  j.at("text").get_to(v.text);
  j.at("options").get_to(v.options);
  v.chosen_option = optional_from_json<std::size_t>(j, "chosen_option");
}

void to_json(json& j, const MemoryState& v) {
  j = json{{"outline", optional_to_json(v.outline)},
           {"level", v.level ? json(std::string(to_string(*v.level))) : json(nullptr)},
           {"summaries", v.summaries}};
}

void from_json(const json& j, MemoryState& v) {
  v.outline = optional_from_json<StoryOutline>(j, "outline");
  v.level = j.contains("level") && !j.at("level").is_null() ? std::optional(level_from_json(j.at("level")))
                                                            : std::nullopt;
  j.at("summaries").get_to(v.summaries);
}

void to_json(json& j, const ProficiencySample& v) {
  j = json{{"level", std::string(to_string(v.level))}, {"text", v.text}};
}

void from_json(const json& j, ProficiencySample& v) {
  v.level = level_from_json(j.at("level"));
  j.at("text").get_to(v.text);
}

void to_json(json& j, const QueryRecord& v) {
  j = json{{"query_id", v.query_id},
           {"session_id", v.session_id},
           {"segment_id", v.segment_id},
           {"selected_string", v.selected_string},
           {"selection_start", v.selection_start},
           {"selection_end", v.selection_end},
           {"context_window", v.context_window},
           {"level", std::string(to_string(v.level))},
           {"explanation", v.explanation},
           {"created_at", timestamp_to_json(v.created_at)}};
}

void from_json(const json& j, QueryRecord& v) {
  j.at("query_id").get_to(v.query_id);
  j.at("session_id").get_to(v.session_id);
  j.at("segment_id").get_to(v.segment_id);
  j.at("selected_string").get_to(v.selected_string);
  j.at("selection_start").get_to(v.selection_start);
  j.at("selection_end").get_to(v.selection_end);
  j.at("context_window").get_to(v.context_window);
  v.level = level_from_json(j.at("level"));
  j.at("explanation").get_to(v.explanation);
  v.created_at = timestamp_from_json(j.at("created_at"));
}

void to_json(json& j, const GameSession& v) {
  j = json{{"session_id", v.session_id},
           {"genre", v.genre},
           {"premise", optional_to_json(v.premise)},
           {"learner", optional_to_json(v.learner)},
           {"config", v.config},
           {"memory", v.memory},
           {"cursor", v.cursor},
           {"status", std::string(to_string(v.status))},
           {"created_at", timestamp_to_json(v.created_at)},
           {"samples", v.samples},
           {"segments", v.segments},
           {"queries", v.queries},
           {"choice_tokens", v.choice_tokens}};
}

void from_json(const json& j, GameSession& v) {
  j.at("session_id").get_to(v.session_id);
  j.at("genre").get_to(v.genre);
  v.premise = optional_from_json<std::string>(j, "premise");
  v.learner = optional_from_json<std::string>(j, "learner");
  j.at("config").get_to(v.config);
  j.at("memory").get_to(v.memory);
  j.at("cursor").get_to(v.cursor);
  auto status = parse_session_status(j.at("status").get<std::string>());
  if (!status) {
    throw Error(ErrorCode::validation, "unknown session status");
  }
  v.status = *status;
  v.created_at = timestamp_from_json(j.at("created_at"));
  j.at("samples").get_to(v.samples);
  j.at("segments").get_to(v.segments);
  j.at("queries").get_to(v.queries);
  j.at("choice_tokens").get_to(v.choice_tokens);
}

}  // namespace genquest
