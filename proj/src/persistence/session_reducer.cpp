#include "genquest/persistence/session_reducer.hpp"

#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"

namespace genquest::persistence {

using nlohmann::json;

namespace {

[[noreturn]] void inconsistent(const EventRecord& e, const std::string& what) {
  throw Error(ErrorCode::integrity,
              "event " + std::to_string(e.sequence) + " (" + std::string(to_string(e.kind)) + ") cannot apply: " + what,
              {{"session_id", e.session_id}, {"sequence", e.sequence}});
}

void advance_cursor(ProgressCursor& cursor, const GameConfig& config) {
  if (cursor.decision_index + 1 < config.decisions_per_milestone) {
    ++cursor.decision_index;
    cursor.awaiting = Awaiting::segment;
  } else if (cursor.milestone_index + 1 < config.milestone_count) {
    ++cursor.milestone_index;
    cursor.decision_index = 0;
    cursor.awaiting = Awaiting::segment;
  } else {
    cursor.awaiting = Awaiting::ending;
  }
}

void promote_if_ready(GameSession& s) {
  if (s.status == SessionStatus::sampling && s.memory.level && s.memory.outline) {
    s.status = SessionStatus::ready;
  }
}

}  // namespace

void apply_event(GameSession& s, const EventRecord& e) {
  const json& p = e.payload;
  if (e.kind != EventKind::session_created && s.session_id.empty()) {
    inconsistent(e, "session has not been created");
  }
  switch (e.kind) {
    case EventKind::session_created: {
      if (!s.session_id.empty()) {
        inconsistent(e, "session already exists");
      }
      GameSession fresh;
      fresh.session_id = p.at("session_id").get<std::string>();
      fresh.genre = p.at("genre").get<std::string>();
      if (!p.at("premise").is_null()) {
        fresh.premise = p.at("premise").get<std::string>();
      }
      if (!p.at("learner").is_null()) {
        fresh.learner = p.at("learner").get<std::string>();
      }
      fresh.config = p.at("config").get<GameConfig>();
      fresh.created_at = timestamp_from_json(p.at("created_at"));
      if (fresh.session_id != e.session_id) {
        inconsistent(e, "payload session id differs from stream");
      }
      s = std::move(fresh);
      break;
    }
    case EventKind::samples_generated: {
      if (s.status != SessionStatus::created && s.status != SessionStatus::sampling) {
        inconsistent(e, "samples only precede the story");
      }
      s.samples = p.at("samples").get<std::vector<ProficiencySample>>();
      s.status = SessionStatus::sampling;
      promote_if_ready(s);
      break;
    }
    case EventKind::level_selected: {
      if (s.status != SessionStatus::sampling && s.status != SessionStatus::ready) {
        inconsistent(e, "level can only be chosen between sampling and the first segment");
      }
      s.memory.level = parse_cefr(p.at("level").get<std::string>());
      promote_if_ready(s);
      break;
    }
    case EventKind::outline_generated: {
      if (s.status != SessionStatus::created && s.status != SessionStatus::sampling) {
        inconsistent(e, "outline only precedes the story");
      }
      StoryOutline outline = p.get<StoryOutline>();
      try {
        validate(outline, s.config);
      } catch (const Error& err) {
        inconsistent(e, err.what());
      }
      s.memory.outline = std::move(outline);
      promote_if_ready(s);
      break;
    }
    case EventKind::segment_generated: {
      if (s.status != SessionStatus::ready && s.status != SessionStatus::in_progress) {
        inconsistent(e, "story has not started");
      }
      if (s.cursor.awaiting != Awaiting::segment) {
        inconsistent(e, "cursor is not awaiting a segment");
      }
      PlotSegment seg;
      seg.segment_id = p.at("segment_id").get<std::string>();
      seg.cursor_at_generation = s.cursor;
      seg.text = p.at("text").get<std::string>();
      seg.options = p.at("options").get<std::vector<std::string>>();
      if (p.at("milestone_index").get<std::size_t>() != s.cursor.milestone_index ||
          p.at("decision_index").get<std::size_t>() != s.cursor.decision_index) {
        inconsistent(e, "segment position disagrees with cursor");
      }
      if (seg.options.size() != s.config.options_per_decision) {
        inconsistent(e, "segment has the wrong number of options");
      }
      if (s.find_segment(seg.segment_id) != nullptr) {
        inconsistent(e, "duplicate segment id");
      }
      s.segments.push_back(std::move(seg));
      s.cursor.awaiting = Awaiting::choice;
      s.status = SessionStatus::in_progress;
      break;
    }
    case EventKind::choice_applied: {
      if (s.cursor.awaiting != Awaiting::choice || s.segments.empty()) {
        inconsistent(e, "cursor is not awaiting a choice");
      }
      PlotSegment& seg = s.segments.back();
      if (seg.segment_id != p.at("segment_id").get<std::string>() || seg.chosen_option) {
        inconsistent(e, "choice does not target the open segment");
      }
      const auto index = p.at("option_index").get<std::size_t>();
      if (index >= seg.options.size()) {
        inconsistent(e, "option index out of range");
      }
      seg.chosen_option = index;
      if (!p.at("request_token").is_null()) {
        s.choice_tokens[p.at("request_token").get<std::string>()] = seg.segment_id;
      }
      break;
    }
    case EventKind::summary_appended: {
      if (s.cursor.awaiting != Awaiting::choice || s.segments.empty() || !s.segments.back().chosen_option) {
        inconsistent(e, "summary must follow a choice");
      }
      if (s.memory.summaries.size() + 1 != s.choices_applied()) {
        inconsistent(e, "summary count out of step with choices");
      }
      s.memory.summaries.push_back(p.at("summary").get<std::string>());
      advance_cursor(s.cursor, s.config);
      break;
    }
    case EventKind::ending_generated: {
      if (s.cursor.awaiting != Awaiting::ending) {
        inconsistent(e, "cursor is not awaiting the ending");
      }
      PlotSegment ending;
      ending.segment_id = p.at("segment_id").get<std::string>();
      ending.cursor_at_generation = s.cursor;
      ending.text = p.at("text").get<std::string>();
      s.segments.push_back(std::move(ending));
      s.cursor.awaiting = Awaiting::done;
      s.status = SessionStatus::ended;
      break;
    }
    case EventKind::query_explained: {
      QueryRecord q = p.get<QueryRecord>();
      if (q.session_id != s.session_id || s.find_segment(q.segment_id) == nullptr) {
        inconsistent(e, "query refers to an unknown segment");
      }
      if (q.selected_string.empty() || q.context_window.find(q.selected_string) == std::string::npos) {
        inconsistent(e, "query selection is not part of its context window");
      }
      s.queries.push_back(std::move(q));
      break;
    }
  }
}

GameSession rehydrate(std::span<const EventRecord> events) {
  if (events.empty() || events.front().kind != EventKind::session_created) {
    throw Error(ErrorCode::integrity, "event stream does not start with session_created", {{"sequence", 1}});
  }
  return rehydrate_from(GameSession{}, events);
}

GameSession rehydrate_from(GameSession base, std::span<const EventRecord> events) {
  for (const auto& e : events) {
    try {
      apply_event(base, e);
    } catch (const nlohmann::json::exception& ex) {
      inconsistent(e, ex.what());
    }
  }
  return base;
}

}  // namespace genquest::persistence
