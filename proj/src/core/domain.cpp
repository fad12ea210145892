#include "genquest/domain.hpp"

#include <algorithm>

#include "genquest/error.hpp"

namespace genquest {

void validate(const GameConfig& config) {
  auto require = [](bool ok, const char* field, const char* message) {
    if (!ok) {
      throw Error(ErrorCode::validation, message, {{"field", field}});
    }
  };
  require(config.milestone_count >= 1, "milestone_count", "milestone_count must be at least 1");
  require(config.decisions_per_milestone >= 1, "decisions_per_milestone",
          "decisions_per_milestone must be at least 1");
  require(config.ending_count >= 1, "ending_count", "ending_count must be at least 1");
  require(config.options_per_decision >= 2, "options_per_decision", "options_per_decision must be at least 2");
}

void validate(const StoryOutline& outline, const GameConfig& config) {
  auto fail = [](const std::string& message) { throw Error(ErrorCode::structured_output, message); };
  if (outline.milestones.size() != config.milestone_count) {
    fail("outline has " + std::to_string(outline.milestones.size()) + " milestones, expected " +
         std::to_string(config.milestone_count));
  }
  if (outline.decision_slots.size() != config.milestone_count) {
    fail("outline decision slots do not cover every milestone");
  }
  for (const auto& slots : outline.decision_slots) {
    if (slots.size() != config.decisions_per_milestone) {
      fail("outline milestone has " + std::to_string(slots.size()) + " decision points, expected " +
           std::to_string(config.decisions_per_milestone));
    }
  }
  if (outline.endings.size() != config.ending_count) {
    fail("outline has " + std::to_string(outline.endings.size()) + " endings, expected " +
         std::to_string(config.ending_count));
  }
}

std::string_view to_string(Awaiting awaiting) {
  switch (awaiting) {
    case Awaiting::segment:
      return "segment";
    case Awaiting::choice:
      return "choice";
    case Awaiting::ending:
      return "ending";
    case Awaiting::done:
      return "done";
  }
  return "?";
}

std::optional<Awaiting> parse_awaiting(std::string_view text) {
  for (Awaiting a : {Awaiting::segment, Awaiting::choice, Awaiting::ending, Awaiting::done}) {
    if (to_string(a) == text) {
      return a;
    }
  }
  return std::nullopt;
}

std::string_view to_string(SessionStatus status) {
  switch (status) {
    case SessionStatus::created:
      return "created";
    case SessionStatus::sampling:
      return "sampling";
    case SessionStatus::ready:
      return "ready";
    case SessionStatus::in_progress:
      return "in_progress";
    case SessionStatus::ended:
      return "ended";
  }
  return "?";
}

std::optional<SessionStatus> parse_session_status(std::string_view text) {
  for (SessionStatus s : {SessionStatus::created, SessionStatus::sampling, SessionStatus::ready,
                          SessionStatus::in_progress, SessionStatus::ended}) {
    if (to_string(s) == text) {
      return s;
    }
  }
  return std::nullopt;
}

const PlotSegment* GameSession::find_segment(std::string_view segment_id) const {
  auto it = std::find_if(segments.begin(), segments.end(),
                         [&](const PlotSegment& s) { return s.segment_id == segment_id; });
  return it == segments.end() ? nullptr : &*it;
}

std::size_t GameSession::choices_applied() const {
  return static_cast<std::size_t>(
      std::count_if(segments.begin(), segments.end(), [](const PlotSegment& s) { return s.chosen_option.has_value(); }));
}

}  // namespace genquest
