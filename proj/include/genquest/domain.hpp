#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/cefr.hpp"
#include "genquest/clock.hpp"

namespace genquest {

/// Shape of one game: M milestones, D decision points per milestone,
/// E candidate endings, and how many actions each decision offers.
struct GameConfig {
  std::size_t milestone_count = 3;
  std::size_t decisions_per_milestone = 2;
  std::size_t ending_count = 2;
  std::size_t options_per_decision = 3;

  /// Total decision points, M*D.
  std::size_t decision_total() const { return milestone_count * decisions_per_milestone; }

  bool operator==(const GameConfig&) const = default;
};

/// Throws Error(validation) when any count is zero or fewer than two options are offered.
void validate(const GameConfig& config);

struct StoryOutline {
  std::vector<std::string> milestones;
  std::vector<std::vector<std::string>> decision_slots;  // [milestone][decision]
  std::vector<std::string> endings;

  bool operator==(const StoryOutline&) const = default;
};

/// Throws Error(structured_output) when the outline's shape disagrees with the config.
void validate(const StoryOutline& outline, const GameConfig& config);

enum class Awaiting { segment, choice, ending, done };

std::string_view to_string(Awaiting awaiting);
std::optional<Awaiting> parse_awaiting(std::string_view text);

struct ProgressCursor {
  std::size_t milestone_index = 0;
  std::size_t decision_index = 0;
  Awaiting awaiting = Awaiting::segment;

  bool operator==(const ProgressCursor&) const = default;
};

struct PlotSegment {
  std::string segment_id;
  ProgressCursor cursor_at_generation;
  std::string text;
  std::vector<std::string> options;  // empty iff this is an ending
  std::optional<std::size_t> chosen_option;

  bool is_ending() const { return options.empty(); }

  bool operator==(const PlotSegment&) const = default;
};

/// What every generation call is conditioned on.
struct MemoryState {
  std::optional<StoryOutline> outline;
  std::optional<CefrLevel> level;
  std::vector<std::string> summaries;  // one per applied choice, append-only

  bool operator==(const MemoryState&) const = default;
};

struct ProficiencySample {
  CefrLevel level = CefrLevel::A1;
  std::string text;

  bool operator==(const ProficiencySample&) const = default;
};

enum class SessionStatus { created, sampling, ready, in_progress, ended };

std::string_view to_string(SessionStatus status);
std::optional<SessionStatus> parse_session_status(std::string_view text);

/// One learner lookup. Offsets are byte offsets into the segment text.
struct QueryRecord {
  std::string query_id;
  std::string session_id;
  std::string segment_id;
  std::string selected_string;
  std::size_t selection_start = 0;
  std::size_t selection_end = 0;
  std::string context_window;
  CefrLevel level = CefrLevel::A1;
  std::string explanation;
  Timestamp created_at{};

  bool operator==(const QueryRecord&) const = default;
};

struct GameSession {
  std::string session_id;
  std::string genre;
  std::optional<std::string> premise;
  std::optional<std::string> learner;
  GameConfig config;
  MemoryState memory;
  ProgressCursor cursor;
  SessionStatus status = SessionStatus::created;
  Timestamp created_at{};

  std::vector<ProficiencySample> samples;
  std::vector<PlotSegment> segments;
  std::vector<QueryRecord> queries;
  std::map<std::string, std::string> choice_tokens;  // request token -> segment id

  const std::optional<StoryOutline>& outline() const { return memory.outline; }
  const std::optional<CefrLevel>& level() const { return memory.level; }

  const PlotSegment* find_segment(std::string_view segment_id) const;
  std::size_t choices_applied() const;

  bool operator==(const GameSession&) const = default;
};

}  // namespace genquest
