#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "genquest/clock.hpp"
#include "genquest/domain.hpp"
#include "genquest/llm/gateway.hpp"
#include "genquest/persistence/session_repository.hpp"
#include "genquest/story/genre_catalog.hpp"

namespace genquest::story {

struct EngineOptions {
  /// Summaries must not exceed this fraction of the segment's characters.
  double summary_ratio = 0.5;
  /// Extra attempts after a reply that fails to parse.
  int structured_retries = 2;
  std::optional<std::uint64_t> id_seed;  // reproducible session ids when set
  Clock clock = system_now;
};

struct SessionSnapshot {
  SessionStatus status = SessionStatus::created;
  ProgressCursor cursor;
  std::vector<PlotSegment> history;
};

/// Operations that change a session. Within one session a mutating call is
/// rejected with Error(busy) while a conflicting one is in flight; sampling
/// may overlap outline generation, and level selection may overlap the outline.
enum class SessionOp { samples, outline, level, story };

/// Game state machine and both story pipelines: initialization (proficiency
/// samples and outline) and the plot loop (segment, choice, summary, ...,
/// ending). State lives in the repository; every transition is an event.
class StoryEngine {
 public:
  StoryEngine(persistence::SessionRepository& repository, llm::Gateway& gateway, GenreCatalog genres,
              EngineOptions options = {});

  GameSession create_session(std::string_view genre, std::optional<std::string> premise, GameConfig config,
                             std::optional<std::string> learner = std::nullopt);

  std::vector<ProficiencySample> generate_proficiency_samples(std::string_view session_id);
  GameSession select_proficiency(std::string_view session_id, CefrLevel level);
  StoryOutline generate_outline(std::string_view session_id);

  /// Samples and outline in parallel, as the initialization pipeline allows.
  std::pair<std::vector<ProficiencySample>, StoryOutline> initialize(std::string_view session_id);

  PlotSegment generate_segment(std::string_view session_id);

  /// Records the choice, summarizes the segment into memory and advances the
  /// cursor. Replaying a `request_token` that was already applied returns the
  /// current session without advancing.
  GameSession apply_choice(std::string_view session_id, std::size_t option_index,
                           std::optional<std::string> request_token = std::nullopt);

  /// Condenses a segment to at most summary_ratio of its length, naming the
  /// chosen action. Over-long replies get one shorter re-prompt, then are cut
  /// at a sentence boundary.
  std::string summarize_segment(const PlotSegment& segment, std::size_t chosen_option,
                                std::string_view session_id = {});

  PlotSegment generate_ending(std::string_view session_id);

  SessionSnapshot session_status(std::string_view session_id) const;
  GameSession session(std::string_view session_id) const { return repository_.get(session_id); }

  bool in_flight(std::string_view session_id, SessionOp op) const;

  const GenreCatalog& genres() const { return genres_; }
  persistence::SessionRepository& repository() { return repository_; }

 private:
  class OpGuard;

  template <typename Parsed, typename Parser>
  Parsed complete_structured(llm::ModelRole role, std::string_view template_id, const llm::Bindings& bindings,
                             std::string_view session_id, std::string_view format, Parser&& parse);

  llm::Bindings story_bindings(const GameSession& session) const;

  persistence::SessionRepository& repository_;
  llm::Gateway& gateway_;
  GenreCatalog genres_;
  EngineOptions options_;
  IdGenerator ids_;

  mutable std::mutex in_flight_mutex_;
  std::map<std::string, std::multiset<SessionOp>, std::less<>> in_flight_;
};

}  // namespace genquest::story
