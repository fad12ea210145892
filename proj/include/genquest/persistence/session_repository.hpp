#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "genquest/clock.hpp"
#include "genquest/domain.hpp"
#include "genquest/persistence/event.hpp"
#include "genquest/persistence/event_store.hpp"

namespace genquest::persistence {

struct PendingEvent {
  EventKind kind;
  nlohmann::json payload;
};

struct SessionFilter {
  std::optional<SessionStatus> status;
  std::optional<std::string> genre;
  std::optional<std::string> learner;
};

struct SessionSummary {
  std::string session_id;
  std::string genre;
  SessionStatus status = SessionStatus::created;
  ProgressCursor cursor;
  std::size_t segment_count = 0;
  std::size_t summary_count = 0;
  Timestamp created_at{};
};

/// Event-sourced session storage with an in-memory cache of current state.
///
/// Appends to one session are serialized; different sessions append
/// concurrently. Readers copy the cached state under a short lock and never
/// wait for an append's I/O.
class SessionRepository {
 public:
  explicit SessionRepository(std::shared_ptr<EventStore> store, Clock clock = system_now,
                             std::uint64_t snapshot_interval = 20);

  /// Validates, assigns the next sequence number, persists durably, then
  /// applies the event to the cached state. Returns the sequence number.
  /// session_created must be the first event of a new session id.
  std::uint64_t append_event(std::string_view session_id, EventKind kind, nlohmann::json payload);

  /// Atomic multi-event append: on reload either all events are present or none.
  std::uint64_t append_events(std::string_view session_id, std::vector<PendingEvent> batch);

  /// Current state (cached). Throws Error(not_found).
  GameSession get(std::string_view session_id) const;

  /// Fresh rehydration from storage, bypassing the cache.
  GameSession load_session(std::string_view session_id, bool use_snapshot = true) const;

  std::vector<EventRecord> events(std::string_view session_id) const;
  std::vector<SessionSummary> list_sessions(const SessionFilter& filter = {}) const;
  bool exists(std::string_view session_id) const;

  EventStore& store() { return *store_; }

 private:
  struct Entry {
    std::mutex append_mutex;
    mutable std::mutex state_mutex;
    GameSession state;
    std::uint64_t last_sequence = 0;
  };

  std::shared_ptr<Entry> entry(std::string_view session_id) const;
  std::uint64_t append_new_session(std::string_view session_id, nlohmann::json payload);

  std::shared_ptr<EventStore> store_;
  Clock clock_;
  std::uint64_t snapshot_interval_;

  mutable std::shared_mutex cache_mutex_;
  mutable std::map<std::string, std::shared_ptr<Entry>, std::less<>> cache_;
  std::mutex create_mutex_;
};

}  // namespace genquest::persistence
