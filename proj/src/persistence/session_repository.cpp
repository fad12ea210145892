#include "genquest/persistence/session_repository.hpp"

#include <algorithm>
#include <iostream>

#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"
#include "genquest/persistence/session_reducer.hpp"

namespace genquest::persistence {

namespace {

[[noreturn]] void not_found(std::string_view session_id) {
  throw Error(ErrorCode::not_found, "session " + std::string(session_id) + " not found",
              {{"session_id", std::string(session_id)}});
}

GameSession rehydrate_stream(const DecodedStream& stream, const std::optional<Snapshot>& snapshot) {
  if (snapshot && snapshot->sequence >= 1 && snapshot->sequence <= stream.events.size()) {
    try {
      GameSession base = snapshot->state.get<GameSession>();
      const std::span<const EventRecord> rest(stream.events.data() + snapshot->sequence,
                                              stream.events.size() - snapshot->sequence);
      return rehydrate_from(std::move(base), rest);
    } catch (const nlohmann::json::exception&) {
      // Unreadable snapshot: it is derived data, fall back to a full replay.
    } catch (const Error&) {
      // Snapshot disagrees with the stream; the full replay below decides.
    }
  }
  return rehydrate(stream.events);
}

}  // namespace

SessionRepository::SessionRepository(std::shared_ptr<EventStore> store, Clock clock, std::uint64_t snapshot_interval)
    : store_(std::move(store)), clock_(std::move(clock)), snapshot_interval_(snapshot_interval) {}

std::shared_ptr<SessionRepository::Entry> SessionRepository::entry(std::string_view session_id) const {
  {
    std::shared_lock lock(cache_mutex_);
    auto it = cache_.find(session_id);
    if (it != cache_.end()) {
      return it->second;
    }
  }
  if (!store_->exists(session_id)) {
    not_found(session_id);
  }
  std::unique_lock lock(cache_mutex_);
  auto it = cache_.find(session_id);
  if (it != cache_.end()) {
    return it->second;
  }
  DecodedStream stream = store_->read(session_id);
  if (stream.discarded_tail) {
    store_->discard_tail(session_id);
  }
  auto e = std::make_shared<Entry>();
  e->state = rehydrate_stream(stream, store_->read_snapshot(session_id));
  e->last_sequence = stream.events.size();
  cache_.emplace(std::string(session_id), e);
  return e;
}

std::uint64_t SessionRepository::append_event(std::string_view session_id, EventKind kind, nlohmann::json payload) {
  if (kind == EventKind::session_created) {
    return append_new_session(session_id, std::move(payload));
  }
  std::vector<PendingEvent> batch;
  batch.push_back({kind, std::move(payload)});
  return append_events(session_id, std::move(batch));
}

std::uint64_t SessionRepository::append_new_session(std::string_view session_id, nlohmann::json payload) {
  validate_payload(EventKind::session_created, payload);
  if (!is_valid_session_id(session_id)) {
    throw Error(ErrorCode::validation, "invalid session id '" + std::string(session_id) + "'");
  }
  std::lock_guard create_lock(create_mutex_);
  if (exists(session_id)) {
    throw Error(ErrorCode::validation, "session " + std::string(session_id) + " already exists");
  }
  EventRecord record{std::string(session_id), 1, EventKind::session_created, std::move(payload), clock_()};
  auto e = std::make_shared<Entry>();
  apply_event(e->state, record);
  store_->append(session_id, std::span<const EventRecord>(&record, 1));
  e->last_sequence = 1;
  std::unique_lock lock(cache_mutex_);
  cache_.insert_or_assign(std::string(session_id), e);
  return 1;
}

std::uint64_t SessionRepository::append_events(std::string_view session_id, std::vector<PendingEvent> batch) {
  if (batch.empty()) {
    throw Error(ErrorCode::validation, "empty event batch");
  }
  for (const auto& pending : batch) {
    if (pending.kind == EventKind::session_created) {
      throw Error(ErrorCode::validation, "session_created may only start a new session");
    }
    validate_payload(pending.kind, pending.payload);
  }
  auto e = entry(session_id);
  std::lock_guard append_lock(e->append_mutex);

  GameSession next;
  {
    std::lock_guard state_lock(e->state_mutex);
    next = e->state;
  }
  std::vector<EventRecord> records;
  records.reserve(batch.size());
  std::uint64_t sequence = e->last_sequence;
  const Timestamp now = clock_();
  for (std::size_t i = 0; i < batch.size(); ++i) {
    EventRecord record{std::string(session_id), ++sequence, batch[i].kind, std::move(batch[i].payload), now};
    record.committed = (i + 1 == batch.size());
    try {
      apply_event(next, record);
    } catch (const Error& err) {
      // The event does not follow from the current state; nothing is written.
      throw Error(ErrorCode::sequencing, err.what(), {{"session_id", std::string(session_id)}});
    }
    records.push_back(std::move(record));
  }

  store_->append(session_id, records);

  const std::uint64_t previous = e->last_sequence;
  {
    std::lock_guard state_lock(e->state_mutex);
    e->state = next;
    e->last_sequence = sequence;
  }
  if (snapshot_interval_ > 0 && previous / snapshot_interval_ != sequence / snapshot_interval_) {
    try {
      store_->write_snapshot(session_id, Snapshot{sequence, nlohmann::json(next)});
    } catch (const Error& err) {
      std::clog << "genquest: snapshot skipped: " << err.what() << '\n';
    }
  }
  return sequence;
}

GameSession SessionRepository::get(std::string_view session_id) const {
  auto e = entry(session_id);
  std::lock_guard lock(e->state_mutex);
  return e->state;
}

GameSession SessionRepository::load_session(std::string_view session_id, bool use_snapshot) const {
  if (!store_->exists(session_id)) {
    not_found(session_id);
  }
  const DecodedStream stream = store_->read(session_id);
  return rehydrate_stream(stream, use_snapshot ? store_->read_snapshot(session_id) : std::nullopt);
}

std::vector<EventRecord> SessionRepository::events(std::string_view session_id) const {
  if (!store_->exists(session_id)) {
    not_found(session_id);
  }
  return store_->read(session_id).events;
}

bool SessionRepository::exists(std::string_view session_id) const {
  {
    std::shared_lock lock(cache_mutex_);
    if (cache_.contains(session_id)) {
      return true;
    }
  }
  return store_->exists(session_id);
}

std::vector<SessionSummary> SessionRepository::list_sessions(const SessionFilter& filter) const {
  std::vector<SessionSummary> out;
  for (const auto& id : store_->session_ids()) {
    GameSession s;
    try {
      s = get(id);
    } catch (const Error&) {
      continue;  // unreadable streams are reported by load_session, not by listings
    }
    if ((filter.status && s.status != *filter.status) || (filter.genre && s.genre != *filter.genre) ||
        (filter.learner && s.learner != filter.learner)) {
      continue;
    }
    out.push_back({s.session_id, s.genre, s.status, s.cursor, s.segments.size(), s.memory.summaries.size(),
                   s.created_at});
  }
  std::sort(out.begin(), out.end(), [](const SessionSummary& a, const SessionSummary& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.session_id < b.session_id;
  });
  return out;
}

}  // namespace genquest::persistence
