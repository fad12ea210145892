#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "genquest/persistence/event.hpp"

namespace genquest::persistence {

struct Snapshot {
  std::uint64_t sequence = 0;  // state after this event
  nlohmann::json state;
};

struct DecodedStream {
  std::vector<EventRecord> events;  // committed prefix, gapless from 1
  std::size_t committed_bytes = 0;
  bool discarded_tail = false;      // a torn line or an unfinished batch was dropped
};

/// Decodes a JSON-lines event stream. A final line without '\n' is a torn
/// write, and trailing uncommitted events are an interrupted batch; both are
/// dropped. Anything else malformed throws Error(integrity) with the first
/// bad sequence number in details["sequence"].
DecodedStream decode_stream(std::string_view session_id, std::string_view content);

bool is_valid_session_id(std::string_view session_id);

/// Append-only per-session event streams plus derived snapshots.
class EventStore {
 public:
  virtual ~EventStore() = default;

  /// Durable before return. Throws Error(storage) on I/O failure.
  virtual void append(std::string_view session_id, std::span<const EventRecord> batch) = 0;

  /// Throws Error(not_found) for an unknown session, Error(integrity) for corruption.
  virtual DecodedStream read(std::string_view session_id) const = 0;

  /// Physically removes a dropped tail so later appends continue the committed prefix.
  virtual void discard_tail(std::string_view session_id) = 0;

  virtual bool exists(std::string_view session_id) const = 0;
  virtual std::vector<std::string> session_ids() const = 0;

  virtual void write_snapshot(std::string_view session_id, const Snapshot& snapshot) = 0;
  virtual std::optional<Snapshot> read_snapshot(std::string_view session_id) const = 0;
};

/// Directory layout: <root>/events/<session>.jsonl and <root>/snapshots/<session>.json.
class FileEventStore : public EventStore {
 public:
  /// With `sync` set every append is fsync'd before returning.
  explicit FileEventStore(std::filesystem::path root, bool sync = true);

  void append(std::string_view session_id, std::span<const EventRecord> batch) override;
  DecodedStream read(std::string_view session_id) const override;
  void discard_tail(std::string_view session_id) override;
  bool exists(std::string_view session_id) const override;
  std::vector<std::string> session_ids() const override;
  void write_snapshot(std::string_view session_id, const Snapshot& snapshot) override;
  std::optional<Snapshot> read_snapshot(std::string_view session_id) const override;

  std::filesystem::path event_path(std::string_view session_id) const;
  std::filesystem::path snapshot_path(std::string_view session_id) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::string read_content(std::string_view session_id) const;

  std::filesystem::path root_;
  bool sync_;
};

/// Same stream encoding held in memory. Raw content is exposed so tests can
/// inject torn writes and corruption.
class MemoryEventStore : public EventStore {
 public:
  void append(std::string_view session_id, std::span<const EventRecord> batch) override;
  DecodedStream read(std::string_view session_id) const override;
  void discard_tail(std::string_view session_id) override;
  bool exists(std::string_view session_id) const override;
  std::vector<std::string> session_ids() const override;
  void write_snapshot(std::string_view session_id, const Snapshot& snapshot) override;
  std::optional<Snapshot> read_snapshot(std::string_view session_id) const override;

  std::string raw(std::string_view session_id) const;
  void set_raw(std::string_view session_id, std::string content);

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string, std::less<>> streams_;
  std::map<std::string, Snapshot, std::less<>> snapshots_;
};

}  // namespace genquest::persistence
