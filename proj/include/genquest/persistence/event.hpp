#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "genquest/clock.hpp"

namespace genquest::persistence {

inline constexpr int kSchemaVersion = 1;

enum class EventKind {
  session_created,
  samples_generated,
  level_selected,
  outline_generated,
  segment_generated,
  choice_applied,
  summary_appended,
  ending_generated,
  query_explained,
};

std::string_view to_string(EventKind kind);
std::optional<EventKind> parse_event_kind(std::string_view text);

/// Immutable, ordered fact about one session. `committed` is false only for
/// the leading events of a multi-event batch; a stream whose tail is
/// uncommitted was interrupted mid-batch and the tail is discarded on load.
struct EventRecord {
  std::string session_id;
  std::uint64_t sequence = 0;
  EventKind kind = EventKind::session_created;
  nlohmann::json payload;
  Timestamp timestamp{};
  int schema_version = kSchemaVersion;
  bool committed = true;

  bool operator==(const EventRecord&) const = default;
};

/// Throws Error(validation) when `payload` does not match the schema for `kind`.
void validate_payload(EventKind kind, const nlohmann::json& payload);

nlohmann::json to_json(const EventRecord& record);

/// Throws Error(integrity) on malformed input.
EventRecord event_from_json(const nlohmann::json& j);

/// Compact single-line JSON, the on-disk form.
std::string serialize_line(const EventRecord& record);

}  // namespace genquest::persistence
