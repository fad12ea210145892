#pragma once

#include <span>

#include "genquest/domain.hpp"
#include "genquest/persistence/event.hpp"

namespace genquest::persistence {

/// The only code that mutates a GameSession. Live appends and replay both go
/// through here, so a rehydrated session equals the live one by construction.
/// Throws Error(integrity) when the event cannot follow the current state.
void apply_event(GameSession& session, const EventRecord& event);

/// Replays `events` from an empty state. The first event must be session_created.
GameSession rehydrate(std::span<const EventRecord> events);

/// Continues from `base` (a snapshot) with `events`.
GameSession rehydrate_from(GameSession base, std::span<const EventRecord> events);

}  // namespace genquest::persistence
