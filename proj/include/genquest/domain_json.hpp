#pragma once

#include <nlohmann/json.hpp>

#include "genquest/domain.hpp"

// nlohmann/json ADL hooks for the domain model. Optionals serialize as null,
// timestamps as ISO-8601 UTC strings.
namespace genquest {

void to_json(nlohmann::json& j, const GameConfig& v);
void from_json(const nlohmann::json& j, GameConfig& v);

void to_json(nlohmann::json& j, const StoryOutline& v);
void from_json(const nlohmann::json& j, StoryOutline& v);

void to_json(nlohmann::json& j, const ProgressCursor& v);
void from_json(const nlohmann::json& j, ProgressCursor& v);

void to_json(nlohmann::json& j, const PlotSegment& v);
void from_json(const nlohmann::json& j, PlotSegment& v);

void to_json(nlohmann::json& j, const MemoryState& v);
void from_json(const nlohmann::json& j, MemoryState& v);

void to_json(nlohmann::json& j, const ProficiencySample& v);
void from_json(const nlohmann::json& j, ProficiencySample& v);

void to_json(nlohmann::json& j, const QueryRecord& v);
void from_json(const nlohmann::json& j, QueryRecord& v);

void to_json(nlohmann::json& j, const GameSession& v);
void from_json(const nlohmann::json& j, GameSession& v);

nlohmann::json timestamp_to_json(Timestamp t);
Timestamp timestamp_from_json(const nlohmann::json& j);

}  // namespace genquest
