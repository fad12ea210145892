#include "genquest/persistence/event.hpp"

#include <array>
#include <utility>

#include "genquest/cefr.hpp"
#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"

namespace genquest::persistence {

using nlohmann::json;

namespace {

enum class FieldType { string, nullable_string, unsigned_integer, array, object, level, timestamp };

struct FieldSpec {
  const char* name;
  FieldType type;
};

// Mirrors schemas/events.v1.json.
std::vector<FieldSpec> schema_for(EventKind kind) {
  switch (kind) {
    case EventKind::session_created:
      return {{"session_id", FieldType::string},
              {"genre", FieldType::string},
              {"premise", FieldType::nullable_string},
              {"learner", FieldType::nullable_string},
              {"config", FieldType::object},
              {"created_at", FieldType::timestamp}};
    case EventKind::samples_generated:
      return {{"samples", FieldType::array}};
    case EventKind::level_selected:
      return {{"level", FieldType::level}};
    case EventKind::outline_generated:
      return {{"milestones", FieldType::array}, {"decision_slots", FieldType::array}, {"endings", FieldType::array}};
    case EventKind::segment_generated:
      return {{"segment_id", FieldType::string},
              {"milestone_index", FieldType::unsigned_integer},
              {"decision_index", FieldType::unsigned_integer},
              {"text", FieldType::string},
              {"options", FieldType::array}};
    case EventKind::choice_applied:
      return {{"segment_id", FieldType::string},
              {"option_index", FieldType::unsigned_integer},
              {"request_token", FieldType::nullable_string}};
    case EventKind::summary_appended:
      return {{"summary", FieldType::string}};
    case EventKind::ending_generated:
      return {{"segment_id", FieldType::string}, {"text", FieldType::string}};
    case EventKind::query_explained:
      return {{"query_id", FieldType::string},
              {"session_id", FieldType::string},
              {"segment_id", FieldType::string},
              {"selected_string", FieldType::string},
              {"selection_start", FieldType::unsigned_integer},
              {"selection_end", FieldType::unsigned_integer},
              {"context_window", FieldType::string},
              {"level", FieldType::level},
              {"explanation", FieldType::string},
              {"created_at", FieldType::timestamp}};
  }
  return {};
}

bool matches(const json& value, FieldType type) {
  switch (type) {
    case FieldType::string:
      return value.is_string();
    case FieldType::nullable_string:
      return value.is_null() || value.is_string();
    case FieldType::unsigned_integer:
      return value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
    case FieldType::array:
      return value.is_array();
    case FieldType::object:
      return value.is_object();
    case FieldType::level:
      return value.is_string() && try_parse_cefr(value.get<std::string>()).has_value();
    case FieldType::timestamp:
      return value.is_string() && parse_iso8601(value.get<std::string>()).has_value();
  }
  return false;
}

bool all_strings(const json& array) {
  for (const auto& v : array) {
    if (!v.is_string()) {
      return false;
    }
  }
  return true;
}

void reject(EventKind kind, const std::string& message) {
  throw Error(ErrorCode::validation, std::string(to_string(kind)) + " payload: " + message,
              {{"kind", std::string(to_string(kind))}});
}

}  // namespace

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::session_created:
      return "session_created";
    case EventKind::samples_generated:
      return "samples_generated";
    case EventKind::level_selected:
      return "level_selected";
    case EventKind::outline_generated:
      return "outline_generated";
    case EventKind::segment_generated:
      return "segment_generated";
    case EventKind::choice_applied:
      return "choice_applied";
    case EventKind::summary_appended:
      return "summary_appended";
    case EventKind::ending_generated:
      return "ending_generated";
    case EventKind::query_explained:
      return "query_explained";
  }
  return "?";
}

std::optional<EventKind> parse_event_kind(std::string_view text) {
  for (int i = 0; i <= static_cast<int>(EventKind::query_explained); ++i) {
    auto kind = static_cast<EventKind>(i);
    if (to_string(kind) == text) {
      return kind;
    }
  }
  return std::nullopt;
}

void validate_payload(EventKind kind, const json& payload) {
  if (!payload.is_object()) {
    reject(kind, "must be an object");
  }
  for (const auto& field : schema_for(kind)) {
    if (!payload.contains(field.name)) {
      reject(kind, std::string("missing field '") + field.name + "'");
    }
    if (!matches(payload.at(field.name), field.type)) {
      reject(kind, std::string("field '") + field.name + "' has the wrong type");
    }
  }
  // Element-level checks the flat table cannot express.
  switch (kind) {
    case EventKind::samples_generated:
      for (const auto& s : payload.at("samples")) {
        if (!s.is_object() || !s.contains("level") || !matches(s.at("level"), FieldType::level) ||
            !s.contains("text") || !s.at("text").is_string()) {
          reject(kind, "each sample needs a CEFR level and text");
        }
      }
      break;
    case EventKind::outline_generated:
      if (!all_strings(payload.at("milestones")) || !all_strings(payload.at("endings"))) {
        reject(kind, "milestones and endings must be strings");
      }
      for (const auto& slots : payload.at("decision_slots")) {
        if (!slots.is_array() || !all_strings(slots)) {
          reject(kind, "decision_slots must be a list of string lists");
        }
      }
      break;
    case EventKind::segment_generated:
      if (!all_strings(payload.at("options"))) {
        reject(kind, "options must be strings");
      }
      break;
    case EventKind::session_created:
      try {
        payload.at("config").get<GameConfig>();
      } catch (const json::exception&) {
        reject(kind, "config fields must be non-negative integers");
      }
      break;
    default:
      break;
  }
}

json to_json(const EventRecord& r) {
  return json{{"schema_version", r.schema_version},
              {"session_id", r.session_id},
              {"sequence", r.sequence},
              {"kind", std::string(to_string(r.kind))},
              {"timestamp", format_iso8601(r.timestamp)},
              {"committed", r.committed},
              {"payload", r.payload}};
}

EventRecord event_from_json(const json& j) {
  try {
    EventRecord r;
    r.schema_version = j.at("schema_version").get<int>();
    if (r.schema_version != kSchemaVersion) {
      throw Error(ErrorCode::integrity, "unsupported event schema_version " + std::to_string(r.schema_version));
    }
    r.session_id = j.at("session_id").get<std::string>();
    r.sequence = j.at("sequence").get<std::uint64_t>();
    auto kind = parse_event_kind(j.at("kind").get<std::string>());
    if (!kind) {
      throw Error(ErrorCode::integrity, "unknown event kind '" + j.at("kind").get<std::string>() + "'");
    }
    r.kind = *kind;
    auto ts = parse_iso8601(j.at("timestamp").get<std::string>());
    if (!ts) {
      throw Error(ErrorCode::integrity, "malformed event timestamp");
    }
    r.timestamp = *ts;
    r.committed = j.value("committed", true);
    r.payload = j.at("payload");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::integrity, std::string("malformed event: ") + e.what());
  }
}

std::string serialize_line(const EventRecord& record) { return to_json(record).dump(); }

}  // namespace genquest::persistence
