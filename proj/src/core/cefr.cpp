#include "genquest/cefr.hpp"

#include <string>

#include "genquest/error.hpp"

namespace genquest {

std::string_view to_string(CefrLevel level) {
  switch (level) {
    case CefrLevel::A1:
      return "A1";
    case CefrLevel::A2:
      return "A2";
    case CefrLevel::B1:
      return "B1";
    case CefrLevel::B2:
      return "B2";
    case CefrLevel::C1:
      return "C1";
    case CefrLevel::C2:
      return "C2";
  }
  return "?";
}

std::optional<CefrLevel> try_parse_cefr(std::string_view text) {
  for (CefrLevel level : kAllCefrLevels) {
    if (to_string(level) == text) {
      return level;
    }
  }
  return std::nullopt;
}

CefrLevel parse_cefr(std::string_view text) {
  if (auto level = try_parse_cefr(text)) {
    return *level;
  }
  throw Error(ErrorCode::validation, "unknown CEFR level '" + std::string(text) + "' (expected A1..C2)",
              {{"field", "level"}});
}

}  // namespace genquest
