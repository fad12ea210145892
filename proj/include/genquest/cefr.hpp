#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace genquest {

enum class CefrLevel { A1, A2, B1, B2, C1, C2 };

inline constexpr std::array<CefrLevel, 6> kAllCefrLevels = {
    CefrLevel::A1, CefrLevel::A2, CefrLevel::B1, CefrLevel::B2, CefrLevel::C1, CefrLevel::C2};

std::string_view to_string(CefrLevel level);

std::optional<CefrLevel> try_parse_cefr(std::string_view text);

/// Throws Error(validation) for anything outside A1..C2.
CefrLevel parse_cefr(std::string_view text);

}  // namespace genquest
