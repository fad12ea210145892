#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/domain.hpp"

namespace genquest::story {

/// Provider text that does not follow the requested line format.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Providers are asked for one fenced block of labelled lines, e.g.
//
//     ```outline
//     MILESTONE 1: ...
//     DECISION 1.1: ...
//     ENDING 1: ...
//     ```
//
// Parsers take the first fenced block (or the whole reply when there is
// none); unlabelled lines continue the previous field.

/// Returns the body of the first ``` fence, or the whole text.
std::string_view fenced_body(std::string_view reply);

StoryOutline parse_outline(std::string_view reply, const GameConfig& config);

struct ParsedSegment {
  std::string text;
  std::vector<std::string> options;
};

/// `TEXT:` plus exactly `option_count` `OPTION n:` lines.
ParsedSegment parse_segment(std::string_view reply, std::size_t option_count);

/// `TEXT:` block, or the whole fenced body when unlabelled.
std::string parse_ending(std::string_view reply);

/// One `<LEVEL>: text` line per CEFR level, each level exactly once.
std::vector<ProficiencySample> parse_samples(std::string_view reply);

/// Inverse of parse_outline, for prompt context.
std::string render_outline(const StoryOutline& outline);

}  // namespace genquest::story
