#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genquest::language {

/// Byte ranges [begin, end) of the sentences in `text`, covering it end to end.
/// A sentence ends after . ! ? or an ellipsis (plus closing quotes or
/// brackets) followed by whitespace, or at a blank line.
std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text);

struct ContextWindow {
  std::string text;
  std::size_t selection_offset = 0;  // byte offset of the selection inside `text`
};

/// The sentence(s) holding bytes [start, end) of `text` plus one neighbour on
/// each side, at most `max_code_points` long unless the selection alone is
/// longer. Neighbours are dropped first, then the text around the selection is
/// cut evenly. Offsets must be valid UTF-8 boundaries with start < end.
ContextWindow context_window(std::string_view text, std::size_t start, std::size_t end,
                             std::size_t max_code_points = 500);

}  // namespace genquest::language
