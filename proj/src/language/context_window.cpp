#include "genquest/language/context_window.hpp"

#include <algorithm>

#include "genquest/error.hpp"
#include "genquest/text.hpp"

namespace genquest::language {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

bool starts_with_at(std::string_view s, std::size_t i, std::string_view token) {
  return s.substr(i, token.size()) == token;
}

// Length in bytes of a sentence terminator at i, or 0.
std::size_t terminator_at(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c == '.' || c == '!' || c == '?') {
    return 1;
  }
  if (starts_with_at(s, i, "\xE2\x80\xA6")) {  // ellipsis
    return 3;
  }
  return 0;
}

std::size_t closer_at(std::string_view s, std::size_t i) {
  const char c = s[i];
  if (c == '"' || c == '\'' || c == ')' || c == ']') {
    return 1;
  }
  for (std::string_view closer : {"\xE2\x80\x9D", "\xE2\x80\x99", "\xC2\xBB"}) {
    if (starts_with_at(s, i, closer)) {
      return closer.size();
    }
  }
  return 0;
}

std::size_t suffix_bytes(std::string_view s, std::size_t max_code_points) {
  std::size_t pos = s.size();
  for (std::size_t n = 0; n < max_code_points && pos > 0; ++n) {
    --pos;
    while (pos > 0 && (static_cast<unsigned char>(s[pos]) & 0xC0) == 0x80) {
      --pos;
    }
  }
  return s.size() - pos;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> sentence_spans(std::string_view text) {
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t begin = 0;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t j = i;
    bool boundary = false;
    if (std::size_t t = terminator_at(text, j); t > 0) {
      while (j < text.size() && (t = terminator_at(text, j)) > 0) {
        j += t;
      }
      while (j < text.size() && (t = closer_at(text, j)) > 0) {
        j += t;
      }
      boundary = j == text.size() || is_space(text[j]);
    } else if (text[j] == '\n') {
      std::size_t k = j + 1;
      while (k < text.size() && (text[k] == ' ' || text[k] == '\t' || text[k] == '\r')) {
        ++k;
      }
      boundary = k < text.size() && text[k] == '\n';
    }
    if (!boundary) {
      i = std::max(j, i + 1);
      continue;
    }
    while (j < text.size() && is_space(text[j])) {
      ++j;
    }
    spans.emplace_back(begin, j);
    begin = j;
    i = j;
  }
  if (begin < text.size() || spans.empty()) {
    spans.emplace_back(begin, text.size());
  }
  return spans;
}

ContextWindow context_window(std::string_view text, std::size_t start, std::size_t end, std::size_t max_code_points) {
  if (start >= end || end > text.size() || !text::is_utf8_boundary(text, start) ||
      !text::is_utf8_boundary(text, end)) {
    throw Error(ErrorCode::validation, "selection offsets do not describe a span of the text",
                {{"selection_start", start}, {"selection_end", end}});
  }
  const auto spans = sentence_spans(text);
  auto span_of = [&](std::size_t byte) {
    for (std::size_t k = 0; k < spans.size(); ++k) {
      if (byte < spans[k].second) {
        return k;
      }
    }
    return spans.size() - 1;
  };
  const std::size_t first = span_of(start);
  const std::size_t last = span_of(end - 1);
  const std::size_t cap = std::max(max_code_points, text::utf8_length(text.substr(start, end - start)));

  auto window = [&](std::size_t lo, std::size_t hi) {
    std::size_t ws = spans[lo].first;
    std::size_t we = spans[hi].second;
    while (ws < start && is_space(text[ws])) {
      ++ws;
    }
    while (we > end && is_space(text[we - 1])) {
      --we;
    }
    return std::pair{ws, we};
  };

  const std::size_t before = first > 0 ? first - 1 : first;
  const std::size_t after = last + 1 < spans.size() ? last + 1 : last;
  const std::pair<std::size_t, std::size_t> candidates[] = {
      {before, after}, {first, after}, {before, last}, {first, last}};
  for (const auto& [lo, hi] : candidates) {
    const auto [ws, we] = window(lo, hi);
    if (text::utf8_length(text.substr(ws, we - ws)) <= cap) {
      return {std::string(text.substr(ws, we - ws)), start - ws};
    }
  }

  // Even the selected sentences are too long: keep an even margin around the selection.
  const auto [ws, we] = window(first, last);
  const std::string_view left = text.substr(ws, start - ws);
  const std::string_view right = text.substr(end, we - end);
  const std::size_t budget = cap - text::utf8_length(text.substr(start, end - start));
  const std::size_t left_cp = text::utf8_length(left);
  const std::size_t right_cp = text::utf8_length(right);
  std::size_t take_left = std::min(left_cp, budget / 2);
  const std::size_t take_right = std::min(right_cp, budget - take_left);
  take_left = std::min(left_cp, budget - take_right);

  const std::size_t left_bytes = suffix_bytes(left, take_left);
  const std::size_t right_bytes = text::utf8_prefix_bytes(right, take_right);
  const std::size_t from = start - left_bytes;
  return {std::string(text.substr(from, end + right_bytes - from)), left_bytes};
}

}  // namespace genquest::language
