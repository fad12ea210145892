#include "genquest/text.hpp"

#include <algorithm>
#include <cctype>

namespace genquest::text {

namespace {

bool is_continuation(unsigned char c) { return (c & 0xC0) == 0x80; }

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string_view trim(std::string_view s) {
  while (!s.empty() && is_space(s.front())) {
    s.remove_prefix(1);
  }
  while (!s.empty() && is_space(s.back())) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string> split(std::string_view s, char delimiter) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(delimiter, start);
    if (pos == std::string_view::npos) {
      parts.emplace_back(s.substr(start));
      break;
    }
    parts.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) {
      out += separator;
    }
    out += parts[i];
  }
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool contains(std::string_view haystack, std::string_view needle) {
  return haystack.find(needle) != std::string_view::npos;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(
      std::count_if(s.begin(), s.end(), [](char c) { return !is_continuation(static_cast<unsigned char>(c)); }));
}

std::size_t utf8_prefix_bytes(std::string_view s, std::size_t max_code_points) {
  std::size_t count = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!is_continuation(static_cast<unsigned char>(s[i]))) {
      if (count == max_code_points) {
        return i;
      }
      ++count;
    }
  }
  return s.size();
}

bool is_utf8_boundary(std::string_view s, std::size_t offset) {
  if (offset == 0 || offset >= s.size()) {
    return offset <= s.size();
  }
  return !is_continuation(static_cast<unsigned char>(s[offset]));
}

std::string truncate_at_sentence(std::string_view s, std::size_t max_code_points) {
  const std::size_t limit = utf8_prefix_bytes(s, max_code_points);
  if (limit >= s.size()) {
    return std::string(s);
  }
  const std::string_view head = s.substr(0, limit);
  for (std::size_t i = head.size(); i > 0; --i) {
    const char c = head[i - 1];
    if (c == '.' || c == '!' || c == '?') {
      const std::string_view candidate = trim(head.substr(0, i));
      if (!candidate.empty()) {
        return std::string(candidate);
      }
    }
  }
  const std::size_t space = head.find_last_of(" \t\n");
  if (space != std::string_view::npos && space > 0) {
    const std::string_view candidate = trim(head.substr(0, space));
    if (!candidate.empty()) {
      return std::string(candidate);
    }
  }
  return std::string(head);
}

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed) {
  std::uint64_t hash = seed;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

}  // namespace genquest::text
