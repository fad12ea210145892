#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace genquest::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
std::string join(const std::vector<std::string>& parts, std::string_view separator);
std::string to_lower_ascii(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);

/// Number of UTF-8 code points (invalid bytes count as one each).
std::size_t utf8_length(std::string_view s);

/// Byte length of the longest prefix holding at most `max_code_points` code points.
std::size_t utf8_prefix_bytes(std::string_view s, std::size_t max_code_points);

/// True when `offset` does not point into the middle of a multi-byte sequence.
bool is_utf8_boundary(std::string_view s, std::size_t offset);

/// Cuts `s` to at most `max_code_points`, preferring the end of the last full
/// sentence, then the last whitespace, then a hard cut.
std::string truncate_at_sentence(std::string_view s, std::size_t max_code_points);

/// FNV-1a, stable across platforms and process restarts.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);

}  // namespace genquest::text
