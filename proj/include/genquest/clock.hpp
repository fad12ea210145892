#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <string_view>

namespace genquest {

/// Millisecond-resolution UTC instant; ISO-8601 text round-trips exactly.
using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;
using Clock = std::function<Timestamp()>;

Timestamp system_now();

/// Deterministic clock for tests: starts at `start` and advances by `step` per call.
Clock stepping_clock(Timestamp start, std::chrono::milliseconds step = std::chrono::seconds(1));

/// "2026-10-15T08:30:00.123Z"
std::string format_iso8601(Timestamp t);
std::optional<Timestamp> parse_iso8601(std::string_view text);

/// Thread-safe generator of opaque identifiers. Seeded generators give
/// reproducible id sequences.
class IdGenerator {
 public:
  IdGenerator();
  explicit IdGenerator(std::uint64_t seed);

  std::string next(std::string_view prefix);

 private:
  std::mutex mutex_;
  std::mt19937_64 engine_;
};

}  // namespace genquest
