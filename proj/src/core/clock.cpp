#include "genquest/clock.hpp"

#include <atomic>
#include <cstdio>
#include <ctime>
#include <memory>

namespace genquest {

Timestamp system_now() {
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::now());
}

Clock stepping_clock(Timestamp start, std::chrono::milliseconds step) {
  auto ticks = std::make_shared<std::atomic<std::int64_t>>(0);
  return [start, step, ticks]() { return start + step * ticks->fetch_add(1); };
}

std::string format_iso8601(Timestamp t) {
  const auto secs = std::chrono::floor<std::chrono::seconds>(t);
  const auto millis = (t - secs).count();
  const std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm utc{};
  gmtime_r(&tt, &utc);
  char buffer[96];
  std::snprintf(buffer, sizeof(buffer), "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", utc.tm_year + 1900,
                utc.tm_mon + 1, utc.tm_mday, utc.tm_hour, utc.tm_min, utc.tm_sec, static_cast<int>(millis));
  return buffer;
}

std::optional<Timestamp> parse_iso8601(std::string_view text) {
  // Accepts YYYY-MM-DDTHH:MM:SS[.mmm]Z
  std::string s(text);
  int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0, millis = 0;
  int consumed = 0;
  if (std::sscanf(s.c_str(), "%4d-%2d-%2dT%2d:%2d:%2d%n", &year, &month, &day, &hour, &minute, &second,
                  &consumed) != 6) {
    return std::nullopt;
  }
  std::string_view rest = std::string_view(s).substr(static_cast<std::size_t>(consumed));
  if (!rest.empty() && rest.front() == '.') {
    rest.remove_prefix(1);
    int digits = 0;
    while (!rest.empty() && rest.front() >= '0' && rest.front() <= '9') {
      if (digits < 3) {
        millis = millis * 10 + (rest.front() - '0');
      }
      ++digits;
      rest.remove_prefix(1);
    }
    if (digits == 0) {
      return std::nullopt;
    }
    for (int d = digits; d < 3; ++d) {
      millis *= 10;
    }
  }
  if (rest != "Z") {
    return std::nullopt;
  }
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) {
    return std::nullopt;
  }
  std::tm utc{};
  utc.tm_year = year - 1900;
  utc.tm_mon = month - 1;
  utc.tm_mday = day;
  utc.tm_hour = hour;
  utc.tm_min = minute;
  utc.tm_sec = second;
  const std::time_t tt = timegm(&utc);
  return std::chrono::floor<std::chrono::milliseconds>(std::chrono::system_clock::from_time_t(tt)) +
         std::chrono::milliseconds(millis);
}

IdGenerator::IdGenerator() : engine_(std::random_device{}()) {}

IdGenerator::IdGenerator(std::uint64_t seed) : engine_(seed) {}

std::string IdGenerator::next(std::string_view prefix) {
  std::uint64_t value = 0;
  {
    std::lock_guard lock(mutex_);
    value = engine_();
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(value));
  std::string id(prefix);
  id += '-';
  id += hex;
  return id;
}

}  // namespace genquest
