#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/clock.hpp"
#include "genquest/domain.hpp"
#include "genquest/llm/gateway.hpp"
#include "genquest/persistence/session_repository.hpp"

namespace genquest::language {

struct AssistantOptions {
  std::size_t context_cap = 500;  // code points
  std::optional<std::uint64_t> id_seed;
  Clock clock = system_now;
};

struct QueryPage {
  std::vector<QueryRecord> items;       // newest first
  std::optional<std::string> next_cursor;  // query_id to pass as `after` for the next page
  std::size_t total = 0;
};

/// Explains highlighted story text at the learner's level and keeps every
/// lookup in the session's review list.
class LanguageAssistant {
 public:
  LanguageAssistant(persistence::SessionRepository& repository, llm::Gateway& gateway, AssistantOptions options = {});

  /// `selection_start`/`selection_end` are UTF-8 byte offsets into the
  /// segment text and must cover exactly `selected_string`. The record is
  /// durably stored before this returns; on provider failure nothing is stored.
  QueryRecord explain(std::string_view session_id, std::string_view segment_id, std::string_view selected_string,
                      std::size_t selection_start, std::size_t selection_end);

  /// Newest first. Cursor paging stays stable while new queries arrive.
  QueryPage list_queries(std::string_view session_id, std::size_t limit = 20,
                         std::optional<std::string> after = std::nullopt) const;

  /// Oldest first; one session, or every session when `session_id` is empty.
  std::vector<QueryRecord> collect(std::optional<std::string> session_id = std::nullopt) const;
  void export_log(std::ostream& out, std::optional<std::string> session_id = std::nullopt) const;

 private:
  persistence::SessionRepository& repository_;
  llm::Gateway& gateway_;
  AssistantOptions options_;
  IdGenerator ids_;
};

/// Review-list order: created_at descending, later appends first on ties.
std::vector<QueryRecord> newest_first(std::vector<QueryRecord> records);

}  // namespace genquest::language
