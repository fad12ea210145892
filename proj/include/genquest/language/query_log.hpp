#pragma once

#include <array>
#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "genquest/domain.hpp"

namespace genquest::language {

// Query log export: UTF-8, tab-separated, one record per line after a header
// row. Cells are escaped with genquest::tsv; timestamps are ISO-8601 UTC with
// milliseconds, so a write/read round trip reproduces every field.

inline constexpr std::array<std::string_view, 10> kQueryLogColumns = {
    "query_id",       "session_id",     "segment_id", "selected_string", "selection_start",
    "selection_end",  "context_window", "level",      "explanation",     "created_at"};

void write_query_log(std::ostream& out, const std::vector<QueryRecord>& records);

/// Columns are matched by header name, so their order may differ. Throws
/// Error(validation) naming the line of the first bad row.
std::vector<QueryRecord> read_query_log(std::istream& in);

}  // namespace genquest::language
