#include "genquest/language/query_log.hpp"

#include <charconv>
#include <map>
#include <string>

#include "genquest/cefr.hpp"
#include "genquest/clock.hpp"
#include "genquest/error.hpp"
#include "genquest/tsv.hpp"

namespace genquest::language {

namespace {

[[noreturn]] void bad_row(std::size_t line, const std::string& message) {
  throw Error(ErrorCode::validation, "query log line " + std::to_string(line) + ": " + message, {{"line", line}});
}

std::size_t parse_offset(const std::string& cell, std::size_t line, std::string_view column) {
  std::size_t value = 0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) {
    bad_row(line, std::string(column) + " is not a non-negative integer: '" + cell + "'");
  }
  return value;
}

}  // namespace

void write_query_log(std::ostream& out, const std::vector<QueryRecord>& records) {
  tsv::write_row(out, std::vector<std::string>(kQueryLogColumns.begin(), kQueryLogColumns.end()));
  for (const auto& r : records) {
    tsv::write_row(out, {r.query_id, r.session_id, r.segment_id, r.selected_string, std::to_string(r.selection_start),
                         std::to_string(r.selection_end), r.context_window, std::string(to_string(r.level)),
                         r.explanation, format_iso8601(r.created_at)});
  }
}

std::vector<QueryRecord> read_query_log(std::istream& in) {
  const auto rows = tsv::read_rows(in);
  if (rows.empty()) {
    throw Error(ErrorCode::validation, "query log is empty (a header row is required)");
  }
  std::map<std::string_view, std::size_t> column;
  for (std::size_t c = 0; c < rows[0].size(); ++c) {
    column[rows[0][c]] = c;
  }
  for (auto name : kQueryLogColumns) {
    if (!column.contains(name)) {
      throw Error(ErrorCode::validation, "query log header lacks column '" + std::string(name) + "'",
                  {{"column", std::string(name)}});
    }
  }

  std::vector<QueryRecord> records;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t line = i + 1;
    if (row.size() != rows[0].size()) {
      bad_row(line, "expected " + std::to_string(rows[0].size()) + " cells, got " + std::to_string(row.size()));
    }
    auto cell = [&](std::string_view name) -> const std::string& { return row[column.at(name)]; };
    QueryRecord r;
    r.query_id = cell("query_id");
    r.session_id = cell("session_id");
    r.segment_id = cell("segment_id");
    r.selected_string = cell("selected_string");
    r.selection_start = parse_offset(cell("selection_start"), line, "selection_start");
    r.selection_end = parse_offset(cell("selection_end"), line, "selection_end");
    r.context_window = cell("context_window");
    const auto level = try_parse_cefr(cell("level"));
    if (!level) {
      bad_row(line, "unknown CEFR level '" + cell("level") + "'");
    }
    r.level = *level;
    r.explanation = cell("explanation");
    const auto created = parse_iso8601(cell("created_at"));
    if (!created) {
      bad_row(line, "created_at is not an ISO-8601 UTC timestamp: '" + cell("created_at") + "'");
    }
    r.created_at = *created;
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace genquest::language
