#pragma once

#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace genquest::tsv {

/// Backslash-escapes tab, newline, carriage return and backslash so any text
/// fits in one cell.
std::string escape(std::string_view cell);
std::string unescape(std::string_view cell);

void write_row(std::ostream& out, const std::vector<std::string>& cells);

/// Reads all non-empty lines, unescaping each cell. Lines starting with '#' are skipped.
std::vector<std::vector<std::string>> read_rows(std::istream& in);

}  // namespace genquest::tsv
