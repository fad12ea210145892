#pragma once

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/error.hpp"
#include "genquest/tsv.hpp"

namespace genquest::study::detail {

/// A TSV file with a header row, cells addressed by column name.
class Table {
 public:
  Table(std::istream& in, std::string_view what, const std::vector<std::string>& required) : what_(what) {
    rows_ = tsv::read_rows(in);
    if (rows_.empty()) {
      throw Error(ErrorCode::validation, std::string(what) + " is empty (a header row is required)");
    }
    for (std::size_t c = 0; c < rows_[0].size(); ++c) {
      columns_[rows_[0][c]] = c;
    }
    for (const auto& name : required) {
      if (!columns_.contains(name)) {
        throw Error(ErrorCode::validation, std::string(what) + " header lacks column '" + name + "'",
                    {{"column", name}});
      }
    }
    for (std::size_t r = 1; r < rows_.size(); ++r) {
      if (rows_[r].size() != rows_[0].size()) {
        fail(r, "expected " + std::to_string(rows_[0].size()) + " cells, got " + std::to_string(rows_[r].size()));
      }
    }
  }

  std::size_t size() const { return rows_.size() - 1; }
  bool has(std::string_view column) const { return columns_.contains(std::string(column)); }

  /// Row `r` counts from 1 (the first data row).
  const std::string& at(std::size_t r, std::string_view column) const {
    return rows_.at(r).at(columns_.at(std::string(column)));
  }

  [[noreturn]] void fail(std::size_t r, const std::string& message) const {
    throw Error(ErrorCode::validation, what_ + " line " + std::to_string(r + 1) + ": " + message,
                {{"line", r + 1}});
  }

 private:
  std::string what_;
  std::vector<std::vector<std::string>> rows_;
  std::map<std::string, std::size_t> columns_;
};

}  // namespace genquest::study::detail
