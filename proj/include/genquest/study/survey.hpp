#pragma once

#include <array>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/study/statistics.hpp"

namespace genquest::study {

inline constexpr std::size_t kSurveyItemCount = 12;

/// Item labels in column order: PU1..PU6 (perceived usefulness), then
/// PEOU1..PEOU6 (perceived ease of use).
const std::array<std::string, kSurveyItemCount>& survey_item_labels();

struct LikertResponse {
  std::string participant_id;
  std::array<int, kSurveyItemCount> ratings{};  // each 1..7
};

/// TSV with header participant_id, PU1..PU6, PEOU1..PEOU6 (any column order).
/// A missing or out-of-range rating is a validation error naming the cell.
std::vector<LikertResponse> read_survey(std::istream& in);
void write_survey(std::ostream& out, const std::vector<LikertResponse>& responses);

struct ItemStats {
  std::string label;
  Descriptive stats;
};

struct ConstructStats {
  std::string name;                 // PU or PEOU
  Descriptive stats;                // over per-participant averages of the construct's items
  std::optional<double> alpha;      // empty when undefined (no variance in totals)
};

struct SurveySummary {
  std::vector<ItemStats> items;
  std::vector<ConstructStats> constructs;
};

/// Needs at least 2 participants.
SurveySummary construct_summary(const std::vector<LikertResponse>& responses);

void write_summary(std::ostream& out, const SurveySummary& summary);

}  // namespace genquest::study
