#include "genquest/study/statistics.hpp"

#include <cmath>
#include <string>

#include "genquest/error.hpp"

namespace genquest::study {

namespace {

[[noreturn]] void undefined(const std::string& reason, const std::string& message) {
  throw Error(ErrorCode::validation, message, {{"reason", reason}});
}

}  // namespace

double mean(std::span<const double> values) {
  if (values.empty()) {
    undefined("mean_undefined", "mean of an empty sample is undefined");
  }
  double sum = 0;
  for (double v : values) {
    sum += v;
  }
  return sum / static_cast<double>(values.size());
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) {
    undefined("sd_undefined", "standard deviation needs at least 2 values, got " + std::to_string(values.size()));
  }
  const double m = mean(values);
  double ss = 0;
  for (double v : values) {
    ss += (v - m) * (v - m);
  }
  return ss / static_cast<double>(values.size() - 1);
}

Descriptive descriptive_stats(std::span<const double> values) {
  return {values.size(), mean(values), std::sqrt(sample_variance(values))};
}

double cronbach_alpha(const Matrix& rows) {
  if (rows.size() < 2) {
    undefined("too_few_participants", "Cronbach's alpha needs at least 2 participants");
  }
  const std::size_t k = rows.front().size();
  if (k < 2) {
    undefined("too_few_items", "Cronbach's alpha needs at least 2 items");
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != k) {
      throw Error(ErrorCode::validation, "row " + std::to_string(r + 1) + " has " + std::to_string(rows[r].size()) +
                                             " items, expected " + std::to_string(k),
                  {{"reason", "ragged_matrix"}, {"row", r + 1}});
    }
  }
  double item_variance_sum = 0;
  std::vector<double> column(rows.size());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) {
      column[r] = rows[r][c];
    }
    item_variance_sum += sample_variance(column);
  }
  std::vector<double> totals(rows.size(), 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (double v : rows[r]) {
      totals[r] += v;
    }
  }
  const double total_variance = sample_variance(totals);
  if (total_variance == 0) {
    undefined("alpha_undefined", "Cronbach's alpha is undefined when total scores do not vary");
  }
  const double kd = static_cast<double>(k);
  return kd / (kd - 1) * (1 - item_variance_sum / total_variance);
}

}  // namespace genquest::study
