#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genquest::study {

struct Descriptive {
  std::size_t n = 0;
  double mean = 0;
  double sd = 0;  // sample standard deviation (n - 1 denominator)
};

double mean(std::span<const double> values);

/// Sample variance. Throws Error(validation, details.reason = "sd_undefined") for n < 2.
double sample_variance(std::span<const double> values);

Descriptive descriptive_stats(std::span<const double> values);

/// Rows are participants, columns items.
using Matrix = std::vector<std::vector<double>>;

/// k/(k-1) * (1 - sum of item variances / variance of row totals), sample
/// variances throughout. Needs k >= 2 items and n >= 2 rectangular rows;
/// zero total variance throws with details.reason = "alpha_undefined".
double cronbach_alpha(const Matrix& rows);

}  // namespace genquest::study
