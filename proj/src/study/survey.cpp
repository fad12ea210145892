#include "genquest/study/survey.hpp"

#include <cstdio>
#include <set>

#include "genquest/error.hpp"
#include "genquest/text.hpp"
#include "genquest/tsv.hpp"
#include "table.hpp"

namespace genquest::study {

namespace {

struct Construct {
  const char* name;
  std::size_t first;
  std::size_t count;
};

constexpr Construct kConstructs[] = {{"PU", 0, 6}, {"PEOU", 6, 6}};

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

}  // namespace

const std::array<std::string, kSurveyItemCount>& survey_item_labels() {
  static const std::array<std::string, kSurveyItemCount> labels = {
      "PU1", "PU2", "PU3", "PU4", "PU5", "PU6", "PEOU1", "PEOU2", "PEOU3", "PEOU4", "PEOU5", "PEOU6"};
  return labels;
}

std::vector<LikertResponse> read_survey(std::istream& in) {
  std::vector<std::string> required{"participant_id"};
  for (const auto& label : survey_item_labels()) {
    required.push_back(label);
  }
  const detail::Table table(in, "survey file", required);
  std::vector<LikertResponse> out;
  std::set<std::string> seen;
  for (std::size_t r = 1; r <= table.size(); ++r) {
    LikertResponse response;
    response.participant_id = table.at(r, "participant_id");
    if (!seen.insert(response.participant_id).second) {
      table.fail(r, "duplicate participant " + response.participant_id);
    }
    for (std::size_t i = 0; i < kSurveyItemCount; ++i) {
      const auto& label = survey_item_labels()[i];
      const auto cell = text::trim(table.at(r, label));
      if (cell.empty()) {
        table.fail(r, "participant " + response.participant_id + " is missing item " + label);
      }
      if (cell.size() != 1 || cell[0] < '1' || cell[0] > '7') {
        table.fail(r, label + " must be an integer from 1 to 7, got '" + std::string(cell) + "'");
      }
      response.ratings[i] = cell[0] - '0';
    }
    out.push_back(response);
  }
  return out;
}

void write_survey(std::ostream& out, const std::vector<LikertResponse>& responses) {
  std::vector<std::string> header{"participant_id"};
  header.insert(header.end(), survey_item_labels().begin(), survey_item_labels().end());
  tsv::write_row(out, header);
  for (const auto& r : responses) {
    std::vector<std::string> row{r.participant_id};
    for (int v : r.ratings) {
      row.push_back(std::to_string(v));
    }
    tsv::write_row(out, row);
  }
}

SurveySummary construct_summary(const std::vector<LikertResponse>& responses) {
  for (const auto& r : responses) {
    for (std::size_t i = 0; i < kSurveyItemCount; ++i) {
      if (r.ratings[i] < 1 || r.ratings[i] > 7) {
        throw Error(ErrorCode::validation,
                    "participant " + r.participant_id + " rating for " + survey_item_labels()[i] + " is outside 1-7",
                    {{"participant_id", r.participant_id}, {"item", survey_item_labels()[i]}});
      }
    }
  }
  SurveySummary summary;
  std::vector<double> column(responses.size());
  for (std::size_t i = 0; i < kSurveyItemCount; ++i) {
    for (std::size_t p = 0; p < responses.size(); ++p) {
      column[p] = responses[p].ratings[i];
    }
    summary.items.push_back({survey_item_labels()[i], descriptive_stats(column)});
  }
  for (const auto& construct : kConstructs) {
    Matrix matrix;
    std::vector<double> averages;
    for (const auto& r : responses) {
      std::vector<double> row(r.ratings.begin() + static_cast<std::ptrdiff_t>(construct.first),
                              r.ratings.begin() + static_cast<std::ptrdiff_t>(construct.first + construct.count));
      averages.push_back(mean(row));
      matrix.push_back(std::move(row));
    }
    ConstructStats stats{construct.name, descriptive_stats(averages), std::nullopt};
    try {
      stats.alpha = cronbach_alpha(matrix);
    } catch (const Error& e) {
      if (e.details().value("reason", "") != "alpha_undefined") {
        throw;
      }
    }
    summary.constructs.push_back(std::move(stats));
  }
  return summary;
}

void write_summary(std::ostream& out, const SurveySummary& summary) {
  tsv::write_row(out, {"scope", "name", "n", "mean", "sd", "alpha"});
  for (const auto& item : summary.items) {
    tsv::write_row(out, {"item", item.label, std::to_string(item.stats.n), fixed(item.stats.mean, 2),
                         fixed(item.stats.sd, 2), ""});
  }
  for (const auto& c : summary.constructs) {
    tsv::write_row(out, {"construct", c.name, std::to_string(c.stats.n), fixed(c.stats.mean, 2), fixed(c.stats.sd, 2),
                         c.alpha ? fixed(*c.alpha, 2) : "undefined"});
  }
}

}  // namespace genquest::study
