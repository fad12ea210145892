#pragma once

#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace genquest::study {

inline constexpr std::size_t kVocabItemCount = 20;

enum class Judgment { correct, partial, incorrect };

std::string_view to_string(Judgment j);
std::optional<Judgment> parse_judgment(std::string_view text);

/// 1 for a correct meaning, 0.5 for a partial one, 0 for an incorrect meaning
/// or when the participant answered "no". A "yes" needs a judgment.
double score_item(bool claimed_known, std::optional<Judgment> judgment);

/// One row of a rater file: the participant's answer plus this rater's call.
struct RatedResponse {
  std::string participant_id;
  std::string item;
  bool claimed_known = false;
  std::string typed_meaning;
  std::optional<Judgment> judgment;

  double score() const { return score_item(claimed_known, judgment); }

  bool operator==(const RatedResponse&) const = default;
};

// Rater file: TSV with header
//   participant_id  item  claimed_known(yes|no)  typed_meaning  judgment(correct|partial|incorrect|empty)
std::vector<RatedResponse> read_rater_file(std::istream& in);
void write_rater_file(std::ostream& out, const std::vector<RatedResponse>& rows);

using ItemKey = std::pair<std::string, std::string>;  // participant, item

struct Disagreement {
  std::string participant_id;
  std::string item;
  bool claimed_known = false;
  std::string typed_meaning;
  double score_a = 0;
  double score_b = 0;
};

struct MergeResult {
  std::map<ItemKey, double> resolved;
  std::vector<Disagreement> disagreements;  // not covered by the consensus file
};

/// Merges two raters. Equal scores resolve directly; differing ones take the
/// `consensus` value when present, otherwise they are reported for discussion.
/// Both files must cover the same (participant, item) pairs with the same answers.
MergeResult merge_raters(const std::vector<RatedResponse>& a, const std::vector<RatedResponse>& b,
                         const std::map<ItemKey, double>& consensus = {});

// Consensus worksheet: the disagreements plus an empty `resolved` column for
// the raters to fill in with 0, 0.5 or 1. The filled-in sheet is read back as
// the consensus file.
void write_consensus_worksheet(std::ostream& out, const std::vector<Disagreement>& rows);
std::map<ItemKey, double> read_consensus(std::istream& in);

struct VocabTest {
  std::string participant_id;
  std::vector<std::string> items;  // exactly kVocabItemCount, in file order
  std::vector<double> scores;

  double total() const;
};

/// Groups resolved scores per participant; each must have exactly 20 items.
std::vector<VocabTest> build_tests(const std::map<ItemKey, double>& resolved,
                                   const std::vector<RatedResponse>& order);

}  // namespace genquest::study
