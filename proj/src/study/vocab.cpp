#include "genquest/study/vocab.hpp"

#include <set>

#include "genquest/error.hpp"
#include "genquest/text.hpp"
#include "genquest/tsv.hpp"
#include "table.hpp"

namespace genquest::study {

namespace {

std::string score_text(double score) {
  if (score == 0.5) {
    return "0.5";
  }
  return score == 1 ? "1" : "0";
}

std::optional<double> parse_score(std::string_view text) {
  const auto t = text::trim(text);
  if (t == "0") return 0.0;
  if (t == "0.5" || t == ".5") return 0.5;
  if (t == "1") return 1.0;
  return std::nullopt;
}

bool parse_yes_no(const detail::Table& table, std::size_t r) {
  const std::string v = text::to_lower_ascii(text::trim(table.at(r, "claimed_known")));
  if (v == "yes" || v == "y") return true;
  if (v == "no" || v == "n") return false;
  table.fail(r, "claimed_known must be yes or no, got '" + table.at(r, "claimed_known") + "'");
}

}  // namespace

std::string_view to_string(Judgment j) {
  switch (j) {
    case Judgment::correct:
      return "correct";
    case Judgment::partial:
      return "partial";
    case Judgment::incorrect:
      return "incorrect";
  }
  return "?";
}

std::optional<Judgment> parse_judgment(std::string_view text) {
  const std::string t = text::to_lower_ascii(text::trim(text));
  if (t == "correct") return Judgment::correct;
  if (t == "partial") return Judgment::partial;
  if (t == "incorrect") return Judgment::incorrect;
  return std::nullopt;
}

double score_item(bool claimed_known, std::optional<Judgment> judgment) {
  if (!claimed_known) {
    return 0;
  }
  if (!judgment) {
    throw Error(ErrorCode::validation, "a 'yes' answer needs a rater judgment", {{"reason", "missing_judgment"}});
  }
  switch (*judgment) {
    case Judgment::correct:
      return 1;
    case Judgment::partial:
      return 0.5;
    case Judgment::incorrect:
      return 0;
  }
  return 0;
}

std::vector<RatedResponse> read_rater_file(std::istream& in) {
  const detail::Table table(in, "rater file", {"participant_id", "item", "claimed_known", "typed_meaning", "judgment"});
  std::vector<RatedResponse> out;
  std::set<ItemKey> seen;
  for (std::size_t r = 1; r <= table.size(); ++r) {
    RatedResponse row;
    row.participant_id = table.at(r, "participant_id");
    row.item = table.at(r, "item");
    row.claimed_known = parse_yes_no(table, r);
    row.typed_meaning = table.at(r, "typed_meaning");
    const auto& judgment = table.at(r, "judgment");
    if (!text::trim(judgment).empty()) {
      row.judgment = parse_judgment(judgment);
      if (!row.judgment) {
        table.fail(r, "judgment must be correct, partial or incorrect, got '" + judgment + "'");
      }
    }
    if (row.claimed_known && !row.judgment) {
      table.fail(r, "a 'yes' answer needs a judgment");
    }
    if (!seen.insert({row.participant_id, row.item}).second) {
      table.fail(r, "duplicate row for participant " + row.participant_id + ", item " + row.item);
    }
    out.push_back(std::move(row));
  }
  return out;
}

void write_rater_file(std::ostream& out, const std::vector<RatedResponse>& rows) {
  tsv::write_row(out, {"participant_id", "item", "claimed_known", "typed_meaning", "judgment"});
  for (const auto& r : rows) {
    tsv::write_row(out, {r.participant_id, r.item, r.claimed_known ? "yes" : "no", r.typed_meaning,
                         r.judgment ? std::string(to_string(*r.judgment)) : ""});
  }
}

MergeResult merge_raters(const std::vector<RatedResponse>& a, const std::vector<RatedResponse>& b,
                         const std::map<ItemKey, double>& consensus) {
  std::map<ItemKey, const RatedResponse*> by_key;
  for (const auto& row : b) {
    by_key[{row.participant_id, row.item}] = &row;
  }
  if (by_key.size() != a.size() || b.size() != a.size()) {
    throw Error(ErrorCode::validation, "rater files cover different numbers of responses",
                {{"rater_a", a.size()}, {"rater_b", b.size()}});
  }
  MergeResult result;
  for (const auto& row : a) {
    const ItemKey key{row.participant_id, row.item};
    auto it = by_key.find(key);
    if (it == by_key.end()) {
      throw Error(ErrorCode::validation,
                  "rater b has no row for participant " + row.participant_id + ", item " + row.item,
                  {{"participant_id", row.participant_id}, {"item", row.item}});
    }
    const RatedResponse& other = *it->second;
    if (other.claimed_known != row.claimed_known || other.typed_meaning != row.typed_meaning) {
      throw Error(ErrorCode::validation,
                  "raters disagree on the participant's own answer for " + row.participant_id + ", item " + row.item,
                  {{"participant_id", row.participant_id}, {"item", row.item}});
    }
    const double sa = row.score();
    const double sb = other.score();
    if (sa == sb) {
      result.resolved[key] = sa;
    } else if (auto c = consensus.find(key); c != consensus.end()) {
      result.resolved[key] = c->second;
    } else {
      result.disagreements.push_back({row.participant_id, row.item, row.claimed_known, row.typed_meaning, sa, sb});
    }
  }
  return result;
}

void write_consensus_worksheet(std::ostream& out, const std::vector<Disagreement>& rows) {
  tsv::write_row(out, {"participant_id", "item", "claimed_known", "typed_meaning", "score_a", "score_b", "resolved"});
  for (const auto& r : rows) {
    tsv::write_row(out, {r.participant_id, r.item, r.claimed_known ? "yes" : "no", r.typed_meaning,
                         score_text(r.score_a), score_text(r.score_b), ""});
  }
}

std::map<ItemKey, double> read_consensus(std::istream& in) {
  const detail::Table table(in, "consensus file", {"participant_id", "item", "resolved"});
  std::map<ItemKey, double> out;
  for (std::size_t r = 1; r <= table.size(); ++r) {
    const auto& cell = table.at(r, "resolved");
    if (text::trim(cell).empty()) {
      continue;  // still under discussion
    }
    const auto score = parse_score(cell);
    if (!score) {
      table.fail(r, "resolved must be 0, 0.5 or 1, got '" + cell + "'");
    }
    out[{table.at(r, "participant_id"), table.at(r, "item")}] = *score;
  }
  return out;
}

double VocabTest::total() const {
  double sum = 0;
  for (double s : scores) {
    sum += s;
  }
  return sum;
}

std::vector<VocabTest> build_tests(const std::map<ItemKey, double>& resolved,
                                   const std::vector<RatedResponse>& order) {
  std::vector<VocabTest> tests;
  std::map<std::string, std::size_t> index;
  for (const auto& row : order) {
    auto score = resolved.find({row.participant_id, row.item});
    if (score == resolved.end()) {
      throw Error(ErrorCode::validation,
                  "no resolved score for participant " + row.participant_id + ", item " + row.item,
                  {{"reason", "consensus_required"}});
    }
    auto [it, inserted] = index.try_emplace(row.participant_id, tests.size());
    if (inserted) {
      tests.push_back({row.participant_id, {}, {}});
    }
    tests[it->second].items.push_back(row.item);
    tests[it->second].scores.push_back(score->second);
  }
  for (const auto& t : tests) {
    if (t.items.size() != kVocabItemCount) {
      throw Error(ErrorCode::validation,
                  "participant " + t.participant_id + " has " + std::to_string(t.items.size()) + " items, expected " +
                      std::to_string(kVocabItemCount),
                  {{"reason", "item_count"}, {"participant_id", t.participant_id}});
    }
  }
  return tests;
}

}  // namespace genquest::study
