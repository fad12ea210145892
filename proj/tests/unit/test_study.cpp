#include <doctest.h>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "genquest/error.hpp"
#include "genquest/study/statistics.hpp"
#include "genquest/study/survey.hpp"
#include "genquest/study/vocab.hpp"
#include "genquest/study/word_selection.hpp"

using namespace genquest;
using namespace genquest::study;

namespace {

std::string reason_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.details().value("reason", "");
  }
  return "no error";
}

double round2(double v) { return std::round(v * 100) / 100; }

// Welford's running update, a different route to the same sample SD.
std::pair<double, double> welford(const std::vector<double>& xs) {
  double m = 0, m2 = 0;
  std::size_t n = 0;
  for (double x : xs) {
    ++n;
    const double d = x - m;
    m += d / static_cast<double>(n);
    m2 += d * (x - m);
  }
  return {m, std::sqrt(m2 / static_cast<double>(n - 1))};
}

// Alpha from the full item covariance matrix: k/(k-1) * (1 - trace / sum of all entries).
double alpha_from_covariance(const Matrix& rows) {
  const std::size_t n = rows.size(), k = rows[0].size();
  std::vector<double> means(k, 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < k; ++c) means[c] += r[c] / static_cast<double>(n);
  double trace = 0, total = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      double cov = 0;
      for (const auto& r : rows) cov += (r[i] - means[i]) * (r[j] - means[j]);
      cov /= static_cast<double>(n - 1);
      total += cov;
      if (i == j) trace += cov;
    }
  }
  const double kd = static_cast<double>(k);
  return kd / (kd - 1) * (1 - trace / total);
}

QueryRecord lookup(std::string selected) {
  QueryRecord r;
  r.selected_string = std::move(selected);
  return r;
}

RatedResponse rated(std::string participant, std::string item, bool known, std::optional<Judgment> j) {
  return {std::move(participant), std::move(item), known, known ? "a guess" : "", j};
}

}  // namespace

TEST_CASE("descriptive statistics use the sample SD") {
  const std::vector<double> scores{17.5, 9, 13, 13, 9, 17, 18, 6, 18.5};
  const auto d = descriptive_stats(scores);
  CHECK(d.n == 9);
  CHECK(std::abs(d.mean - 13.44) <= 0.005);
  CHECK(std::abs(d.sd - 4.62) <= 0.005);

  const auto flat = descriptive_stats(std::vector<double>{5, 5, 5});
  CHECK(flat.mean == 5);
  CHECK(flat.sd == 0);

  CHECK(reason_of([] { descriptive_stats(std::vector<double>{3}); }) == "sd_undefined");
  CHECK(reason_of([] { mean(std::vector<double>{}); }) == "mean_undefined");

  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist(50, 12);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> xs(2 + trial % 40);
    for (auto& x : xs) x = dist(rng);
    const auto [m, sd] = welford(xs);
    const auto got = descriptive_stats(xs);
    CHECK(got.mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(got.sd == doctest::Approx(sd).epsilon(1e-9));
  }
}

TEST_CASE("cronbach alpha") {
  SUBCASE("agrees with the covariance-matrix form") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> rating(1, 7);
    for (int trial = 0; trial < 300; ++trial) {
      Matrix m(3 + trial % 10, std::vector<double>(2 + trial % 6));
      for (auto& row : m)
        for (auto& v : row) v = rating(rng);
      double a = 0;
      try {
        a = cronbach_alpha(m);
      } catch (const Error&) {
        continue;  // constant totals; covered below
      }
      CHECK(std::abs(a - alpha_from_covariance(m)) < 1e-9);
    }
  }
  SUBCASE("duplicated columns give 1") {
    Matrix m{{1, 1}, {3, 3}, {4, 4}, {7, 7}};
    CHECK(cronbach_alpha(m) == doctest::Approx(1.0));
  }
  SUBCASE("independent columns give about 0") {
    std::mt19937_64 rng(99);
    std::normal_distribution<double> dist;
    Matrix m(20000, std::vector<double>(4));
    for (auto& row : m)
      for (auto& v : row) v = dist(rng);
    CHECK(std::abs(cronbach_alpha(m)) < 0.1);
  }
  SUBCASE("preconditions") {
    CHECK(reason_of([] { cronbach_alpha({{1}, {2}, {3}}); }) == "too_few_items");
    CHECK(reason_of([] { cronbach_alpha({{1, 2}}); }) == "too_few_participants");
    CHECK(reason_of([] { cronbach_alpha({{1, 2}, {3}}); }) == "ragged_matrix");
    CHECK(reason_of([] { cronbach_alpha({{2, 2}, {2, 2}, {2, 2}}); }) == "alpha_undefined");
  }
}

TEST_CASE("vocabulary item scoring truth table") {
  CHECK(score_item(true, Judgment::correct) == 1);
  CHECK(score_item(true, Judgment::partial) == 0.5);
  CHECK(score_item(true, Judgment::incorrect) == 0);
  for (auto j : {std::optional<Judgment>{}, std::optional(Judgment::correct), std::optional(Judgment::partial),
                 std::optional(Judgment::incorrect)}) {
    CHECK(score_item(false, j) == 0);
  }
  CHECK(reason_of([] { score_item(true, std::nullopt); }) == "missing_judgment");
  CHECK(parse_judgment(" Partial ") == Judgment::partial);
  CHECK_FALSE(parse_judgment("maybe"));
}

TEST_CASE("rater files, merging and consensus") {
  std::vector<RatedResponse> a, b;
  for (int i = 0; i < 20; ++i) {
    const std::string item = "w" + std::to_string(i);
    a.push_back(rated("P1", item, i % 2 == 0, i % 2 == 0 ? std::optional(Judgment::correct) : std::nullopt));
    b.push_back(a.back());
  }
  b[0].judgment = Judgment::partial;  // P1/w0: 1 vs 0.5
  b[2].judgment = Judgment::incorrect;  // P1/w2: 1 vs 0

  std::stringstream file;
  write_rater_file(file, a);
  CHECK(read_rater_file(file) == a);

  auto merged = merge_raters(a, b);
  CHECK(merged.disagreements.size() == 2);
  CHECK(merged.resolved.size() == 18);

  std::stringstream sheet;
  write_consensus_worksheet(sheet, merged.disagreements);
  std::string filled;
  std::string line;
  std::getline(sheet, line);
  filled += line + "\n";
  while (std::getline(sheet, line)) {
    filled += line + "0.5\n";
  }
  std::istringstream filled_in(filled);
  const auto consensus = read_consensus(filled_in);
  CHECK(consensus.size() == 2);
  merged = merge_raters(a, b, consensus);
  CHECK(merged.disagreements.empty());
  const auto tests = build_tests(merged.resolved, a);
  REQUIRE(tests.size() == 1);
  CHECK(tests[0].total() == doctest::Approx(0.5 + 0.5 + 8));

  // Totals do not depend on item order.
  auto shuffled = a;
  std::reverse(shuffled.begin(), shuffled.end());
  CHECK(build_tests(merged.resolved, shuffled)[0].total() == tests[0].total());

  CHECK(reason_of([&] { build_tests(merged.resolved, std::vector<RatedResponse>(a.begin(), a.begin() + 5)); }) ==
        "item_count");
  auto changed = b;
  changed[1].claimed_known = true;
  changed[1].judgment = Judgment::correct;
  CHECK_THROWS_AS(merge_raters(a, changed), Error);
  CHECK_THROWS_AS(merge_raters(a, std::vector<RatedResponse>(b.begin(), b.begin() + 3)), Error);

  std::istringstream bad("participant_id\titem\tclaimed_known\ttyped_meaning\tjudgment\nP1\tw\tyes\tx\t\n");
  CHECK_THROWS_AS(read_rater_file(bad), Error);
}

TEST_CASE("test word selection") {
  std::vector<QueryRecord> log{lookup("cave"), lookup("reluctantly"), lookup("She went reluctantly"),
                               lookup("Reluctantly,")};
  const auto chosen = select_test_words(log, 20);
  REQUIRE(chosen.words.size() >= 2);
  CHECK(chosen.words[0].word == "reluctantly");
  CHECK(chosen.words[0].count == 3);
  const auto cave = std::find_if(chosen.words.begin(), chosen.words.end(), [](auto& w) { return w.word == "cave"; });
  REQUIRE(cave != chosen.words.end());
  CHECK(cave->count == 1);
  CHECK(chosen.warning);  // fewer than 20 candidates
  CHECK(select_test_words(log, 20).words.size() == chosen.words.size());

  // Stopwords drop out of phrases but a single stopword selection is kept.
  const auto resources = WordResources::parse("the\t1\ncave\t3\nlantern\t5\n", "the\nwent\n");
  CHECK(candidate_words("the cave", resources) == std::vector<std::string>{"cave"});
  CHECK(candidate_words("The", resources) == std::vector<std::string>{"the"});
  CHECK(candidate_words("well-known o'clock!", resources) == std::vector<std::string>{"well-known", "o'clock"});

  // Equal counts: rarer first, then longer, then alphabetical.
  const auto ranked = select_test_words({lookup("cave"), lookup("lantern"), lookup("zest"), lookup("mist")}, 3,
                                        resources);
  REQUIRE(ranked.words.size() == 3);
  CHECK(ranked.words[0].word == "mist");
  CHECK(ranked.words[1].word == "zest");
  CHECK(ranked.words[2].word == "lantern");
  CHECK_FALSE(ranked.warning);
  CHECK(resources.band("unseen") == WordResources::kUnlistedBand);
}

TEST_CASE("survey summary on the fixture") {
  std::ifstream in(std::string(GENQUEST_FIXTURE_DIR) + "/tam_survey.tsv");
  REQUIRE(in);
  const auto responses = read_survey(in);
  CHECK(responses.size() == 9);
  const auto summary = construct_summary(responses);

  const std::vector<std::pair<double, double>> items{{5.00, 1.41}, {5.22, 1.09}, {5.56, 1.13}, {5.22, 1.39},
                                                     {5.44, 1.24}, {5.56, 0.88}, {5.44, 1.24}, {5.33, 1.50},
                                                     {6.00, 1.12}, {6.00, 0.87}, {5.89, 0.93}, {6.44, 0.53}};
  REQUIRE(summary.items.size() == 12);
  for (std::size_t i = 0; i < items.size(); ++i) {
    INFO(summary.items[i].label);
    CHECK(round2(summary.items[i].stats.mean) == doctest::Approx(items[i].first));
    CHECK(round2(summary.items[i].stats.sd) == doctest::Approx(items[i].second));
  }
  REQUIRE(summary.constructs.size() == 2);
  CHECK(summary.constructs[0].name == "PU");
  CHECK(round2(summary.constructs[0].stats.mean) == doctest::Approx(5.33));
  CHECK(round2(summary.constructs[0].stats.sd) == doctest::Approx(1.02));
  CHECK(round2(*summary.constructs[0].alpha) == doctest::Approx(0.92));
  CHECK(summary.constructs[1].name == "PEOU");
  CHECK(round2(summary.constructs[1].stats.mean) == doctest::Approx(5.85));
  CHECK(round2(summary.constructs[1].stats.sd) == doctest::Approx(0.81));
  CHECK(round2(*summary.constructs[1].alpha) == doctest::Approx(0.84));

  std::stringstream again;
  write_survey(again, responses);
  CHECK(read_survey(again).size() == 9);
}

TEST_CASE("survey edge cases") {
  std::vector<LikertResponse> flat(4);
  for (std::size_t i = 0; i < flat.size(); ++i) {
    flat[i].participant_id = "P" + std::to_string(i);
    flat[i].ratings.fill(6);
  }
  const auto summary = construct_summary(flat);
  for (const auto& c : summary.constructs) {
    CHECK(c.stats.mean == 6);
    CHECK(c.stats.sd == 0);
    CHECK_FALSE(c.alpha);
  }
  std::stringstream out;
  write_summary(out, summary);
  CHECK(out.str().find("undefined") != std::string::npos);

  std::string header = "participant_id\tPU1\tPU2\tPU3\tPU4\tPU5\tPU6\tPEOU1\tPEOU2\tPEOU3\tPEOU4\tPEOU5\tPEOU6\n";
  std::istringstream missing(header + "P1\t5\t5\t5\t5\t5\t5\t5\t5\t5\t5\t5\t\n");
  CHECK_THROWS_AS(read_survey(missing), Error);
  std::istringstream range(header + "P1\t5\t5\t5\t5\t5\t5\t5\t5\t5\t5\t5\t8\n");
  CHECK_THROWS_AS(read_survey(range), Error);
}
