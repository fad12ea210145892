// Study instruments: test-word selection from query logs, vocabulary test
// scoring with two raters, descriptive statistics and the TAM survey summary.
//
// Every subcommand reads and writes UTF-8 TSV. Failures print one line
//   error<TAB><code><TAB><message>
// to stderr and exit nonzero; warnings use the same shape with "warning".

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "genquest/error.hpp"
#include "genquest/language/query_log.hpp"
#include "genquest/study/statistics.hpp"
#include "genquest/study/survey.hpp"
#include "genquest/study/vocab.hpp"
#include "genquest/study/word_selection.hpp"
#include "genquest/tsv.hpp"

namespace gs = genquest::study;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitConsensus = 3;

struct Failure {
  std::string code;
  std::string message;
  int exit_code = kExitInput;
};

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Failure{"io_error", "cannot read " + path};
  }
  return in;
}

// Writes to `path`, or stdout when it is empty or "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty() && path != "-") {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) {
        throw Failure{"io_error", "cannot write " + path};
      }
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string number(double v) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.4g", v);
  return buffer;
}

std::string fixed(double v, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.*f", digits, v);
  return buffer;
}

void warn(std::string_view code, const std::string& message) {
  std::cerr << "warning\t" << code << '\t' << message << '\n';
}

struct SelectWords {
  std::string log;
  std::size_t n = 20;
  std::string bands;
  std::string stopwords;
  std::string out;

  void run() const {
    auto in = open_in(log);
    const auto records = genquest::language::read_query_log(in);
    gs::WordResources resources = gs::WordResources::builtin();
    if (!bands.empty() || !stopwords.empty()) {
      if (bands.empty() || stopwords.empty()) {
        throw Failure{"usage", "--bands and --stopwords must be given together"};
      }
      resources = gs::WordResources::load(bands, stopwords);
    }
    const auto selection = gs::select_test_words(records, n, resources);
    if (selection.warning) {
      warn("shortfall", *selection.warning);
    }
    Output output(out);
    genquest::tsv::write_row(output.stream(), {"rank", "word", "lookups", "band"});
    std::size_t rank = 0;
    for (const auto& w : selection.words) {
      genquest::tsv::write_row(output.stream(),
                               {std::to_string(++rank), w.word, std::to_string(w.count),
                                w.band == gs::WordResources::kUnlistedBand ? "unlisted" : std::to_string(w.band)});
    }
  }
};

struct Score {
  std::string rater_a;
  std::string rater_b;
  std::string consensus;
  std::string worksheet;
  std::string out;

  void run() const {
    auto in_a = open_in(rater_a);
    const auto a = gs::read_rater_file(in_a);
    std::map<gs::ItemKey, double> resolved;
    if (rater_b.empty()) {
      for (const auto& row : a) {
        resolved[{row.participant_id, row.item}] = row.score();
      }
    } else {
      auto in_b = open_in(rater_b);
      const auto b = gs::read_rater_file(in_b);
      std::map<gs::ItemKey, double> agreed;
      if (!consensus.empty()) {
        auto in_c = open_in(consensus);
        agreed = gs::read_consensus(in_c);
      }
      auto merged = gs::merge_raters(a, b, agreed);
      if (!merged.disagreements.empty()) {
        if (worksheet.empty()) {
          throw Failure{"consensus_required",
                        std::to_string(merged.disagreements.size()) +
                            " rater disagreements; pass --worksheet to write them for discussion",
                        kExitConsensus};
        }
        Output sheet(worksheet);
        gs::write_consensus_worksheet(sheet.stream(), merged.disagreements);
        throw Failure{"consensus_required",
                      std::to_string(merged.disagreements.size()) + " rater disagreements written to " + worksheet +
                          "; fill in `resolved` and pass it back with --consensus",
                      kExitConsensus};
      }
      resolved = std::move(merged.resolved);
    }
    const auto tests = gs::build_tests(resolved, a);
    Output output(out);
    genquest::tsv::write_row(output.stream(), {"participant_id", "total"});
    for (const auto& t : tests) {
      genquest::tsv::write_row(output.stream(), {t.participant_id, number(t.total())});
    }
  }
};

struct Stats {
  std::string in;
  std::string column = "total";
  std::vector<double> values;
  int digits = 2;

  void run() const {
    std::vector<double> data = values;
    if (!in.empty()) {
      auto stream = open_in(in);
      const auto rows = genquest::tsv::read_rows(stream);
      if (rows.empty()) {
        throw Failure{"validation_error", in + " is empty"};
      }
      const auto& header = rows[0];
      const auto it = std::find(header.begin(), header.end(), column);
      if (it == header.end()) {
        throw Failure{"validation_error", in + " has no column '" + column + "'"};
      }
      const auto c = static_cast<std::size_t>(it - header.begin());
      for (std::size_t r = 1; r < rows.size(); ++r) {
        try {
          std::size_t used = 0;
          data.push_back(std::stod(rows[r].at(c), &used));
          if (used != rows[r][c].size()) {
            throw std::invalid_argument(rows[r][c]);
          }
        } catch (const std::exception&) {
          throw Failure{"validation_error", in + " line " + std::to_string(r + 1) + ": '" + column +
                                                 "' is not a number"};
        }
      }
    }
    const auto d = gs::descriptive_stats(data);
    genquest::tsv::write_row(std::cout, {"n", "mean", "sd"});
    genquest::tsv::write_row(std::cout, {std::to_string(d.n), fixed(d.mean, digits), fixed(d.sd, digits)});
  }
};

struct Survey {
  std::string in;
  std::string out;

  void run() const {
    auto stream = open_in(in);
    const auto summary = gs::construct_summary(gs::read_survey(stream));
    Output output(out);
    gs::write_summary(output.stream(), summary);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GenQuest study toolkit"};
  app.require_subcommand(1);

  SelectWords select;
  auto* select_cmd = app.add_subcommand("select-words", "Rank looked-up words for the vocabulary test");
  select_cmd->add_option("--log", select.log, "Query log TSV export")->required();
  select_cmd->add_option("-n,--count", select.n, "Number of words")->check(CLI::PositiveNumber);
  select_cmd->add_option("--bands", select.bands, "Frequency band list overriding the bundled one");
  select_cmd->add_option("--stopwords", select.stopwords, "Stopword list overriding the bundled one");
  select_cmd->add_option("-o,--out", select.out, "Output TSV (default stdout)");

  Score score;
  auto* score_cmd = app.add_subcommand("score", "Score vocabulary tests from one or two rater files");
  score_cmd->add_option("--rater-a", score.rater_a, "First rater TSV")->required();
  score_cmd->add_option("--rater-b", score.rater_b, "Second rater TSV");
  score_cmd->add_option("--consensus", score.consensus, "Filled-in consensus worksheet");
  score_cmd->add_option("--worksheet", score.worksheet, "Where to write unresolved disagreements");
  score_cmd->add_option("-o,--out", score.out, "Per-participant totals TSV (default stdout)");

  Stats stats;
  auto* stats_cmd = app.add_subcommand("stats", "Mean and sample SD of a column or of listed values");
  stats_cmd->add_option("--in", stats.in, "TSV input");
  stats_cmd->add_option("--column", stats.column, "Column to summarize (default: total)");
  stats_cmd->add_option("--values", stats.values, "Values given inline");
  stats_cmd->add_option("--digits", stats.digits, "Decimal places")->check(CLI::Range(0, 12));

  Survey survey;
  auto* survey_cmd = app.add_subcommand("survey", "Item and construct statistics for the 12-item TAM survey");
  survey_cmd->add_option("--in", survey.in, "Survey responses TSV")->required();
  survey_cmd->add_option("-o,--out", survey.out, "Summary TSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error\tusage\t" << e.what() << '\n';
    return kExitInput;
  }

  try {
    if (*select_cmd) select.run();
    if (*score_cmd) score.run();
    if (*stats_cmd) {
      if (stats.in.empty() && stats.values.empty()) {
        throw Failure{"usage", "stats needs --in or --values"};
      }
      stats.run();
    }
    if (*survey_cmd) survey.run();
  } catch (const Failure& f) {
    std::cerr << "error\t" << f.code << '\t' << f.message << '\n';
    return f.exit_code;
  } catch (const genquest::Error& e) {
    const std::string reason = e.details().is_object() ? e.details().value("reason", "") : "";
    std::cerr << "error\t" << (reason.empty() ? std::string(genquest::to_string(e.code())) : reason) << '\t'
              << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error\tinternal_error\t" << e.what() << '\n';
    return 1;
  }
  return 0;
}
