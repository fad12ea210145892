#include "genquest/study/word_selection.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "genquest/error.hpp"
#include "genquest/text.hpp"

namespace genquest::study {

extern const char* const kBuiltinFrequencyBands;
extern const char* const kBuiltinStopwords;

namespace {

bool is_word_byte(unsigned char c) { return std::isalpha(c) || c >= 0x80; }

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::validation, "cannot read " + path.string());
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

}  // namespace

WordResources WordResources::parse(std::string_view bands, std::string_view stopwords) {
  WordResources r;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(bands, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    const auto tab = line.find('\t');
    int band = 0;
    try {
      band = tab == std::string_view::npos ? 0 : std::stoi(std::string(line.substr(tab + 1)));
    } catch (const std::exception&) {
      band = 0;
    }
    if (band < 1) {
      throw Error(ErrorCode::validation, "frequency band line " + std::to_string(line_no) + " must be word<TAB>band");
    }
    r.bands.emplace(text::to_lower_ascii(text::trim(line.substr(0, tab))), band);
  }
  for (const auto& raw : text::split(stopwords, '\n')) {
    const auto line = text::trim(raw);
    if (!line.empty() && line.front() != '#') {
      r.stopwords.insert(text::to_lower_ascii(line));
    }
  }
  return r;
}

WordResources WordResources::builtin() {
  static const WordResources resources = parse(kBuiltinFrequencyBands, kBuiltinStopwords);
  return resources;
}

WordResources WordResources::load(const std::filesystem::path& bands, const std::filesystem::path& stopwords) {
  return parse(read_file(bands), read_file(stopwords));
}

int WordResources::band(std::string_view word) const {
  auto it = bands.find(word);
  return it == bands.end() ? WordResources::kUnlistedBand : it->second;
}

std::vector<std::string> candidate_words(std::string_view selection, const WordResources& resources) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < selection.size()) {
    if (!is_word_byte(static_cast<unsigned char>(selection[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < selection.size()) {
      const auto c = static_cast<unsigned char>(selection[j]);
      if (is_word_byte(c)) {
        ++j;
      } else if ((c == '\'' || c == '-') && j + 1 < selection.size() &&
                 is_word_byte(static_cast<unsigned char>(selection[j + 1]))) {
        j += 2;
      } else {
        break;
      }
    }
    std::string token = text::to_lower_ascii(selection.substr(i, j - i));
    // Curly apostrophes arrive as non-ASCII bytes; trim a trailing one.
    while (token.size() >= 3 && token.ends_with("\xE2\x80\x99")) {
      token.resize(token.size() - 3);
    }
    if (!token.empty()) {
      tokens.push_back(std::move(token));
    }
    i = j;
  }
  if (tokens.size() <= 1) {
    return tokens;
  }
  std::vector<std::string> content;
  for (auto& t : tokens) {
    if (!resources.stopwords.contains(t)) {
      content.push_back(std::move(t));
    }
  }
  return content;
}

WordSelection select_test_words(const std::vector<QueryRecord>& log, std::size_t n, const WordResources& resources) {
  if (n == 0) {
    throw Error(ErrorCode::validation, "n must be at least 1", {{"field", "n"}});
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& record : log) {
    for (const auto& word : candidate_words(record.selected_string, resources)) {
      ++counts[word];
    }
  }
  std::vector<RankedWord> ranked;
  for (const auto& [word, count] : counts) {
    ranked.push_back({word, count, resources.band(word)});
  }
  std::sort(ranked.begin(), ranked.end(), [](const RankedWord& a, const RankedWord& b) {
    if (a.count != b.count) return a.count > b.count;
    if (a.band != b.band) return a.band > b.band;
    const auto la = text::utf8_length(a.word);
    const auto lb = text::utf8_length(b.word);
    if (la != lb) return la > lb;
    return a.word < b.word;
  });
  WordSelection out;
  if (ranked.size() < n) {
    out.warning = "only " + std::to_string(ranked.size()) + " distinct candidate words, " + std::to_string(n) +
                  " requested";
  } else {
    ranked.resize(n);
  }
  out.words = std::move(ranked);
  return out;
}

}  // namespace genquest::study
