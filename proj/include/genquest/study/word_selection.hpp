#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/domain.hpp"

namespace genquest::study {

/// Frequency bands (1 = most common) and stopwords used to rank candidates.
/// The bundled lists can be replaced per study.
struct WordResources {
  static constexpr int kUnlistedBand = 1000;

  std::map<std::string, int, std::less<>> bands;
  std::set<std::string, std::less<>> stopwords;

  static WordResources builtin();
  /// `bands` holds "word<TAB>band" lines, `stopwords` one word per line; '#' starts a comment line.
  static WordResources parse(std::string_view bands, std::string_view stopwords);
  static WordResources load(const std::filesystem::path& bands, const std::filesystem::path& stopwords);

  /// Unlisted words count as rarer than every band.
  int band(std::string_view word) const;
};

/// Lower-cased word tokens of a selection. Apostrophes and hyphens inside a
/// word are kept; a multi-word selection drops its stopwords.
std::vector<std::string> candidate_words(std::string_view selection, const WordResources& resources);

struct RankedWord {
  std::string word;
  std::size_t count = 0;  // lookups that contributed this word
  int band = 0;
};

struct WordSelection {
  std::vector<RankedWord> words;
  std::optional<std::string> warning;  // set when fewer than n candidates exist
};

/// Ranks by lookup count (desc), rarity (higher band first), length (desc),
/// then alphabetically, and keeps the top `n`.
WordSelection select_test_words(const std::vector<QueryRecord>& log, std::size_t n = 20,
                                const WordResources& resources = WordResources::builtin());

}  // namespace genquest::study
