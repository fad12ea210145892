#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace genquest::story {

struct Genre {
  std::string id;
  std::string display_name;
  std::string example_works;  // shown to the learner as a hint, e.g. film titles
};

/// Plain-text catalog, one genre per line:
///
///     fantasy | Fantasy | The Lord of the Rings, Harry Potter
///
/// Blank lines and lines starting with '#' are ignored.
class GenreCatalog {
 public:
  GenreCatalog() = default;
  explicit GenreCatalog(std::vector<Genre> genres);

  static GenreCatalog parse(std::string_view text);
  static GenreCatalog load(const std::filesystem::path& path);
  static GenreCatalog builtin();

  const Genre* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
  std::vector<std::string> ids() const;
  const std::vector<Genre>& genres() const { return genres_; }
  bool empty() const { return genres_.empty(); }

 private:
  std::vector<Genre> genres_;
};

}  // namespace genquest::story
