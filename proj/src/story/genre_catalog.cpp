#include "genquest/story/genre_catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "genquest/error.hpp"
#include "genquest/text.hpp"

namespace genquest::story {

namespace {

constexpr std::string_view kBuiltinCatalog = R"(# id | display name | example works
fantasy | Fantasy | The Lord of the Rings, Harry Potter, Spirited Away
mystery | Mystery | Sherlock Holmes, Knives Out, Murder on the Orient Express
science-fiction | Science Fiction | Interstellar, The Martian, Star Wars
adventure | Adventure | Indiana Jones, Pirates of the Caribbean, Jumanji
horror | Horror | The Others, A Quiet Place, Coraline
romance | Romance | Pride and Prejudice, Notting Hill, La La Land
)";

}  // namespace

GenreCatalog::GenreCatalog(std::vector<Genre> genres) : genres_(std::move(genres)) {}

GenreCatalog GenreCatalog::parse(std::string_view content) {
  std::vector<Genre> genres;
  std::size_t line_no = 0;
  for (const auto& raw : text::split(content, '\n')) {
    ++line_no;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == '#') {
      continue;
    }
    auto fields = text::split(line, '|');
    if (fields.size() != 3) {
      throw Error(ErrorCode::validation,
                  "genre catalog line " + std::to_string(line_no) + ": expected 'id | name | examples'");
    }
    Genre g{std::string(text::trim(fields[0])), std::string(text::trim(fields[1])),
            std::string(text::trim(fields[2]))};
    if (g.id.empty()) {
      throw Error(ErrorCode::validation, "genre catalog line " + std::to_string(line_no) + ": empty id");
    }
    if (std::any_of(genres.begin(), genres.end(), [&](const Genre& other) { return other.id == g.id; })) {
      throw Error(ErrorCode::validation, "genre catalog: duplicate id '" + g.id + "'");
    }
    genres.push_back(std::move(g));
  }
  return GenreCatalog(std::move(genres));
}

GenreCatalog GenreCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::storage, "cannot read genre catalog " + path.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

GenreCatalog GenreCatalog::builtin() { return parse(kBuiltinCatalog); }

const Genre* GenreCatalog::find(std::string_view id) const {
  auto it = std::find_if(genres_.begin(), genres_.end(), [&](const Genre& g) { return g.id == id; });
  return it == genres_.end() ? nullptr : &*it;
}

std::vector<std::string> GenreCatalog::ids() const {
  std::vector<std::string> out;
  out.reserve(genres_.size());
  for (const auto& g : genres_) {
    out.push_back(g.id);
  }
  return out;
}

}  // namespace genquest::story
