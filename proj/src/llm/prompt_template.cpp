#include "genquest/llm/prompt_template.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <utility>

#include "genquest/error.hpp"

namespace genquest::llm {

// Generated at configure time from templates/*.txt.
struct BuiltinTemplate {
  const char* id;
  const char* body;
};
extern const BuiltinTemplate kBuiltinTemplates[];
extern const std::size_t kBuiltinTemplateCount;

namespace {

bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

struct Placeholder {
  std::size_t begin = 0;  // position of "{{"
  std::size_t end = 0;    // one past "}}"
  std::string name;
};

// Finds the next well-formed placeholder at or after `from`.
std::optional<Placeholder> next_placeholder(std::string_view body, std::size_t from) {
  while (true) {
    const std::size_t open = body.find("{{", from);
    if (open == std::string_view::npos) {
      return std::nullopt;
    }
    std::size_t i = open + 2;
    while (i < body.size() && body[i] == ' ') {
      ++i;
    }
    const std::size_t name_begin = i;
    while (i < body.size() && is_name_char(body[i])) {
      ++i;
    }
    const std::size_t name_end = i;
    while (i < body.size() && body[i] == ' ') {
      ++i;
    }
    if (name_end > name_begin && body.substr(i, 2) == "}}") {
      return Placeholder{open, i + 2, std::string(body.substr(name_begin, name_end - name_begin))};
    }
    from = open + 2;
  }
}

}  // namespace

PromptTemplate::PromptTemplate(std::string id, std::string body) : id_(std::move(id)), body_(std::move(body)) {
  std::size_t pos = 0;
  while (auto p = next_placeholder(body_, pos)) {
    required_.insert(p->name);
    pos = p->end;
  }
}

std::string PromptTemplate::render(const Bindings& bindings) const {
  for (const auto& name : required_) {
    if (!bindings.contains(name)) {
      throw Error(ErrorCode::validation, "template '" + id_ + "' is missing binding '" + name + "'",
                  {{"template_id", id_}, {"missing", name}});
    }
  }
  std::string out;
  out.reserve(body_.size());
  std::size_t pos = 0;
  while (auto p = next_placeholder(body_, pos)) {
    out.append(body_, pos, p->begin - pos);
    out += bindings.at(p->name);
    pos = p->end;
  }
  out.append(body_, pos, std::string::npos);
  return out;
}

TemplateCatalog TemplateCatalog::builtin() {
  TemplateCatalog catalog;
  for (std::size_t i = 0; i < kBuiltinTemplateCount; ++i) {
    catalog.add(PromptTemplate(kBuiltinTemplates[i].id, kBuiltinTemplates[i].body));
  }
  return catalog;
}

void TemplateCatalog::load_directory(const std::filesystem::path& dir) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    throw Error(ErrorCode::storage, "template directory not found: " + dir.string());
  }
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") {
      continue;
    }
    std::ifstream in(entry.path());
    std::stringstream buffer;
    buffer << in.rdbuf();
    add(PromptTemplate(entry.path().stem().string(), buffer.str()));
  }
}

void TemplateCatalog::add(PromptTemplate tmpl) {
  std::string id = tmpl.id();
  templates_.insert_or_assign(std::move(id), std::move(tmpl));
}

const PromptTemplate* TemplateCatalog::find(std::string_view id) const {
  auto it = templates_.find(id);
  return it == templates_.end() ? nullptr : &it->second;
}

const PromptTemplate& TemplateCatalog::at(std::string_view id) const {
  if (const auto* t = find(id)) {
    return *t;
  }
  throw Error(ErrorCode::not_found, "unknown prompt template '" + std::string(id) + "'",
              {{"template_id", std::string(id)}});
}

}  // namespace genquest::llm
