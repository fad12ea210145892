#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

#include "genquest/llm/provider.hpp"

namespace genquest::llm {

/// Text with `{{name}}` placeholders. Every placeholder is required.
class PromptTemplate {
 public:
  PromptTemplate(std::string id, std::string body);

  const std::string& id() const { return id_; }
  const std::string& body() const { return body_; }
  const std::set<std::string>& required_bindings() const { return required_; }

  /// Single-pass substitution; values are inserted verbatim and never rescanned.
  /// Throws Error(validation) naming the first missing placeholder.
  std::string render(const Bindings& bindings) const;

 private:
  std::string id_;
  std::string body_;
  std::set<std::string> required_;
};

class TemplateCatalog {
 public:
  /// Templates compiled in from the repository's templates/ directory.
  static TemplateCatalog builtin();

  /// Every `<id>.txt` in `dir` becomes template `<id>`, replacing a builtin of the same id.
  void load_directory(const std::filesystem::path& dir);

  void add(PromptTemplate tmpl);
  const PromptTemplate* find(std::string_view id) const;

  /// Throws Error(not_found) for an unknown template id.
  const PromptTemplate& at(std::string_view id) const;
  std::string render(std::string_view id, const Bindings& bindings) const { return at(id).render(bindings); }

  std::size_t size() const { return templates_.size(); }

 private:
  std::map<std::string, PromptTemplate, std::less<>> templates_;
};

}  // namespace genquest::llm
