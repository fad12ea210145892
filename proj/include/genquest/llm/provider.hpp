#pragma once

#include <array>
#include <chrono>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace genquest::llm {

/// Named function in the generation pipeline; which provider serves a role is configuration.
enum class ModelRole { proficiency, outline, plot, summary, language };

inline constexpr std::array<ModelRole, 5> kAllRoles = {ModelRole::proficiency, ModelRole::outline, ModelRole::plot,
                                                      ModelRole::summary, ModelRole::language};

std::string_view to_string(ModelRole role);
std::optional<ModelRole> parse_role(std::string_view text);

using Bindings = std::map<std::string, std::string>;

/// Abstract knobs, passed through to the provider untouched.
struct GenerationParams {
  int max_tokens = 1024;
  double temperature = 0.8;
};

struct CompletionRequest {
  ModelRole role = ModelRole::plot;
  std::string template_id;
  Bindings bindings;
  std::string prompt;  // fully rendered
  GenerationParams params;
  std::string session_id;  // capture-log key; may be empty
};

struct CompletionResult {
  std::string text;
  std::string provider_id;
  std::chrono::milliseconds latency{0};
  int attempts = 0;
};

/// Raised by providers. Transient failures are retried by the gateway,
/// the rest surface immediately.
class ProviderError : public std::runtime_error {
 public:
  enum class Kind { transient, auth, config };

  ProviderError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

class Provider {
 public:
  virtual ~Provider() = default;

  virtual std::string id() const = 0;

  /// Returns the generated text or throws ProviderError.
  virtual std::string generate(const CompletionRequest& request) = 0;
};

}  // namespace genquest::llm
