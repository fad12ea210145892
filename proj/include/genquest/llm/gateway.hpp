#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "genquest/clock.hpp"
#include "genquest/llm/prompt_template.hpp"
#include "genquest/llm/provider.hpp"

namespace genquest::llm {

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double backoff_multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct CaptureEntry {
  std::string session_id;
  ModelRole role = ModelRole::plot;
  std::string template_id;
  std::string prompt;
  std::string result;  // empty when every attempt failed
  std::string provider_id;
  int attempts = 0;
  Timestamp at{};
};

/// Routes role-tagged requests to bound providers, retries transient
/// failures with exponential backoff, and optionally records every call.
///
/// Thread-safe once configured. bind() may be called at any time.
class Gateway {
 public:
  explicit Gateway(TemplateCatalog catalog, RetryPolicy policy = {}, Sleeper sleeper = {});

  void bind(ModelRole role, std::shared_ptr<Provider> provider);
  void bind_all(const std::shared_ptr<Provider>& provider);
  std::shared_ptr<Provider> provider_for(ModelRole role) const;

  std::string render_prompt(std::string_view template_id, const Bindings& bindings) const;

  /// Renders `template_id` with `bindings`, then completes.
  CompletionResult complete(ModelRole role, std::string_view template_id, Bindings bindings,
                            std::string_view session_id = {}, GenerationParams params = {});

  /// `request.prompt` must already be rendered.
  /// Errors: provider_unavailable after exhausting retries (retriable),
  /// provider_config on auth/config failures or an unbound role.
  CompletionResult complete(const CompletionRequest& request);

  void set_logging(bool enabled);
  bool logging() const;

  /// Calls recorded for one session, in completion order.
  std::vector<CaptureEntry> capture_log(std::string_view session_id) const;
  std::vector<CaptureEntry> capture_log_all() const;
  void clear_capture_log();

  const TemplateCatalog& templates() const { return catalog_; }
  const RetryPolicy& retry_policy() const { return policy_; }

 private:
  void record(CaptureEntry entry);

  TemplateCatalog catalog_;
  RetryPolicy policy_;
  Sleeper sleeper_;

  mutable std::shared_mutex bindings_mutex_;
  std::map<ModelRole, std::shared_ptr<Provider>> providers_;

  mutable std::mutex log_mutex_;
  bool logging_ = true;
  std::vector<CaptureEntry> log_;
};

}  // namespace genquest::llm
