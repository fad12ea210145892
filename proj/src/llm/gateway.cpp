#include "genquest/llm/gateway.hpp"

#include <cmath>
#include <thread>

#include "genquest/error.hpp"
#include "genquest/text.hpp"

namespace genquest::llm {

std::string_view to_string(ModelRole role) {
  switch (role) {
    case ModelRole::proficiency:
      return "proficiency";
    case ModelRole::outline:
      return "outline";
    case ModelRole::plot:
      return "plot";
    case ModelRole::summary:
      return "summary";
    case ModelRole::language:
      return "language";
  }
  return "?";
}

std::optional<ModelRole> parse_role(std::string_view text) {
  for (ModelRole role : kAllRoles) {
    if (to_string(role) == text) {
      return role;
    }
  }
  return std::nullopt;
}

Gateway::Gateway(TemplateCatalog catalog, RetryPolicy policy, Sleeper sleeper)
    : catalog_(std::move(catalog)), policy_(policy), sleeper_(std::move(sleeper)) {
  if (!sleeper_) {
    sleeper_ = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
  if (policy_.max_attempts < 1) {
    policy_.max_attempts = 1;
  }
}

void Gateway::bind(ModelRole role, std::shared_ptr<Provider> provider) {
  std::unique_lock lock(bindings_mutex_);
  providers_[role] = std::move(provider);
}

void Gateway::bind_all(const std::shared_ptr<Provider>& provider) {
  for (ModelRole role : kAllRoles) {
    bind(role, provider);
  }
}

std::shared_ptr<Provider> Gateway::provider_for(ModelRole role) const {
  std::shared_lock lock(bindings_mutex_);
  auto it = providers_.find(role);
  return it == providers_.end() ? nullptr : it->second;
}

std::string Gateway::render_prompt(std::string_view template_id, const Bindings& bindings) const {
  return catalog_.render(template_id, bindings);
}

CompletionResult Gateway::complete(ModelRole role, std::string_view template_id, Bindings bindings,
                                   std::string_view session_id, GenerationParams params) {
  CompletionRequest request;
  request.role = role;
  request.template_id = std::string(template_id);
  request.prompt = render_prompt(template_id, bindings);
  request.bindings = std::move(bindings);
  request.params = params;
  request.session_id = std::string(session_id);
  return complete(request);
}

CompletionResult Gateway::complete(const CompletionRequest& request) {
  auto provider = provider_for(request.role);
  if (!provider) {
    throw Error(ErrorCode::provider_config, "no provider bound to role '" + std::string(to_string(request.role)) + "'",
                {{"role", std::string(to_string(request.role))}});
  }

  const auto started = std::chrono::steady_clock::now();
  auto backoff = policy_.initial_backoff;
  std::string last_failure;
  int attempt = 0;
  for (attempt = 1; attempt <= policy_.max_attempts; ++attempt) {
    try {
      std::string text = provider->generate(request);
      if (text::trim(text).empty()) {
        throw ProviderError(ProviderError::Kind::transient, "provider returned empty text");
      }
      CompletionResult result;
      result.text = std::move(text);
      result.provider_id = provider->id();
      result.attempts = attempt;
      result.latency =
          std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
      record({request.session_id, request.role, request.template_id, request.prompt, result.text, result.provider_id,
              attempt, system_now()});
      return result;
    } catch (const ProviderError& e) {
      if (e.kind() != ProviderError::Kind::transient) {
        record({request.session_id, request.role, request.template_id, request.prompt, {}, provider->id(), attempt,
                system_now()});
        throw Error(ErrorCode::provider_config, std::string("provider '") + provider->id() + "' rejected the call: " + e.what(),
                    {{"role", std::string(to_string(request.role))}, {"attempts", attempt}});
      }
      last_failure = e.what();
    }
    if (attempt < policy_.max_attempts) {
      sleeper_(backoff);
      backoff = std::chrono::milliseconds(
          static_cast<std::int64_t>(std::llround(static_cast<double>(backoff.count()) * policy_.backoff_multiplier)));
    }
  }
  const int attempts = policy_.max_attempts;
  record({request.session_id, request.role, request.template_id, request.prompt, {}, provider->id(), attempts,
          system_now()});
  throw Error(ErrorCode::provider_unavailable,
              "provider '" + provider->id() + "' unavailable after " + std::to_string(attempts) +
                  " attempts: " + last_failure,
              {{"role", std::string(to_string(request.role))}, {"attempts", attempts}});
}

void Gateway::set_logging(bool enabled) {
  std::lock_guard lock(log_mutex_);
  logging_ = enabled;
}

bool Gateway::logging() const {
  std::lock_guard lock(log_mutex_);
  return logging_;
}

void Gateway::record(CaptureEntry entry) {
  std::lock_guard lock(log_mutex_);
  if (logging_) {
    log_.push_back(std::move(entry));
  }
}

std::vector<CaptureEntry> Gateway::capture_log(std::string_view session_id) const {
  std::lock_guard lock(log_mutex_);
  std::vector<CaptureEntry> out;
  for (const auto& e : log_) {
    if (e.session_id == session_id) {
      out.push_back(e);
    }
  }
  return out;
}

std::vector<CaptureEntry> Gateway::capture_log_all() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

void Gateway::clear_capture_log() {
  std::lock_guard lock(log_mutex_);
  log_.clear();
}

}  // namespace genquest::llm
