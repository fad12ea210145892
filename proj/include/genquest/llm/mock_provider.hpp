#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>

#include "genquest/llm/provider.hpp"

namespace genquest::llm {

/// Offline provider. Output is a pure function of (template_id, bindings, seed):
/// a structure stub the engine's parsers accept, tagged with a hash of the
/// canonical request serialization. Stable across process restarts.
class MockProvider : public Provider {
 public:
  explicit MockProvider(std::uint64_t seed = 0, std::chrono::milliseconds latency = std::chrono::milliseconds(0));

  std::string id() const override { return "mock"; }
  std::string generate(const CompletionRequest& request) override;

  std::uint64_t seed() const { return seed_; }
  std::size_t calls() const { return calls_.load(); }

  /// "template_id\nkey=value\n...seed=N" with keys sorted.
  static std::string canonical_form(const CompletionRequest& request, std::uint64_t seed);

 private:
  std::uint64_t seed_;
  std::chrono::milliseconds latency_;
  std::atomic<std::size_t> calls_{0};
};

}  // namespace genquest::llm
