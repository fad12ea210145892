#include "genquest/llm/mock_provider.hpp"

#include <array>
#include <cstdio>
#include <sstream>
#include <thread>

#include "genquest/cefr.hpp"
#include "genquest/text.hpp"

namespace genquest::llm {

namespace {

std::string hex(std::uint64_t value, int digits) {
  char buffer[17];
  std::snprintf(buffer, sizeof(buffer), "%016llx", static_cast<unsigned long long>(value));
  return std::string(buffer + 16 - digits);
}

std::string binding(const Bindings& b, const std::string& key, std::string fallback = {}) {
  auto it = b.find(key);
  return it == b.end() ? fallback : it->second;
}

std::size_t binding_count(const Bindings& b, const std::string& key, std::size_t fallback) {
  auto it = b.find(key);
  if (it == b.end()) {
    return fallback;
  }
  try {
    return static_cast<std::size_t>(std::stoul(it->second));
  } catch (const std::exception&) {
    return fallback;
  }
}

constexpr std::array<std::string_view, 8> kScenery = {
    "A cold wind moves through the trees and the light begins to fade.",
    "Somewhere far away a bell rings three times and then stops.",
    "The path is narrow here and every step makes a soft sound.",
    "An old map lies on the table with one corner burned away.",
    "Voices whisper behind a closed door but nobody comes out.",
    "The smell of rain fills the air before the first drops fall.",
    "A small lamp shows footprints that lead into the dark.",
    "Nobody has been here for years, yet the fire is still warm.",
};

constexpr std::array<std::string_view, 6> kActions = {
    "open the locked door", "follow the footprints", "ask the stranger for help",
    "hide and wait",        "read the old letter",   "run back to the village",
};

std::string scenery(std::uint64_t h, int sentences) {
  std::string out;
  for (int i = 0; i < sentences; ++i) {
    if (!out.empty()) {
      out += ' ';
    }
    out += kScenery[(h >> (i * 8)) % kScenery.size()];
  }
  return out;
}

std::string premise_or_default(const Bindings& b) {
  std::string p = binding(b, "premise");
  return p.empty() ? "an unexpected journey" : p;
}

}  // namespace

MockProvider::MockProvider(std::uint64_t seed, std::chrono::milliseconds latency) : seed_(seed), latency_(latency) {}

std::string MockProvider::canonical_form(const CompletionRequest& request, std::uint64_t seed) {
  std::string out = request.template_id;
  out += '\n';
  for (const auto& [key, value] : request.bindings) {  // std::map iterates sorted
    out += key;
    out += '=';
    out += value;
    out += '\n';
  }
  out += "seed=" + std::to_string(seed);
  return out;
}

std::string MockProvider::generate(const CompletionRequest& request) {
  ++calls_;
  if (latency_.count() > 0) {
    std::this_thread::sleep_for(latency_);
  }
  const std::uint64_t h = text::fnv1a64(canonical_form(request, seed_));
  const std::string tag = "(mock " + hex(h, 16) + ")";
  const Bindings& b = request.bindings;
  const std::string& tid = request.template_id;
  std::ostringstream out;

  if (tid == "proficiency_samples") {
    const std::string genre = binding(b, "genre", "story");
    out << "```samples\n";
    for (CefrLevel level : kAllCefrLevels) {
      const std::string lv(to_string(level));
      out << lv << ": [" << lv << "] A " << genre << " opening about " << premise_or_default(b) << ". "
          << scenery(h ^ static_cast<std::uint64_t>(level), 2) << " " << tag << "\n";
    }
    out << "```\n";
  } else if (tid == "story_outline") {
    const std::string genre = binding(b, "genre", "story");
    const std::size_t m = binding_count(b, "milestone_count", 3);
    const std::size_t d = binding_count(b, "decisions_per_milestone", 2);
    const std::size_t e = binding_count(b, "ending_count", 2);
    out << "```outline\n";
    for (std::size_t i = 1; i <= m; ++i) {
      out << "MILESTONE " << i << ": [" << genre << "] Key event " << i << " of " << premise_or_default(b) << " "
          << hex(h + i, 6) << "\n";
      for (std::size_t j = 1; j <= d; ++j) {
        out << "DECISION " << i << "." << j << ": Choice " << j << " on the way to event " << i << ".\n";
      }
    }
    for (std::size_t k = 1; k <= e; ++k) {
      out << "ENDING " << k << ": [" << genre << "] Possible ending " << k << " " << hex(h + 100 + k, 6) << "\n";
    }
    out << "```\n";
  } else if (tid == "plot_segment") {
    const std::string level = binding(b, "level", "B1");
    const std::string m = binding(b, "milestone_number", "1");
    const std::string d = binding(b, "decision_number", "1");
    const std::size_t opts = binding_count(b, "options_per_decision", 3);
    out << "```segment\n";
    out << "TEXT: [" << level << "] Milestone " << m << ", decision " << d << ". " << binding(b, "milestone")
        << " The story continues after " << binding(b, "summary_count", "0") << " earlier scenes. "
        << scenery(h, 4) << " Now the hero must decide: " << binding(b, "decision_slot") << " " << tag << "\n";
    for (std::size_t k = 1; k <= opts; ++k) {
      out << "OPTION " << k << ": " << kActions[(h + k) % kActions.size()] << " (M" << m << "D" << d << "-" << k
          << "-" << hex(h + k, 4) << ")\n";
    }
    out << "```\n";
  } else if (tid == "story_ending") {
    const std::string level = binding(b, "level", "B1");
    out << "```ending\nTEXT: [" << level << "] The end, after " << binding(b, "summary_count", "0")
        << " choices. " << scenery(h, 3) << " " << tag << "\n```\n";
  } else if (tid == "segment_summary" || tid == "segment_summary_shorter") {
    out << "The player chose \"" << binding(b, "chosen_option") << "\". " << tag;
  } else if (tid == "language_explain") {
    out << "[" << binding(b, "level", "B1") << "] \"" << binding(b, "selected")
        << "\" is explained here in simple words. " << tag;
  } else {
    out << "[mock:" << tid << "] " << canonical_form(request, seed_) << " " << tag;
  }
  return out.str();
}

}  // namespace genquest::llm
