#include "genquest/story/structured_output.hpp"

#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "genquest/text.hpp"

namespace genquest::story {

namespace {

struct Field {
  std::string label;               // upper-cased label word, e.g. MILESTONE
  std::vector<std::size_t> index;  // numbers after the label, e.g. {1, 2} for "DECISION 1.2"
  std::string value;
};

// "LABEL n(.m)*: value" with an optional leading list marker.
const std::regex& label_pattern() {
  static const std::regex re(R"(^\s*(?:[-*]\s*)?\**([A-Za-z][A-Za-z0-9]*)((?:\s+\d+(?:\.\d+)*)?)\**\s*:\s*(.*)$)");
  return re;
}

std::vector<std::size_t> parse_index(std::string_view digits) {
  std::vector<std::size_t> out;
  const auto trimmed = text::trim(digits);
  if (trimmed.empty()) {
    return out;
  }
  for (const auto& part : text::split(trimmed, '.')) {
    out.push_back(static_cast<std::size_t>(std::stoul(part)));
  }
  return out;
}

std::vector<Field> parse_fields(std::string_view body, const std::vector<std::string>& known_labels) {
  std::vector<Field> fields;
  for (const auto& raw : text::split(body, '\n')) {
    std::smatch m;
    const std::string line(raw);
    bool is_label = false;
    if (std::regex_match(line, m, label_pattern())) {
      std::string label;
      for (char c : m[1].str()) {
        label += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
      }
      for (const auto& known : known_labels) {
        if (label == known) {
          fields.push_back({label, parse_index(m[2].str()), std::string(text::trim(m[3].str()))});
          is_label = true;
          break;
        }
      }
    }
    if (is_label) {
      continue;
    }
    if (fields.empty()) {
      continue;  // preamble before the first label
    }
    const auto trimmed = text::trim(raw);
    auto& value = fields.back().value;
    if (trimmed.empty()) {
      if (!value.empty() && value.back() != '\n') {
        value += "\n";
      }
    } else {
      if (!value.empty() && value.back() != '\n') {
        value += ' ';
      }
      value += trimmed;
    }
  }
  for (auto& f : fields) {
    f.value = std::string(text::trim(f.value));
  }
  return fields;
}

[[noreturn]] void fail(const std::string& message) { throw FormatError(message); }

}  // namespace

std::string_view fenced_body(std::string_view reply) {
  const std::size_t open = reply.find("```");
  if (open == std::string_view::npos) {
    return reply;
  }
  const std::size_t line_end = reply.find('\n', open);
  if (line_end == std::string_view::npos) {
    return reply;
  }
  const std::size_t close = reply.find("```", line_end + 1);
  if (close == std::string_view::npos) {
    return reply.substr(line_end + 1);
  }
  return reply.substr(line_end + 1, close - line_end - 1);
}

StoryOutline parse_outline(std::string_view reply, const GameConfig& config) {
  const auto fields = parse_fields(fenced_body(reply), {"MILESTONE", "DECISION", "ENDING"});
  std::map<std::size_t, std::string> milestones;
  std::map<std::pair<std::size_t, std::size_t>, std::string> decisions;
  std::map<std::size_t, std::string> endings;
  for (const auto& f : fields) {
    if (f.value.empty()) {
      fail(f.label + " entry is empty");
    }
    if (f.label == "MILESTONE" && f.index.size() == 1) {
      milestones[f.index[0]] = f.value;
    } else if (f.label == "DECISION" && f.index.size() == 2) {
      decisions[{f.index[0], f.index[1]}] = f.value;
    } else if (f.label == "ENDING" && f.index.size() == 1) {
      endings[f.index[0]] = f.value;
    } else {
      fail(f.label + " entry has a malformed number");
    }
  }
  StoryOutline outline;
  for (std::size_t i = 1; i <= config.milestone_count; ++i) {
    auto it = milestones.find(i);
    if (it == milestones.end()) {
      fail("MILESTONE " + std::to_string(i) + " is missing");
    }
    outline.milestones.push_back(it->second);
    std::vector<std::string> slots;
    for (std::size_t j = 1; j <= config.decisions_per_milestone; ++j) {
      auto d = decisions.find({i, j});
      if (d == decisions.end()) {
        fail("DECISION " + std::to_string(i) + "." + std::to_string(j) + " is missing");
      }
      slots.push_back(d->second);
    }
    outline.decision_slots.push_back(std::move(slots));
  }
  for (std::size_t k = 1; k <= config.ending_count; ++k) {
    auto it = endings.find(k);
    if (it == endings.end()) {
      fail("ENDING " + std::to_string(k) + " is missing");
    }
    outline.endings.push_back(it->second);
  }
  if (milestones.size() != config.milestone_count || decisions.size() != config.decision_total() ||
      endings.size() != config.ending_count) {
    fail("outline has more entries than requested");
  }
  return outline;
}

ParsedSegment parse_segment(std::string_view reply, std::size_t option_count) {
  const auto fields = parse_fields(fenced_body(reply), {"TEXT", "OPTION"});
  ParsedSegment out;
  std::map<std::size_t, std::string> options;
  for (const auto& f : fields) {
    if (f.label == "TEXT") {
      if (!out.text.empty()) {
        fail("more than one TEXT entry");
      }
      out.text = f.value;
    } else if (f.index.size() == 1) {
      if (f.value.empty()) {
        fail("OPTION " + std::to_string(f.index[0]) + " is empty");
      }
      options[f.index[0]] = f.value;
    } else {
      fail("OPTION entry has a malformed number");
    }
  }
  if (out.text.empty()) {
    fail("TEXT is missing or empty");
  }
  for (std::size_t k = 1; k <= option_count; ++k) {
    auto it = options.find(k);
    if (it == options.end()) {
      fail("OPTION " + std::to_string(k) + " is missing");
    }
    out.options.push_back(it->second);
  }
  if (options.size() != option_count) {
    fail("expected exactly " + std::to_string(option_count) + " options, got " + std::to_string(options.size()));
  }
  return out;
}

std::string parse_ending(std::string_view reply) {
  const auto body = fenced_body(reply);
  const auto fields = parse_fields(body, {"TEXT"});
  std::string out = fields.empty() ? std::string(text::trim(body)) : fields.front().value;
  if (out.empty()) {
    fail("ending text is empty");
  }
  return out;
}

std::vector<ProficiencySample> parse_samples(std::string_view reply) {
  const auto fields = parse_fields(fenced_body(reply), {"A1", "A2", "B1", "B2", "C1", "C2"});
  std::map<CefrLevel, std::string> by_level;
  for (const auto& f : fields) {
    const auto level = parse_cefr(f.label);
    if (by_level.contains(level)) {
      fail("level " + f.label + " appears twice");
    }
    if (f.value.empty()) {
      fail("sample for " + f.label + " is empty");
    }
    by_level[level] = f.value;
  }
  std::vector<ProficiencySample> out;
  for (CefrLevel level : kAllCefrLevels) {
    auto it = by_level.find(level);
    if (it == by_level.end()) {
      fail("sample for " + std::string(to_string(level)) + " is missing");
    }
    out.push_back({level, it->second});
  }
  return out;
}

std::string render_outline(const StoryOutline& outline) {
  std::ostringstream out;
  for (std::size_t i = 0; i < outline.milestones.size(); ++i) {
    out << "MILESTONE " << i + 1 << ": " << outline.milestones[i] << "\n";
    if (i < outline.decision_slots.size()) {
      for (std::size_t j = 0; j < outline.decision_slots[i].size(); ++j) {
        out << "DECISION " << i + 1 << "." << j + 1 << ": " << outline.decision_slots[i][j] << "\n";
      }
    }
  }
  for (std::size_t k = 0; k < outline.endings.size(); ++k) {
    out << "ENDING " << k + 1 << ": " << outline.endings[k] << "\n";
  }
  return out.str();
}

}  // namespace genquest::story
