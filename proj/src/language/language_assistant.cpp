#include "genquest/language/language_assistant.hpp"

#include <algorithm>

#include "genquest/domain_json.hpp"
#include "genquest/error.hpp"
#include "genquest/language/context_window.hpp"
#include "genquest/language/query_log.hpp"
#include "genquest/text.hpp"

namespace genquest::language {

LanguageAssistant::LanguageAssistant(persistence::SessionRepository& repository, llm::Gateway& gateway,
                                     AssistantOptions options)
    : repository_(repository),
      gateway_(gateway),
      options_(std::move(options)),
      ids_(options_.id_seed ? IdGenerator(*options_.id_seed) : IdGenerator()) {
  if (!options_.clock) {
    options_.clock = system_now;
  }
}

QueryRecord LanguageAssistant::explain(std::string_view session_id, std::string_view segment_id,
                                       std::string_view selected_string, std::size_t selection_start,
                                       std::size_t selection_end) {
  const GameSession s = repository_.get(session_id);
  const PlotSegment* segment = s.find_segment(segment_id);
  if (segment == nullptr) {
    throw Error(ErrorCode::not_found, "segment " + std::string(segment_id) + " not found in session",
                {{"session_id", std::string(session_id)}, {"segment_id", std::string(segment_id)}});
  }
  const std::string& body = segment->text;
  const nlohmann::json offsets{{"selection_start", selection_start}, {"selection_end", selection_end}};
  if (selected_string.empty() || text::trim(selected_string).empty()) {
    throw Error(ErrorCode::validation, "selected_string is empty", {{"field", "selected_string"}});
  }
  if (selection_start >= selection_end || selection_end > body.size()) {
    throw Error(ErrorCode::validation, "selection offsets lie outside the segment text", offsets);
  }
  if (std::string_view(body).substr(selection_start, selection_end - selection_start) != selected_string) {
    auto details = offsets;
    details["field"] = "selected_string";
    throw Error(ErrorCode::validation, "selection offsets do not match selected_string", details);
  }
  if (!s.level()) {
    throw Error(ErrorCode::sequencing, "no proficiency level selected for this session");
  }

  const ContextWindow window = context_window(body, selection_start, selection_end, options_.context_cap);
  const std::string level(to_string(*s.level()));
  const auto reply = gateway_.complete(llm::ModelRole::language, "language_explain",
                                       {{"level", level}, {"selected", std::string(selected_string)},
                                        {"context", window.text}},
                                       session_id);

  QueryRecord record;
  record.query_id = ids_.next("q");
  record.session_id = std::string(session_id);
  record.segment_id = std::string(segment_id);
  record.selected_string = std::string(selected_string);
  record.selection_start = selection_start;
  record.selection_end = selection_end;
  record.context_window = window.text;
  record.level = *s.level();
  record.explanation = std::string(text::trim(reply.text));
  record.created_at = options_.clock();
  repository_.append_event(session_id, persistence::EventKind::query_explained, nlohmann::json(record));
  return record;
}

std::vector<QueryRecord> newest_first(std::vector<QueryRecord> records) {
  std::reverse(records.begin(), records.end());
  std::stable_sort(records.begin(), records.end(),
                   [](const QueryRecord& a, const QueryRecord& b) { return a.created_at > b.created_at; });
  return records;
}

QueryPage LanguageAssistant::list_queries(std::string_view session_id, std::size_t limit,
                                          std::optional<std::string> after) const {
  if (limit == 0) {
    throw Error(ErrorCode::validation, "limit must be positive", {{"field", "limit"}});
  }
  const auto ordered = newest_first(repository_.get(session_id).queries);
  std::size_t begin = 0;
  if (after) {
    auto it = std::find_if(ordered.begin(), ordered.end(),
                           [&](const QueryRecord& q) { return q.query_id == *after; });
    if (it == ordered.end()) {
      throw Error(ErrorCode::validation, "unknown pagination cursor '" + *after + "'", {{"field", "after"}});
    }
    begin = static_cast<std::size_t>(it - ordered.begin()) + 1;
  }
  QueryPage page;
  page.total = ordered.size();
  const std::size_t end = std::min(ordered.size(), begin + limit);
  page.items.assign(ordered.begin() + static_cast<std::ptrdiff_t>(begin),
                    ordered.begin() + static_cast<std::ptrdiff_t>(end));
  if (end < ordered.size()) {
    page.next_cursor = page.items.back().query_id;
  }
  return page;
}

std::vector<QueryRecord> LanguageAssistant::collect(std::optional<std::string> session_id) const {
  if (session_id) {
    return repository_.get(*session_id).queries;
  }
  std::vector<QueryRecord> all;
  for (const auto& summary : repository_.list_sessions()) {
    auto queries = repository_.get(summary.session_id).queries;
    all.insert(all.end(), std::make_move_iterator(queries.begin()), std::make_move_iterator(queries.end()));
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const QueryRecord& a, const QueryRecord& b) { return a.created_at < b.created_at; });
  return all;
}

void LanguageAssistant::export_log(std::ostream& out, std::optional<std::string> session_id) const {
  write_query_log(out, collect(std::move(session_id)));
}

}  // namespace genquest::language
