#include "genquest/persistence/event_store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "genquest/error.hpp"

namespace genquest::persistence {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void integrity_failure(std::string_view session_id, std::uint64_t sequence, const std::string& what) {
  throw Error(ErrorCode::integrity,
              "session " + std::string(session_id) + ": event stream corrupt at sequence " + std::to_string(sequence) +
                  ": " + what,
              {{"session_id", std::string(session_id)}, {"sequence", sequence}});
}

std::string encode_batch(std::span<const EventRecord> batch) {
  std::string buffer;
  for (const auto& record : batch) {
    buffer += serialize_line(record);
    buffer += '\n';
  }
  return buffer;
}

[[noreturn]] void storage_failure(const std::string& what, const fs::path& path) {
  throw Error(ErrorCode::storage, what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view data, const fs::path& path) {
  while (!data.empty()) {
    const ssize_t n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) {
        continue;
      }
      storage_failure("write failed for", path);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

void fsync_directory(const fs::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
}

json snapshot_to_json(const Snapshot& s) {
  return json{{"schema_version", kSchemaVersion}, {"sequence", s.sequence}, {"state", s.state}};
}

std::optional<Snapshot> snapshot_from_text(std::string_view content) {
  json j = json::parse(content, nullptr, false);
  if (j.is_discarded() || !j.is_object() || j.value("schema_version", 0) != kSchemaVersion ||
      !j.contains("sequence") || !j.contains("state")) {
    return std::nullopt;
  }
  return Snapshot{j.at("sequence").get<std::uint64_t>(), j.at("state")};
}

}  // namespace

bool is_valid_session_id(std::string_view session_id) {
  if (session_id.empty() || session_id.size() > 128) {
    return false;
  }
  return std::all_of(session_id.begin(), session_id.end(), [](char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_';
  });
}

DecodedStream decode_stream(std::string_view session_id, std::string_view content) {
  DecodedStream out;
  std::size_t pos = 0;
  std::uint64_t expected = 1;
  std::size_t committed_bytes = 0;
  std::size_t committed_count = 0;
  while (pos < content.size()) {
    const std::size_t newline = content.find('\n', pos);
    if (newline == std::string_view::npos) {
      out.discarded_tail = true;  // torn final write
      break;
    }
    const std::string_view line = content.substr(pos, newline - pos);
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      integrity_failure(session_id, expected, "line is not valid JSON");
    }
    EventRecord record;
    try {
      record = event_from_json(j);
      validate_payload(record.kind, record.payload);
    } catch (const Error& e) {
      integrity_failure(session_id, expected, e.what());
    }
    if (record.sequence != expected) {
      integrity_failure(session_id, expected, "found sequence " + std::to_string(record.sequence));
    }
    if (record.session_id != session_id) {
      integrity_failure(session_id, expected, "event belongs to session " + record.session_id);
    }
    out.events.push_back(std::move(record));
    pos = newline + 1;
    if (out.events.back().committed) {
      committed_bytes = pos;
      committed_count = out.events.size();
    }
    ++expected;
  }
  if (committed_count < out.events.size()) {
    out.events.resize(committed_count);
    out.discarded_tail = true;
  }
  out.committed_bytes = committed_bytes;
  return out;
}

// ---------------------------------------------------------------------------

FileEventStore::FileEventStore(fs::path root, bool sync) : root_(std::move(root)), sync_(sync) {
  std::error_code ec;
  fs::create_directories(root_ / "events", ec);
  fs::create_directories(root_ / "snapshots", ec);
  if (!fs::is_directory(root_ / "events")) {
    throw Error(ErrorCode::storage, "cannot create storage directory " + (root_ / "events").string());
  }
}

fs::path FileEventStore::event_path(std::string_view session_id) const {
  return root_ / "events" / (std::string(session_id) + ".jsonl");
}

fs::path FileEventStore::snapshot_path(std::string_view session_id) const {
  return root_ / "snapshots" / (std::string(session_id) + ".json");
}

void FileEventStore::append(std::string_view session_id, std::span<const EventRecord> batch) {
  if (!is_valid_session_id(session_id)) {
    throw Error(ErrorCode::validation, "invalid session id");
  }
  const fs::path path = event_path(session_id);
  std::error_code ec;
  const bool is_new = !fs::exists(path, ec);
  const int fd = ::open(path.c_str(), O_WRONLY | O_APPEND | O_CREAT | O_CLOEXEC, 0644);
  if (fd < 0) {
    storage_failure("cannot open event stream", path);
  }
  try {
    write_all(fd, encode_batch(batch), path);
    if (sync_ && ::fsync(fd) != 0) {
      storage_failure("fsync failed for", path);
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  if (sync_ && is_new) {
    fsync_directory(path.parent_path());
  }
}

std::string FileEventStore::read_content(std::string_view session_id) const {
  if (!exists(session_id)) {
    throw Error(ErrorCode::not_found, "session " + std::string(session_id) + " not found",
                {{"session_id", std::string(session_id)}});
  }
  const fs::path path = event_path(session_id);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    storage_failure("cannot read event stream", path);
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

DecodedStream FileEventStore::read(std::string_view session_id) const {
  return decode_stream(session_id, read_content(session_id));
}

void FileEventStore::discard_tail(std::string_view session_id) {
  const std::string content = read_content(session_id);
  const DecodedStream decoded = decode_stream(session_id, content);
  if (decoded.committed_bytes < content.size()) {
    const fs::path path = event_path(session_id);
    if (::truncate(path.c_str(), static_cast<off_t>(decoded.committed_bytes)) != 0) {
      storage_failure("cannot truncate event stream", path);
    }
  }
}

bool FileEventStore::exists(std::string_view session_id) const {
  if (!is_valid_session_id(session_id)) {
    return false;
  }
  std::error_code ec;
  return fs::exists(event_path(session_id), ec);
}

std::vector<std::string> FileEventStore::session_ids() const {
  std::vector<std::string> ids;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(root_ / "events", ec)) {
    if (entry.path().extension() == ".jsonl") {
      ids.push_back(entry.path().stem().string());
    }
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

void FileEventStore::write_snapshot(std::string_view session_id, const Snapshot& snapshot) {
  const fs::path path = snapshot_path(session_id);
  const fs::path tmp = path.string() + ".tmp";
  const std::string data = snapshot_to_json(snapshot).dump();
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) {
    storage_failure("cannot write snapshot", tmp);
  }
  try {
    write_all(fd, data, tmp);
    if (sync_) {
      ::fsync(fd);
    }
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::storage, "cannot install snapshot " + path.string() + ": " + ec.message());
  }
}

std::optional<Snapshot> FileEventStore::read_snapshot(std::string_view session_id) const {
  if (!is_valid_session_id(session_id)) {
    return std::nullopt;
  }
  std::ifstream in(snapshot_path(session_id), std::ios::binary);
  if (!in) {
    return std::nullopt;
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return snapshot_from_text(buffer.str());
}

// ---------------------------------------------------------------------------

void MemoryEventStore::append(std::string_view session_id, std::span<const EventRecord> batch) {
  std::lock_guard lock(mutex_);
  auto it = streams_.find(session_id);
  if (it == streams_.end()) {
    it = streams_.emplace(std::string(session_id), std::string()).first;
  }
  it->second += encode_batch(batch);
}

DecodedStream MemoryEventStore::read(std::string_view session_id) const {
  return decode_stream(session_id, raw(session_id));
}

void MemoryEventStore::discard_tail(std::string_view session_id) {
  std::lock_guard lock(mutex_);
  auto it = streams_.find(session_id);
  if (it == streams_.end()) {
    return;
  }
  const DecodedStream decoded = decode_stream(session_id, it->second);
  it->second.resize(decoded.committed_bytes);
}

bool MemoryEventStore::exists(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  return streams_.contains(session_id);
}

std::vector<std::string> MemoryEventStore::session_ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : streams_) {
    ids.push_back(id);
  }
  return ids;
}

void MemoryEventStore::write_snapshot(std::string_view session_id, const Snapshot& snapshot) {
  std::lock_guard lock(mutex_);
  snapshots_.insert_or_assign(std::string(session_id), snapshot);
}

std::optional<Snapshot> MemoryEventStore::read_snapshot(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  auto it = snapshots_.find(session_id);
  if (it == snapshots_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::string MemoryEventStore::raw(std::string_view session_id) const {
  std::lock_guard lock(mutex_);
  auto it = streams_.find(session_id);
  if (it == streams_.end()) {
    throw Error(ErrorCode::not_found, "session " + std::string(session_id) + " not found",
                {{"session_id", std::string(session_id)}});
  }
  return it->second;
}

void MemoryEventStore::set_raw(std::string_view session_id, std::string content) {
  std::lock_guard lock(mutex_);
  streams_.insert_or_assign(std::string(session_id), std::move(content));
}

}  // namespace genquest::persistence
