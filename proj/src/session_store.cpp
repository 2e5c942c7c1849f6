#include "ecu/session_store.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

namespace ecu {

using nlohmann::json;
namespace fs = std::filesystem;

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto t = std::chrono::system_clock::to_time_t(now);
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", &tm);
  char out[40];
  std::snprintf(out, sizeof out, "%s.%03dZ", buf, static_cast<int>(ms));
  return out;
}

std::string random_hex(std::size_t bytes) {
  static thread_local std::random_device rd;
  static const char* digits = "0123456789abcdef";
  std::string s;
  s.reserve(bytes * 2);
  for (std::size_t i = 0; i < bytes; ++i) {
    const auto v = rd() & 0xffu;
    s += digits[v >> 4];
    s += digits[v & 0xf];
  }
  return s;
}

EventLog::EventLog(std::string path) : path_(std::move(path)) {}

std::vector<EventRecord> EventLog::load() {
  std::vector<EventRecord> out;
  if (path_.empty() || !fs::exists(path_)) return out;
  std::ifstream in(path_, std::ios::binary);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0, good_end = 0;
  while (pos < text.size()) {
    const auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    const auto line = text.substr(pos, nl - pos);
    if (!line.empty()) {
      try {
        out.push_back(event_from_json(json::parse(line)));
      } catch (const std::exception&) {
        break;
      }
    }
    pos = nl + 1;
    good_end = pos;
  }
  if (good_end < text.size()) fs::resize_file(path_, good_end);
  return out;
}

void EventLog::append(const EventRecord& e) {
  if (path_.empty()) return;
  const auto line = to_json(e).dump() + "\n";
  std::lock_guard lock(mu_);
  std::FILE* f = std::fopen(path_.c_str(), "ab");
  if (!f) throw ServiceError("storage", "cannot open event log " + path_, 500);
  const bool ok = std::fwrite(line.data(), 1, line.size(), f) == line.size() && std::fflush(f) == 0;
  std::fclose(f);
  if (!ok) throw ServiceError("storage", "short write to event log " + path_, 500);
}

SessionService::SessionService(ExperimentContent content, std::string store, std::size_t snapshot_every)
    : content_(std::move(content)),
      store_(std::move(store)),
      snapshot_every_(snapshot_every),
      log_(store_),
      clock_(now_iso8601) {
  if (!store_.empty()) {
    const auto dir = fs::path(store_).parent_path();
    if (!dir.empty()) fs::create_directories(dir);
    recover();
  }
}

void SessionService::recover() {
  const auto snap_path = store_ + ".snapshot";
  if (fs::exists(snap_path)) {
    std::ifstream in(snap_path);
    const auto j = json::parse(in);
    for (const auto& s : j.at("sessions")) {
      auto entry = std::make_unique<Entry>();
      entry->state = session_from_json(s, content_.config);
      sessions_[entry->state.id] = std::move(entry);
    }
  }
  for (auto& e : log_.load()) {
    auto& slot = sessions_[e.session_id];
    if (!slot) slot = std::make_unique<Entry>();
    if (e.seq <= slot->events.size()) continue;
    if (e.seq > slot->state.last_seq) slot->state = apply(content_, std::move(slot->state), e);
    slot->events.push_back(std::move(e));
  }
}

SessionService::Entry& SessionService::find(const std::string& id) const {
  std::shared_lock lock(map_mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw ServiceError("not_found", "no session " + id, 404);
  return *it->second;
}

SessionService::Entry& SessionService::authorize(const std::string& id, const std::string& token) const {
  auto& entry = find(id);
  std::lock_guard lock(entry.mu);
  if (token.empty() || token != entry.state.token) throw ServiceError("unauthorized", "bad session token", 401);
  return entry;
}

Session SessionService::commit(Entry& entry, const std::string& type, json payload) {
  Session out;
  {
    std::lock_guard lock(entry.mu);
    EventRecord e{entry.state.id, entry.state.last_seq + 1, clock_(), type, std::move(payload)};
    auto next = apply(content_, entry.state, e);
    log_.append(e);
    entry.state = std::move(next);
    entry.events.push_back(std::move(e));
    out = entry.state;
  }
  bool snap = false;
  {
    std::lock_guard lock(count_mu_);
    snap = !store_.empty() && snapshot_every_ > 0 && ++appended_ % snapshot_every_ == 0;
  }
  if (snap) snapshot();
  return out;
}

CreatedSession SessionService::create(std::optional<std::uint64_t> seed) {
  std::uint64_t s = 0;
  if (seed) {
    s = *seed;
  } else {
    std::random_device rd;
    s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  auto entry = std::make_unique<Entry>();
  auto* raw = entry.get();
  std::string id;
  {
    std::unique_lock lock(map_mu_);
    do id = random_hex(8);
    while (sessions_.count(id));
    raw->state.id = id;
    sessions_[id] = std::move(entry);
  }
  const auto token = random_hex(16);
  Session st;
  try {
    st = commit(*raw, "created", {{"token", token}, {"seed", s}, {"content_version", content_.config.version}});
  } catch (...) {
    std::unique_lock lock(map_mu_);
    sessions_.erase(id);
    throw;
  }
  return {st.id, st.token, st.stage};
}

Session SessionService::submit_quiz(const std::string& id, const std::string& token, const std::vector<int>& answers) {
  return commit(authorize(id, token), "quiz", {{"answers", answers}});
}

Session SessionService::submit_switch(const std::string& id, const std::string& token, const SwitchResponse& r) {
  return commit(authorize(id, token), "switch",
                {{"stage", r.stage}, {"direction", to_string(r.direction)}, {"switch_after_row", r.switch_after_row}});
}

Session SessionService::submit_stage3(const std::string& id, const std::string& token, const std::string& task_id,
                                      Choice c) {
  return commit(authorize(id, token), "stage3", {{"task_id", task_id}, {"choice", to_string(c)}});
}

Session SessionService::review(const std::string& id, const std::string& token) {
  auto& entry = authorize(id, token);
  {
    std::lock_guard lock(entry.mu);
    if (entry.state.stage == Stage::Done) return entry.state;
  }
  return commit(entry, "review", json::object());
}

StageTable SessionService::tasks(const std::string& id, const std::string& token) {
  auto& entry = authorize(id, token);
  std::lock_guard lock(entry.mu);
  return current_tasks(content_, entry.state);
}

Session SessionService::get(const std::string& id, const std::string& token) {
  auto& entry = authorize(id, token);
  std::lock_guard lock(entry.mu);
  return entry.state;
}

Session SessionService::peek(const std::string& id) const {
  auto& entry = find(id);
  std::lock_guard lock(entry.mu);
  return entry.state;
}

std::vector<EventRecord> SessionService::events(const std::string& id) const {
  auto& entry = find(id);
  std::lock_guard lock(entry.mu);
  return entry.events;
}

std::vector<std::string> SessionService::ids() const {
  std::shared_lock lock(map_mu_);
  std::vector<std::string> out;
  for (const auto& [id, _] : sessions_) out.push_back(id);
  return out;
}

std::string SessionService::export_csv() const {
  std::vector<Transcript> rows;
  std::shared_lock lock(map_mu_);
  for (const auto& [id, entry] : sessions_) {
    std::lock_guard elock(entry->mu);
    const auto& s = entry->state;
    const bool finished = s.stage == Stage::Review || s.stage == Stage::Done;
    const bool flagged = !s.flags.empty() || !s.estimates.flags.empty();
    if (finished || (flagged && !s.tasks.empty())) rows.push_back(transcript_of(s));
  }
  return transcript_csv(rows);
}

void SessionService::snapshot() const {
  if (store_.empty()) return;
  json sessions = json::array();
  {
    std::shared_lock lock(map_mu_);
    for (const auto& [id, entry] : sessions_) {
      std::lock_guard elock(entry->mu);
      if (entry->state.last_seq > 0) sessions.push_back(to_json(entry->state));
    }
  }
  const auto path = store_ + ".snapshot";
  const auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << json{{"sessions", sessions}}.dump() << "\n";
    if (!out) throw ServiceError("storage", "cannot write snapshot " + tmp, 500);
  }
  fs::rename(tmp, path);
}

}  // namespace ecu
