#pragma once

// Persistent session registry: an append-only JSONL event log plus
// snapshots, with per-session serialization of mutations.

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "ecu/session.hpp"

namespace ecu {

/// Append-only log, one JSON event per line. An empty path keeps events in
/// memory only.
class EventLog {
 public:
  explicit EventLog(std::string path);

  /// Reads every complete record. A torn final line (no newline or not valid
  /// JSON) is discarded and cut from the file so later appends stay aligned.
  std::vector<EventRecord> load();
  void append(const EventRecord& e);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::mutex mu_;
};

struct CreatedSession {
  std::string id;
  std::string token;
  Stage stage;
};

class SessionService {
 public:
  using Clock = std::function<std::string()>;

  /// `store` is the log path; its snapshot lives next to it as
  /// `<store>.snapshot`. Existing state is recovered on construction.
  SessionService(ExperimentContent content, std::string store = {}, std::size_t snapshot_every = 64);

  const ExperimentContent& content() const { return content_; }

  CreatedSession create(std::optional<std::uint64_t> seed = std::nullopt);
  Session submit_quiz(const std::string& id, const std::string& token, const std::vector<int>& answers);
  Session submit_switch(const std::string& id, const std::string& token, const SwitchResponse& r);
  Session submit_stage3(const std::string& id, const std::string& token, const std::string& task_id, Choice c);
  /// Viewing the review page confirms it; the session moves to done.
  Session review(const std::string& id, const std::string& token);
  StageTable tasks(const std::string& id, const std::string& token);
  Session get(const std::string& id, const std::string& token);

  /// Unauthenticated accessors for operators and tests.
  Session peek(const std::string& id) const;
  std::vector<EventRecord> events(const std::string& id) const;
  std::vector<std::string> ids() const;

  /// Transcript CSV of every session that reached review or carries flags,
  /// ordered by session id.
  std::string export_csv() const;
  void snapshot() const;

  void set_clock(Clock c) { clock_ = std::move(c); }

 private:
  struct Entry {
    mutable std::mutex mu;
    Session state;
    std::vector<EventRecord> events;
  };

  Entry& find(const std::string& id) const;
  Entry& authorize(const std::string& id, const std::string& token) const;
  Session commit(Entry& entry, const std::string& type, nlohmann::json payload);
  void recover();

  ExperimentContent content_;
  std::string store_;
  std::size_t snapshot_every_;
  EventLog log_;
  Clock clock_;
  mutable std::shared_mutex map_mu_;
  std::map<std::string, std::unique_ptr<Entry>> sessions_;
  std::mutex count_mu_;
  std::size_t appended_ = 0;
};

std::string now_iso8601();
std::string random_hex(std::size_t bytes);

}  // namespace ecu
