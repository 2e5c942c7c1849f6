#pragma once

// Live session state, rebuilt by folding an append-only event stream.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ecu/experiment.hpp"
#include "json.hpp"

namespace ecu {

/// Machine-readable failure; `status` is the HTTP status the API uses.
class ServiceError : public std::runtime_error {
 public:
  ServiceError(std::string code, const std::string& message, int status = 400)
      : std::runtime_error(message), code_(std::move(code)), status_(status) {}
  const std::string& code() const { return code_; }
  int status() const { return status_; }

 private:
  std::string code_;
  int status_;
};

struct QuizQuestion {
  std::string text;
  std::vector<std::string> options;
  int correct = 0;
};

/// Versioned experiment content: table parameters plus the quiz.
struct ExperimentContent {
  ExperimentConfig config;
  std::vector<QuizQuestion> quiz;
  int max_quiz_attempts = 5;
};

ExperimentContent default_content();
ExperimentContent parse_content(const std::string& text);
ExperimentContent load_content(const std::string& path);

enum class Stage { Instructions, Quiz, S1, S2, S3, Review, Done, LockedOut };
const char* to_string(Stage s);
Stage parse_stage(std::string_view s);

struct EventRecord {
  std::string session_id;
  std::uint64_t seq = 0;
  std::string timestamp;
  std::string type;  // created | quiz | switch | stage3 | review
  nlohmann::json payload;
};

nlohmann::json to_json(const EventRecord& e);
EventRecord event_from_json(const nlohmann::json& j);

struct Session {
  std::string id;
  std::string token;
  std::string created_at;
  std::uint64_t seed = 0;
  std::string content_version;
  int quiz_attempts_used = 0;
  bool quiz_passed = false;
  Stage stage = Stage::Instructions;
  std::optional<SwitchResponse> stage1;
  std::optional<SwitchResponse> stage2;
  std::vector<TaskRecord> tasks;
  ThresholdEstimates estimates;
  std::optional<Payment> payment;
  std::vector<std::string> flags;
  std::uint64_t last_seq = 0;
};

/// Pure transition. Throws ServiceError when the event does not fit the
/// session's stage.
Session apply(const ExperimentContent& content, Session s, const EventRecord& e);
Session replay(const ExperimentContent& content, const std::vector<EventRecord>& events);

/// Tasks currently on screen: the full table in s1/s2, the next unanswered
/// task in s3. Throws ServiceError in any other stage.
StageTable current_tasks(const ExperimentContent& content, const Session& s);

nlohmann::json to_json(const Session& s);
Session session_from_json(const nlohmann::json& j, const ExperimentConfig& config);

Transcript transcript_of(const Session& s);

}  // namespace ecu
