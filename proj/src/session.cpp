#include "ecu/session.hpp"

#include <fstream>
#include <sstream>

namespace ecu {

using nlohmann::json;

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> number_or_null(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json response_json(const SwitchResponse& r) {
  return {{"stage", r.stage}, {"direction", to_string(r.direction)}, {"switch_after_row", r.switch_after_row}};
}

SwitchResponse response_from(const json& j) {
  SwitchResponse r;
  r.stage = j.at("stage").get<int>();
  r.direction = parse_direction(j.at("direction").get<std::string>());
  r.switch_after_row = j.at("switch_after_row").get<int>();
  return r;
}

void expect_stage(const Session& s, std::initializer_list<Stage> allowed, const std::string& what) {
  for (auto st : allowed)
    if (s.stage == st) return;
  throw ServiceError("wrong_stage", what + " is not accepted in stage " + to_string(s.stage), 409);
}

std::size_t stage3_answered(const Session& s) {
  std::size_t n = 0;
  for (const auto& t : s.tasks) n += t.task.stage == 3;
  return n;
}

}  // namespace

ExperimentContent default_content() {
  ExperimentContent c;
  c.quiz = {
      {"How many tasks are there in total across the three stages?", {"10", "20", "28"}, 2},
      {"How many points are worth $1.00?", {"10", "100", "1000"}, 1},
      {"How many times may you switch between Option A and Option B within one table?", {"Never", "Once", "As often as I like"}, 1},
      {"How is your bonus determined?",
       {"By the total of all tasks", "By one randomly selected task played out", "By the last task"},
       1},
  };
  return c;
}

ExperimentContent parse_content(const std::string& text) {
  ExperimentContent c;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ServiceError("bad_content", std::string("content is not JSON: ") + e.what(), 500);
  }
  auto version = j.value("version", std::string(kContentVersion));
  if (version != kContentVersion) throw ServiceError("unknown_content_version", "unknown content version " + version, 500);
  if (j.contains("config")) {
    const auto& k = j.at("config");
    auto& cfg = c.config;
    if (k.contains("space")) cfg.space = OutcomeSpace(k["space"].at("w").get<double>(), k["space"].at("b").get<double>());
    cfg.stage1_increment = k.value("stage1_increment", cfg.stage1_increment);
    cfg.stage1_rows = k.value("stage1_rows", cfg.stage1_rows);
    cfg.stage1_safe = k.value("stage1_safe", cfg.stage1_safe);
    cfg.stage1_low = k.value("stage1_low", cfg.stage1_low);
    cfg.stage1_high = k.value("stage1_high", cfg.stage1_high);
    cfg.y_grid = k.value("y_grid", cfg.y_grid);
    cfg.epsilon = k.value("epsilon", cfg.epsilon);
    cfg.usd_per_point = k.value("usd_per_point", cfg.usd_per_point);
    cfg.show_up_fee_usd = k.value("show_up_fee_usd", cfg.show_up_fee_usd);
    cfg.fallback_d = k.value("fallback_d", cfg.fallback_d);
    cfg.fallback_tau = k.value("fallback_tau", cfg.fallback_tau);
  }
  c.config.validate();
  c.max_quiz_attempts = j.value("max_quiz_attempts", 5);
  if (!j.contains("quiz")) {
    c.quiz = default_content().quiz;
  } else {
    for (const auto& q : j.at("quiz"))
      c.quiz.push_back({q.at("text").get<std::string>(), q.at("options").get<std::vector<std::string>>(),
                        q.at("correct").get<int>()});
  }
  for (const auto& q : c.quiz)
    if (q.correct < 0 || q.correct >= static_cast<int>(q.options.size()))
      throw ServiceError("bad_content", "quiz answer index out of range", 500);
  return c;
}

ExperimentContent load_content(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ServiceError("bad_content", "cannot open content file " + path, 500);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_content(buf.str());
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Instructions: return "instructions";
    case Stage::Quiz: return "quiz";
    case Stage::S1: return "s1";
    case Stage::S2: return "s2";
    case Stage::S3: return "s3";
    case Stage::Review: return "review";
    case Stage::Done: return "done";
    case Stage::LockedOut: return "locked_out";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  for (auto st : {Stage::Instructions, Stage::Quiz, Stage::S1, Stage::S2, Stage::S3, Stage::Review, Stage::Done,
                  Stage::LockedOut})
    if (s == to_string(st)) return st;
  throw std::invalid_argument("unknown stage '" + std::string(s) + "'");
}

json to_json(const EventRecord& e) {
  return {{"session_id", e.session_id}, {"seq", e.seq}, {"timestamp", e.timestamp}, {"type", e.type},
          {"payload", e.payload}};
}

EventRecord event_from_json(const json& j) {
  return {j.at("session_id").get<std::string>(), j.at("seq").get<std::uint64_t>(),
          j.at("timestamp").get<std::string>(), j.at("type").get<std::string>(), j.at("payload")};
}

Session apply(const ExperimentContent& content, Session s, const EventRecord& e) {
  if (e.seq != s.last_seq + 1)
    throw ServiceError("sequence_gap", "event " + std::to_string(e.seq) + " after " + std::to_string(s.last_seq), 500);
  const auto& cfg = content.config;
  const auto& p = e.payload;

  if (e.type == "created") {
    if (s.last_seq != 0) throw ServiceError("already_created", "session already exists", 409);
    s.id = e.session_id;
    s.token = p.at("token").get<std::string>();
    s.seed = p.at("seed").get<std::uint64_t>();
    s.created_at = e.timestamp;
    s.content_version = p.at("content_version").get<std::string>();
    if (s.content_version != cfg.version)
      throw ServiceError("unknown_content_version", "unknown content version " + s.content_version, 400);
    s.stage = Stage::Instructions;
  } else if (e.type == "quiz") {
    expect_stage(s, {Stage::Instructions, Stage::Quiz}, "a quiz submission");
    auto answers = p.at("answers").get<std::vector<int>>();
    bool passed = answers.size() == content.quiz.size();
    for (std::size_t i = 0; passed && i < answers.size(); ++i) passed = answers[i] == content.quiz[i].correct;
    ++s.quiz_attempts_used;
    if (passed) {
      s.quiz_passed = true;
      s.stage = Stage::S1;
    } else {
      s.stage = s.quiz_attempts_used >= content.max_quiz_attempts ? Stage::LockedOut : Stage::Quiz;
    }
  } else if (e.type == "switch") {
    auto r = response_from(p);
    const Stage want = r.stage == 1 ? Stage::S1 : r.stage == 2 ? Stage::S2 : Stage::Done;
    if (want == Stage::Done) throw ServiceError("bad_request", "switch responses are for stage 1 or 2");
    if ((r.stage == 1 && s.stage1) || (r.stage == 2 && s.stage2))
      throw ServiceError("stage_already_answered", "stage " + std::to_string(r.stage) + " was already answered", 409);
    expect_stage(s, {want}, "a stage-" + std::to_string(r.stage) + " response");
    StageTable table = r.stage == 1 ? build_stage1(cfg) : build_stage2(s.estimates.d_used, cfg);
    try {
      r.validate(static_cast<int>(table.size()));
    } catch (const ExperimentError& err) {
      throw ServiceError("invalid_switch", err.what());
    }
    auto choices = expand(r, static_cast<int>(table.size()));
    for (std::size_t i = 0; i < table.size(); ++i) s.tasks.push_back({table[i], choices[i], e.timestamp, {}});
    if (r.stage == 1) {
      record_d(r, cfg, s.estimates);
      s.stage1 = r;
      s.stage = Stage::S2;
    } else {
      record_tau(r, cfg, s.estimates);
      s.stage2 = r;
      s.stage = Stage::S3;
    }
  } else if (e.type == "stage3") {
    expect_stage(s, {Stage::S3}, "a stage-3 choice");
    auto id = p.at("task_id").get<std::string>();
    auto choice = parse_choice(p.at("choice").get<std::string>());
    for (const auto& t : s.tasks)
      if (t.task.id == id) throw ServiceError("duplicate_answer", "task " + id + " was already answered", 409);
    auto table = build_stage3(s.estimates.d_used, s.estimates.tau_used, cfg);
    const auto next = stage3_answered(s);
    if (table[next].id != id)
      throw ServiceError("out_of_order", "expected task " + table[next].id + ", got " + id, 409);
    s.tasks.push_back({table[next], choice, e.timestamp, {}});
    if (next + 1 == table.size()) {
      s.payment = realize_payment(s.tasks, cfg, s.seed);
      s.stage = Stage::Review;
    }
  } else if (e.type == "review") {
    expect_stage(s, {Stage::Review}, "review confirmation");
    s.stage = Stage::Done;
  } else {
    throw ServiceError("unknown_event", "unknown event type " + e.type, 500);
  }
  s.last_seq = e.seq;
  return s;
}

Session replay(const ExperimentContent& content, const std::vector<EventRecord>& events) {
  Session s;
  for (const auto& e : events) s = apply(content, std::move(s), e);
  return s;
}

StageTable current_tasks(const ExperimentContent& content, const Session& s) {
  switch (s.stage) {
    case Stage::S1: return build_stage1(content.config);
    case Stage::S2: return build_stage2(s.estimates.d_used, content.config);
    case Stage::S3: {
      auto table = build_stage3(s.estimates.d_used, s.estimates.tau_used, content.config);
      return {table[stage3_answered(s)]};
    }
    default:
      throw ServiceError("wrong_stage", std::string("no tasks in stage ") + to_string(s.stage), 409);
  }
}

json to_json(const Session& s) {
  json tasks = json::array();
  for (const auto& t : s.tasks)
    tasks.push_back({{"id", t.task.id},
                     {"stage", t.task.stage},
                     {"row", t.task.row},
                     {"option_a", to_string(t.task.option_a)},
                     {"option_b", to_string(t.task.option_b)},
                     {"note", t.task.note},
                     {"choice", to_string(t.choice)},
                     {"timestamp", t.timestamp},
                     {"flags", t.flags}});
  const auto& e = s.estimates;
  json est = {{"d_lo", optional_number(e.d_lo)},         {"d_hi", optional_number(e.d_hi)},
              {"d_point", optional_number(e.d_point)},   {"tau_lo", optional_number(e.tau_lo)},
              {"tau_hi", optional_number(e.tau_hi)},     {"tau_point", optional_number(e.tau_point)},
              {"d_used", e.d_used},                      {"tau_used", e.tau_used},
              {"flags", e.flags}};
  json j = {{"id", s.id},
            {"token", s.token},
            {"created_at", s.created_at},
            {"seed", s.seed},
            {"content_version", s.content_version},
            {"quiz_attempts_used", s.quiz_attempts_used},
            {"quiz_passed", s.quiz_passed},
            {"stage", to_string(s.stage)},
            {"stage1", s.stage1 ? response_json(*s.stage1) : json(nullptr)},
            {"stage2", s.stage2 ? response_json(*s.stage2) : json(nullptr)},
            {"tasks", tasks},
            {"estimates", est},
            {"flags", s.flags},
            {"last_seq", s.last_seq}};
  if (s.payment)
    j["payment"] = {{"task_id", s.payment->task_id},
                    {"task_index", s.payment->task_index},
                    {"option", to_string(s.payment->option)},
                    {"points", s.payment->points},
                    {"usd", s.payment->usd}};
  else
    j["payment"] = nullptr;
  return j;
}

Session session_from_json(const json& j, const ExperimentConfig& config) {
  Session s;
  s.id = j.at("id").get<std::string>();
  s.token = j.at("token").get<std::string>();
  s.created_at = j.at("created_at").get<std::string>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.content_version = j.at("content_version").get<std::string>();
  s.quiz_attempts_used = j.at("quiz_attempts_used").get<int>();
  s.quiz_passed = j.at("quiz_passed").get<bool>();
  s.stage = parse_stage(j.at("stage").get<std::string>());
  if (!j.at("stage1").is_null()) s.stage1 = response_from(j.at("stage1"));
  if (!j.at("stage2").is_null()) s.stage2 = response_from(j.at("stage2"));
  for (const auto& t : j.at("tasks")) {
    ChoiceTask task{t.at("id").get<std::string>(), t.at("stage").get<int>(), t.at("row").get<int>(),
                    parse_lottery(t.at("option_a").get<std::string>(), config.space),
                    parse_lottery(t.at("option_b").get<std::string>(), config.space),
                    t.at("note").get<std::string>()};
    s.tasks.push_back({std::move(task), parse_choice(t.at("choice").get<std::string>()),
                       t.at("timestamp").get<std::string>(), t.at("flags").get<std::vector<std::string>>()});
  }
  const auto& e = j.at("estimates");
  s.estimates.d_lo = number_or_null(e, "d_lo");
  s.estimates.d_hi = number_or_null(e, "d_hi");
  s.estimates.d_point = number_or_null(e, "d_point");
  s.estimates.tau_lo = number_or_null(e, "tau_lo");
  s.estimates.tau_hi = number_or_null(e, "tau_hi");
  s.estimates.tau_point = number_or_null(e, "tau_point");
  s.estimates.d_used = e.at("d_used").get<double>();
  s.estimates.tau_used = e.at("tau_used").get<double>();
  s.estimates.flags = e.at("flags").get<std::vector<std::string>>();
  s.flags = j.at("flags").get<std::vector<std::string>>();
  s.last_seq = j.at("last_seq").get<std::uint64_t>();
  if (!j.at("payment").is_null()) {
    const auto& p = j.at("payment");
    s.payment = Payment{p.at("task_id").get<std::string>(), p.at("task_index").get<std::size_t>(),
                        parse_choice(p.at("option").get<std::string>()), p.at("points").get<double>(),
                        p.at("usd").get<double>()};
  }
  return s;
}

Transcript transcript_of(const Session& s) {
  Transcript t;
  t.session_id = s.id;
  t.tasks = s.tasks;
  t.estimates = s.estimates;
  t.payment = s.payment;
  t.flags = s.flags;
  return t;
}

}  // namespace ecu
