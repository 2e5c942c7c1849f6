#include <filesystem>
#include <fstream>
#include <thread>

#include "catch_amalgamated.hpp"
#include "ecu/session_store.hpp"
#include "session_driver.hpp"
#include "support.hpp"

using namespace ecu;
namespace fs = std::filesystem;

namespace {

std::string code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const ServiceError& e) {
    return e.code();
  }
  return "";
}

fs::path temp_store(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ecu-test-" + name + "-" + random_hex(4));
  fs::create_directories(dir);
  return dir / "events.jsonl";
}

std::string fixed_clock() { return "2026-01-01T00:00:00.000Z"; }

EcuModel agent_model(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_binary_agent(rng, ExperimentConfig{}).model;
}

}  // namespace

TEST_CASE("session lifecycle") {
  SessionService svc(default_content());
  auto c = svc.create(42);
  CHECK(c.stage == Stage::Instructions);
  CHECK(svc.peek(c.id).quiz_attempts_used == 0);
  CHECK(svc.create().id != c.id);

  CHECK(code_of([&] { svc.tasks(c.id, c.token); }) == "wrong_stage");
  CHECK(code_of([&] { svc.get(c.id, "nope"); }) == "unauthorized");
  CHECK(code_of([&] { svc.get("feed", c.token); }) == "not_found");

  auto s = svc.submit_quiz(c.id, c.token, testing::correct_answers(svc.content()));
  CHECK(s.stage == Stage::S1);
  auto t1 = svc.tasks(c.id, c.token);
  REQUIRE(t1.size() == 10);
  CHECK(t1[0].option_a.min_prize() == 0);
  CHECK(code_of([&] { svc.submit_switch(c.id, c.token, {2, SwitchDirection::AThenB, 3}); }) == "wrong_stage");

  s = svc.submit_switch(c.id, c.token, {1, SwitchDirection::BThenA, 2});
  CHECK(*s.estimates.d_point == 132);
  CHECK(s.stage == Stage::S2);
  auto t2 = svc.tasks(c.id, c.token);
  CHECK(t2 == build_stage2(132, svc.content().config));
  CHECK(code_of([&] { svc.submit_switch(c.id, c.token, {1, SwitchDirection::BThenA, 3}); }) ==
        "stage_already_answered");
  CHECK(code_of([&] { svc.submit_switch(c.id, c.token, {2, SwitchDirection::AThenB, 11}); }) == "invalid_switch");

  s = svc.submit_switch(c.id, c.token, {2, SwitchDirection::AThenB, 5});
  CHECK(s.stage == Stage::S3);
  const auto ids = stage3_ids();
  CHECK(code_of([&] { svc.submit_stage3(c.id, c.token, ids[1], Choice::A); }) == "out_of_order");
  for (int i = 0; i < 3; ++i) svc.submit_stage3(c.id, c.token, ids[i], Choice::B);
  auto next = svc.tasks(c.id, c.token);
  REQUIRE(next.size() == 1);
  CHECK(next[0].id == ids[3]);
  CHECK(code_of([&] { svc.submit_stage3(c.id, c.token, ids[0], Choice::A); }) == "duplicate_answer");
  for (int i = 3; i < 8; ++i) s = svc.submit_stage3(c.id, c.token, ids[i], Choice::A);
  CHECK(s.stage == Stage::Review);
  REQUIRE(s.payment);
  CHECK(s.payment->usd == Catch::Approx(s.payment->points / 100 + 6));
  CHECK(s.tasks.size() == 28);

  s = svc.review(c.id, c.token);
  CHECK(s.stage == Stage::Done);
  CHECK(svc.review(c.id, c.token).last_seq == s.last_seq);
}

TEST_CASE("quiz lockout") {
  SessionService svc(default_content());
  auto c = svc.create(1);
  std::vector<int> wrong(svc.content().quiz.size(), -1);
  for (int i = 0; i < 4; ++i) CHECK(svc.submit_quiz(c.id, c.token, wrong).stage == Stage::Quiz);
  CHECK(svc.submit_quiz(c.id, c.token, wrong).stage == Stage::LockedOut);
  CHECK(code_of([&] { svc.submit_quiz(c.id, c.token, testing::correct_answers(svc.content())); }) == "wrong_stage");
}

TEST_CASE("stage 1 without a switch is flagged and uses the fallback d") {
  SessionService svc(default_content());
  auto c = svc.create(1);
  svc.submit_quiz(c.id, c.token, testing::correct_answers(svc.content()));
  auto s = svc.submit_switch(c.id, c.token, {1, SwitchDirection::AllA, 10});
  CHECK_FALSE(s.estimates.d_point);
  CHECK(s.estimates.d_used == 220);
  CHECK_FALSE(s.estimates.flags.empty());
  CHECK(svc.tasks(c.id, c.token) == build_stage2(220, svc.content().config));
}

TEST_CASE("same seed gives the same payment") {
  SessionService a(default_content()), b(default_content());
  auto m = agent_model(3);
  auto ca = a.create(99), cb = b.create(99);
  testing::drive(a, ca, m);
  testing::drive(b, cb, m);
  CHECK(*a.peek(ca.id).payment == *b.peek(cb.id).payment);
}

TEST_CASE("replay reproduces the live state") {
  SessionService svc(default_content());
  for (std::uint64_t i = 0; i < 20; ++i) {
    auto c = svc.create(i);
    testing::drive(svc, c, agent_model(i), i % 2 == 0);
    auto replayed = replay(svc.content(), svc.events(c.id));
    CHECK(to_json(replayed) == to_json(svc.peek(c.id)));
    CHECK(to_json(session_from_json(to_json(replayed), svc.content().config)) == to_json(replayed));
  }
}

TEST_CASE("events must be contiguous") {
  auto content = default_content();
  EventRecord created{"x", 1, "t", "created", {{"token", "k"}, {"seed", 1}, {"content_version", content.config.version}}};
  auto s = apply(content, Session{}, created);
  EventRecord skip{"x", 3, "t", "review", nlohmann::json::object()};
  CHECK(code_of([&] { apply(content, s, skip); }) == "sequence_gap");
  EventRecord unknown{"x", 1, "t", "created", {{"token", "k"}, {"seed", 1}, {"content_version", "v0"}}};
  CHECK(code_of([&] { apply(content, Session{}, unknown); }) == "unknown_content_version");
}

TEST_CASE("store survives restart and a torn final record") {
  const auto path = temp_store("restart");
  std::string id, token;
  nlohmann::json before;
  {
    SessionService svc(default_content(), path.string(), 5);
    auto c = svc.create(7);
    id = c.id;
    token = c.token;
    svc.submit_quiz(id, token, testing::correct_answers(svc.content()));
    svc.submit_switch(id, token, {1, SwitchDirection::BThenA, 4});
    before = to_json(svc.peek(id));
  }
  {
    // Simulate a crash halfway through writing the next record.
    std::ofstream out(path, std::ios::app);
    out << R"({"session_id":")" << id << R"(","seq":4,"timestamp":"x","type":"sw)";
  }
  SessionService svc(default_content(), path.string(), 5);
  CHECK(to_json(svc.peek(id)) == before);
  auto s = svc.submit_switch(id, token, {2, SwitchDirection::AThenB, 6});
  CHECK(s.last_seq == 4);
  SessionService again(default_content(), path.string(), 5);
  auto events = again.events(id);
  REQUIRE(events.size() == 4);
  for (std::size_t i = 0; i < events.size(); ++i) CHECK(events[i].seq == i + 1);
  CHECK(to_json(again.peek(id)) == to_json(svc.peek(id)));
  fs::remove_all(path.parent_path());
}

TEST_CASE("snapshot plus log tail recovers the same state") {
  const auto path = temp_store("snapshot");
  std::vector<std::string> ids;
  std::map<std::string, nlohmann::json> states;
  {
    SessionService svc(default_content(), path.string(), 7);
    for (std::uint64_t i = 0; i < 6; ++i) {
      auto c = svc.create(i);
      testing::drive(svc, c, agent_model(i + 100), i % 3 != 0);
      ids.push_back(c.id);
    }
    for (const auto& id : ids) states[id] = to_json(svc.peek(id));
  }
  REQUIRE(fs::exists(path.string() + ".snapshot"));
  SessionService svc(default_content(), path.string());
  for (const auto& id : ids) CHECK(to_json(svc.peek(id)) == states[id]);
  fs::remove_all(path.parent_path());
}

TEST_CASE("interleaved sessions match serial runs") {
  auto run_serial = [](std::uint64_t seed) {
    SessionService svc(default_content());
    svc.set_clock(fixed_clock);
    auto c = svc.create(seed);
    testing::drive(svc, c, agent_model(seed));
    auto t = transcript_of(svc.peek(c.id));
    t.session_id = "x";
    return transcript_csv({t});
  };
  SessionService svc(default_content());
  svc.set_clock(fixed_clock);
  auto a = svc.create(11), b = svc.create(12);
  std::thread ta([&] { testing::drive(svc, a, agent_model(11)); });
  std::thread tb([&] { testing::drive(svc, b, agent_model(12)); });
  ta.join();
  tb.join();
  auto ta_t = transcript_of(svc.peek(a.id)), tb_t = transcript_of(svc.peek(b.id));
  ta_t.session_id = tb_t.session_id = "x";
  CHECK(transcript_csv({ta_t}) == run_serial(11));
  CHECK(transcript_csv({tb_t}) == run_serial(12));
}

TEST_CASE("export") {
  SessionService svc(default_content());
  const auto header = transcript_csv({});
  CHECK(svc.export_csv() == header);
  auto c = svc.create(5);
  testing::drive(svc, c, agent_model(5));
  svc.create(6);  // unfinished, not exported
  auto csv = svc.export_csv();
  CHECK(csv == svc.export_csv());
  auto sessions = parse_transcript_csv(csv, svc.content().config);
  REQUIRE(sessions.size() == 1);
  CHECK(sessions[0].tasks.size() == 28);
  CHECK(sessions[0].payment);
  int task_rows = 0, estimate_rows = 0;
  std::istringstream in(csv);
  std::string line;
  while (std::getline(in, line)) {
    task_rows += line.find(",task,") != std::string::npos;
    estimate_rows += line.find(",estimates,") != std::string::npos;
  }
  CHECK(task_rows == 28);
  CHECK(estimate_rows == 1);
}

TEST_CASE("content file") {
  auto c = parse_content(R"({"version":"ecu-experiment/1","quiz":[{"text":"q","options":["a","b"],"correct":1}]})");
  CHECK(c.quiz.size() == 1);
  CHECK(c.config.stage1_rows == 10);
  CHECK(code_of([] { parse_content(R"({"version":"v9"})"); }) == "unknown_content_version");
  CHECK(code_of([] { parse_content(R"({"quiz":[{"text":"q","options":["a"],"correct":3}]})"); }) == "bad_content");
}
