#pragma once

// Drives a SessionService session with a model's choices.

#include "ecu/session_store.hpp"

namespace ecu::testing {

inline std::vector<int> correct_answers(const ExperimentContent& c) {
  std::vector<int> a;
  for (const auto& q : c.quiz) a.push_back(q.correct);
  return a;
}

inline SwitchResponse respond(const EcuModel& model, const StageTable& table, int stage) {
  std::vector<Choice> rows;
  for (const auto& t : table) rows.push_back(simulate_choice(model, t).choice);
  return first_crossing(rows, stage).response;
}

/// Runs quiz, both lists and stage 3. Stops before review when `review` is
/// false; stops after `stop_after` submitted events when positive.
inline void drive(SessionService& svc, const CreatedSession& c, const EcuModel& model, bool review = true) {
  svc.submit_quiz(c.id, c.token, correct_answers(svc.content()));
  svc.submit_switch(c.id, c.token, respond(model, svc.tasks(c.id, c.token), 1));
  svc.submit_switch(c.id, c.token, respond(model, svc.tasks(c.id, c.token), 2));
  for (int i = 0; i < 8; ++i) {
    const auto t = svc.tasks(c.id, c.token).front();
    svc.submit_stage3(c.id, c.token, t.id, simulate_choice(model, t).choice);
  }
  if (review) svc.review(c.id, c.token);
}

}  // namespace ecu::testing
