#pragma once

// The three-stage adaptive choice-list experiment: table builders, switch
// recording, synthetic participants and payment.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ecu/lottery.hpp"
#include "ecu/model.hpp"

namespace ecu {

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::string_view kContentVersion = "ecu-experiment/1";

struct ExperimentConfig {
  std::string version{kContentVersion};
  OutcomeSpace space{0.0, 800.0};
  double stage1_increment = 44.0;
  int stage1_rows = 10;
  // Stage-1 non-worst prizes: A pays `stage1_safe` w.p. 0.1, B pays
  // `stage1_low` and `stage1_high` w.p. 0.05 each.
  double stage1_safe = 300.0;
  double stage1_low = 200.0;
  double stage1_high = 400.0;
  std::vector<double> y_grid{0.05, 0.15, 0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95};
  double epsilon = 0.01;
  double usd_per_point = 0.01;
  double show_up_fee_usd = 6.0;
  bool single_switch = true;
  double fallback_d = 220.0;
  double fallback_tau = 0.5;

  void validate() const;
  int total_tasks() const { return stage1_rows + static_cast<int>(y_grid.size()) + 8; }
};

enum class Choice { A, B };
const char* to_string(Choice c);
Choice parse_choice(std::string_view s);

struct ChoiceTask {
  std::string id;
  int stage = 1;
  int row = 1;  // 1-based position within the stage
  Lottery option_a;
  Lottery option_b;
  std::string note;
  friend bool operator==(const ChoiceTask&, const ChoiceTask&) = default;
};

using StageTable = std::vector<ChoiceTask>;

enum class SwitchDirection { AThenB, BThenA, AllA, AllB };
const char* to_string(SwitchDirection d);
SwitchDirection parse_direction(std::string_view s);

/// One crossing: rows 1..k take the first option, the rest the other.
/// AllB has k = 0 and AllA has k = rows.
struct SwitchResponse {
  int stage = 1;
  SwitchDirection direction = SwitchDirection::AllA;
  int switch_after_row = 0;

  void validate(int rows) const;
  bool switched() const { return direction == SwitchDirection::AThenB || direction == SwitchDirection::BThenA; }
};

std::vector<Choice> expand(const SwitchResponse& r, int rows);

struct Crossing {
  SwitchResponse response;
  int crossings = 0;  // adjacent unequal pairs in the raw rows
};
/// Encodes raw row choices by their first crossing.
Crossing first_crossing(const std::vector<Choice>& rows, int stage);

struct ThresholdEstimates {
  std::optional<double> d_lo, d_hi, d_point;
  std::optional<double> tau_lo, tau_hi, tau_point;
  double d_used = 0.0;    // d driving Stage 2 and 3 (the point or the fallback)
  double tau_used = 0.0;  // tau driving Stage 3
  std::vector<std::string> flags;
};

StageTable build_stage1(const ExperimentConfig& config);
/// Sets the d fields of `est` (and d_used) from a Stage-1 response.
void record_d(const SwitchResponse& r, const ExperimentConfig& config, ThresholdEstimates& est);
StageTable build_stage2(double d, const ExperimentConfig& config);
void record_tau(const SwitchResponse& r, const ExperimentConfig& config, ThresholdEstimates& est);
StageTable build_stage3(double d, double tau, const ExperimentConfig& config);

/// Stage-3 task ids, in presentation order, and the four (first, second)
/// pairs among them.
const std::vector<std::string>& stage3_ids();
struct Stage3Pair {
  std::string name;  // "predicted-cc", "predicted-cr", "none-cc", "none-cr"
  std::string first;
  std::string second;
  bool predicted = false;
};
const std::vector<Stage3Pair>& stage3_pairs();

struct SimulatedChoice {
  Choice choice = Choice::A;
  bool tie = false;
};
SimulatedChoice simulate_choice(const EcuModel& model, const ChoiceTask& task);

struct TaskRecord {
  ChoiceTask task;
  Choice choice = Choice::A;
  std::string timestamp;
  std::vector<std::string> flags;
};

struct Payment {
  std::string task_id;
  std::size_t task_index = 0;
  Choice option = Choice::A;
  double points = 0.0;
  double usd = 0.0;
  friend bool operator==(const Payment&, const Payment&) = default;
};

/// Everything exported for one session.
struct Transcript {
  std::string session_id;
  std::vector<TaskRecord> tasks;
  ThresholdEstimates estimates;
  std::optional<Payment> payment;
  std::vector<std::string> flags;
};

/// Smallest prize whose cumulative probability (ascending prizes) exceeds u.
double draw_prize(const Lottery& p, double u);

/// Uniform pick over all answered tasks, then an inverse-CDF draw.
Payment realize_payment(const std::vector<TaskRecord>& tasks, const ExperimentConfig& config,
                        std::uint64_t seed);

/// Runs Stages 1-3 as a live session would, answering with the model.
Transcript simulate_session(const EcuModel& model, const ExperimentConfig& config, std::uint64_t seed,
                            std::string session_id = "sim");

/// Power-utility binary agent on the experiment's prize space: u concave,
/// v convex (so v < u inside), d strictly inside a Stage-1 gap, tau strictly
/// in (0.1, 0.9) inside the y grid and off its points.
struct Agent {
  EcuModel model;
  double d = 0.0;
  double tau = 0.0;
  double u_exponent = 1.0;
  double v_exponent = 1.0;
};
Agent random_binary_agent(std::mt19937_64& rng, const ExperimentConfig& config);
Agent random_eu_agent(std::mt19937_64& rng, const ExperimentConfig& config);

/// Transcript CSV: one row per task and one estimates row per session.
std::string transcript_csv(const std::vector<Transcript>& sessions);
std::vector<Transcript> parse_transcript_csv(std::string_view text, const ExperimentConfig& config);
const std::vector<std::string>& transcript_columns();

}  // namespace ecu
