#include "ecu/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "ecu/utility_curve.hpp"

namespace ecu {

namespace {

std::string row_id(int stage, int row) { return "s" + std::to_string(stage) + "-r" + std::to_string(row); }

// Probabilities like 1 - 0.55 are snapped to a 1e-12 lattice so tables print
// as 0.45 rather than 0.44999999999999996.
Lottery lot(const ExperimentConfig& c, std::vector<Outcome> pairs) {
  for (auto& o : pairs) o.prob = std::round(o.prob * 1e12) / 1e12;
  return make_lottery(std::move(pairs), c.space);
}

}  // namespace

void ExperimentConfig::validate() const {
  if (stage1_increment <= 0) throw ExperimentError("stage-1 increment must be positive");
  if (stage1_rows < 2) throw ExperimentError("stage 1 needs at least two rows");
  if (y_grid.size() < 2) throw ExperimentError("stage 2 needs at least two rows");
  for (std::size_t i = 0; i < y_grid.size(); ++i) {
    if (!(y_grid[i] > 0.0 && y_grid[i] < 1.0)) throw ExperimentError("y grid must lie inside (0, 1)");
    if (i && !(y_grid[i] > y_grid[i - 1])) throw ExperimentError("y grid must be strictly increasing");
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ExperimentError("epsilon must lie in (0, 1)");
  double top_worst = stage1_increment * (stage1_rows - 1);
  for (double x : {stage1_safe, stage1_low, stage1_high, top_worst})
    if (!space.contains(x)) throw ExperimentError("stage-1 prize outside the point space");
  if (!space.contains(fallback_d) || fallback_d >= space.best) throw ExperimentError("fallback d outside [w, b)");
  if (!(fallback_tau >= 0.0 && fallback_tau + epsilon < 1.0)) throw ExperimentError("fallback tau infeasible");
}

const char* to_string(Choice c) { return c == Choice::A ? "A" : "B"; }

Choice parse_choice(std::string_view s) {
  if (s == "A") return Choice::A;
  if (s == "B") return Choice::B;
  throw ExperimentError("choice must be A or B, got '" + std::string(s) + "'");
}

const char* to_string(SwitchDirection d) {
  switch (d) {
    case SwitchDirection::AThenB: return "A-then-B";
    case SwitchDirection::BThenA: return "B-then-A";
    case SwitchDirection::AllA: return "all-A";
    case SwitchDirection::AllB: return "all-B";
  }
  return "?";
}

SwitchDirection parse_direction(std::string_view s) {
  for (auto d : {SwitchDirection::AThenB, SwitchDirection::BThenA, SwitchDirection::AllA, SwitchDirection::AllB})
    if (s == to_string(d)) return d;
  throw ExperimentError("unknown switch direction '" + std::string(s) + "'");
}

void SwitchResponse::validate(int rows) const {
  const int k = switch_after_row;
  switch (direction) {
    case SwitchDirection::AllA:
      if (k != rows) throw ExperimentError("all-A responses have switch_after_row = rows");
      break;
    case SwitchDirection::AllB:
      if (k != 0) throw ExperimentError("all-B responses have switch_after_row = 0");
      break;
    default:
      if (k < 1 || k >= rows) throw ExperimentError("switch row must lie in 1..rows-1");
  }
}

std::vector<Choice> expand(const SwitchResponse& r, int rows) {
  r.validate(rows);
  std::vector<Choice> out(static_cast<std::size_t>(rows));
  for (int i = 0; i < rows; ++i) {
    switch (r.direction) {
      case SwitchDirection::AllA: out[i] = Choice::A; break;
      case SwitchDirection::AllB: out[i] = Choice::B; break;
      case SwitchDirection::AThenB: out[i] = i < r.switch_after_row ? Choice::A : Choice::B; break;
      case SwitchDirection::BThenA: out[i] = i < r.switch_after_row ? Choice::B : Choice::A; break;
    }
  }
  return out;
}

Crossing first_crossing(const std::vector<Choice>& rows, int stage) {
  if (rows.empty()) throw ExperimentError("no rows");
  Crossing c;
  c.response.stage = stage;
  const int n = static_cast<int>(rows.size());
  int first = 0;
  for (int i = 1; i < n; ++i)
    if (rows[i] != rows[i - 1]) {
      if (!first) first = i;
      ++c.crossings;
    }
  if (!first) {
    c.response.direction = rows[0] == Choice::A ? SwitchDirection::AllA : SwitchDirection::AllB;
    c.response.switch_after_row = rows[0] == Choice::A ? n : 0;
  } else {
    c.response.direction = rows[0] == Choice::A ? SwitchDirection::AThenB : SwitchDirection::BThenA;
    c.response.switch_after_row = first;
  }
  return c;
}

StageTable build_stage1(const ExperimentConfig& c) {
  c.validate();
  StageTable t;
  for (int r = 1; r <= c.stage1_rows; ++r) {
    double z = c.stage1_increment * (r - 1);
    t.push_back({row_id(1, r), 1, r, lot(c, {{c.stage1_safe, 0.1}, {z, 0.9}}),
                 lot(c, {{c.stage1_high, 0.05}, {c.stage1_low, 0.05}, {z, 0.9}}), {}});
  }
  return t;
}

void record_d(const SwitchResponse& r, const ExperimentConfig& c, ThresholdEstimates& est) {
  if (r.stage != 1) throw ExperimentError("record_d needs a stage-1 response");
  r.validate(c.stage1_rows);
  if (r.switched()) {
    const int k = r.switch_after_row;
    est.d_lo = c.stage1_increment * k;
    est.d_hi = c.stage1_increment * (k + 1);
    est.d_point = est.d_hi;
    est.d_used = *est.d_point;
    if (est.d_used >= c.space.best) throw ExperimentError("recorded d reaches the top prize");
  } else {
    est.d_lo = est.d_hi = est.d_point = std::nullopt;
    est.d_used = c.fallback_d;
    est.flags.push_back("d-outside-tested-range");
    est.flags.push_back("d-untested");
  }
}

StageTable build_stage2(double d, const ExperimentConfig& c) {
  c.validate();
  const double b = c.space.best;
  if (!(d >= c.space.worst && d < b)) throw ExperimentError("stage 2 needs w <= d < b");
  StageTable t;
  for (std::size_t i = 0; i < c.y_grid.size(); ++i) {
    const double y = c.y_grid[i];
    const int r = static_cast<int>(i) + 1;
    t.push_back({row_id(2, r), 2, r, lot(c, {{d + (b - d) / 2, 1 - y}, {0.0, y}}),
                 lot(c, {{d + 3 * (b - d) / 4, (1 - y) / 2}, {d + (b - d) / 4, (1 - y) / 2}, {0.0, y}}), {}});
  }
  return t;
}

void record_tau(const SwitchResponse& r, const ExperimentConfig& c, ThresholdEstimates& est) {
  if (r.stage != 2) throw ExperimentError("record_tau needs a stage-2 response");
  const int rows = static_cast<int>(c.y_grid.size());
  r.validate(rows);
  if (r.switched()) {
    const int k = r.switch_after_row;
    est.tau_lo = c.y_grid[k - 1];
    est.tau_hi = c.y_grid[k];
    est.tau_point = 0.5 * (*est.tau_lo + *est.tau_hi);
    est.tau_used = *est.tau_point;
  } else {
    est.tau_lo = est.tau_hi = est.tau_point = std::nullopt;
    est.tau_used = c.fallback_tau;
    est.flags.push_back("tau-untested");
  }
}

const std::vector<std::string>& stage3_ids() {
  static const std::vector<std::string> ids{"s3-pcc1", "s3-pcc2", "s3-pcr1", "s3-pcr2",
                                            "s3-ncc1", "s3-ncc2", "s3-ncr1", "s3-ncr2"};
  return ids;
}

const std::vector<Stage3Pair>& stage3_pairs() {
  static const std::vector<Stage3Pair> pairs{{"predicted-cc", "s3-pcc1", "s3-pcc2", true},
                                             {"predicted-cr", "s3-pcr1", "s3-pcr2", true},
                                             {"none-cc", "s3-ncc1", "s3-ncc2", false},
                                             {"none-cr", "s3-ncr1", "s3-ncr2", false}};
  return pairs;
}

StageTable build_stage3(double d, double tau, const ExperimentConfig& c) {
  c.validate();
  const double b = c.space.best, e = c.epsilon;
  if (!(d >= c.space.worst && d < b)) throw ExperimentError("stage 3 needs w <= d < b");
  if (!(tau >= 0.0 && tau + e < 1.0)) throw ExperimentError("stage 3 needs 0 <= tau and tau + epsilon < 1");
  const double mid = d + (b - d) / 2;
  const double top = d + 3 * (b - d) / 4;
  const double keep = 1 - tau - e;
  const double half = keep / 2;
  const double base = (b + d) / 2;
  const double ncc_lo = d / 10 + base, ncc_hi = d / 5 + base;
  const double ncr_lo = (d + e) / 4 + base, ncr_hi = (d + e) / 3 + base;
  if (ncc_hi > b || ncr_hi > b) throw ExperimentError("stage-3 prizes exceed b for this d");

  const std::string no_allais_note =
      "built as displayed; the prize 0 is disappointing, so not every prize lies above d";
  std::vector<std::pair<Lottery, Lottery>> opts{
      {lot(c, {{mid, 1}}), lot(c, {{top, half}, {mid, tau + e}, {0, half}})},
      {lot(c, {{mid, keep}, {0, tau + e}}), lot(c, {{top, half}, {0, 1 - half}})},
      {lot(c, {{b, 0.8}, {0, 0.2}}), lot(c, {{mid, 1}})},
      {lot(c, {{b, 0.8 * keep}, {0, 1 - 0.8 * keep}}), lot(c, {{mid, keep}, {0, tau + e}})},
      {lot(c, {{ncc_lo, 1}}), lot(c, {{ncc_hi, 0.5}, {ncc_lo, 0.1}, {0, 0.4}})},
      {lot(c, {{ncc_lo, 0.9}, {0, 0.1}}), lot(c, {{ncc_hi, 0.5}, {0, 0.5}})},
      {lot(c, {{ncr_lo, 1}}), lot(c, {{ncr_hi, 0.5}, {0, 0.5}})},
      {lot(c, {{ncr_lo, 0.9}, {0, 0.1}}), lot(c, {{ncr_hi, 0.45}, {0, 0.55}})},
  };
  StageTable t;
  for (std::size_t i = 0; i < opts.size(); ++i) {
    t.push_back({stage3_ids()[i], 3, static_cast<int>(i) + 1, std::move(opts[i].first),
                 std::move(opts[i].second), i >= 4 ? no_allais_note : std::string()});
  }
  return t;
}

SimulatedChoice simulate_choice(const EcuModel& model, const ChoiceTask& task) {
  double gap = evaluate(model, task.option_a) - evaluate(model, task.option_b);
  if (gap > kIndifferenceTolerance) return {Choice::A, false};
  if (gap < -kIndifferenceTolerance) return {Choice::B, false};
  return {Choice::A, true};
}

double draw_prize(const Lottery& p, double u) {
  double cum = 0.0;
  for (const auto& o : p.support()) {
    cum += o.prob;
    if (u < cum) return o.prize;
  }
  return p.max_prize();
}

Payment realize_payment(const std::vector<TaskRecord>& tasks, const ExperimentConfig& c, std::uint64_t seed) {
  if (static_cast<int>(tasks.size()) != c.total_tasks())
    throw ExperimentError("incomplete session: " + std::to_string(tasks.size()) + " of " +
                          std::to_string(c.total_tasks()) + " tasks answered");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, tasks.size() - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Payment pay;
  pay.task_index = pick(rng);
  const auto& rec = tasks[pay.task_index];
  pay.task_id = rec.task.id;
  pay.option = rec.choice;
  pay.points = draw_prize(rec.choice == Choice::A ? rec.task.option_a : rec.task.option_b, unit(rng));
  pay.usd = pay.points * c.usd_per_point + c.show_up_fee_usd;
  return pay;
}

Transcript simulate_session(const EcuModel& model, const ExperimentConfig& c, std::uint64_t seed,
                            std::string session_id) {
  Transcript tr;
  tr.session_id = std::move(session_id);
  auto& est = tr.estimates;

  auto run_list = [&](const StageTable& table, int stage) {
    std::vector<Choice> raw;
    std::vector<bool> ties;
    for (const auto& task : table) {
      auto s = simulate_choice(model, task);
      raw.push_back(s.choice);
      ties.push_back(s.tie);
    }
    auto crossing = first_crossing(raw, stage);
    if (crossing.crossings > 1)
      tr.flags.push_back("multi-switch-stage" + std::to_string(stage) + ": kept first crossing");
    auto recorded = expand(crossing.response, static_cast<int>(table.size()));
    for (std::size_t i = 0; i < table.size(); ++i) {
      TaskRecord rec{table[i], recorded[i], {}, {}};
      if (ties[i]) rec.flags.push_back("tie");
      tr.tasks.push_back(std::move(rec));
    }
    return crossing.response;
  };

  record_d(run_list(build_stage1(c), 1), c, est);
  record_tau(run_list(build_stage2(est.d_used, c), 2), c, est);
  for (const auto& task : build_stage3(est.d_used, est.tau_used, c)) {
    auto s = simulate_choice(model, task);
    TaskRecord rec{task, s.choice, {}, {}};
    if (s.tie) rec.flags.push_back("tie");
    tr.tasks.push_back(std::move(rec));
  }
  tr.payment = realize_payment(tr.tasks, c, seed);
  return tr;
}

Agent random_binary_agent(std::mt19937_64& rng, const ExperimentConfig& c) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto between = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  Agent a{make_eu_model(UtilityCurve::power({}, c.space))};
  a.u_exponent = between(0.3, 0.9);
  a.v_exponent = between(1.2, 3.0);
  std::uniform_int_distribution<int> gap(1, c.stage1_rows - 1);
  int j = gap(rng);
  a.d = c.stage1_increment * (j - 1 + between(0.05, 0.95));
  // Above the 0.1 mass Option A can put on [w, d], so every Stage-1 row with
  // worst prize beyond d is judged by u alone.
  const double tau_lo = std::max(0.1, c.y_grid.front());
  const double tau_hi = std::min(0.9, c.y_grid.back());
  do {
    a.tau = between(tau_lo, tau_hi);
  } while (std::any_of(c.y_grid.begin(), c.y_grid.end(), [&](double y) { return std::abs(y - a.tau) < 1e-6; }));
  a.model = make_binary_model(c.space, a.d, a.tau, UtilityCurve::power({a.u_exponent, 1.0, 0.0}, c.space),
                              UtilityCurve::power({a.v_exponent, 1.0, 0.0}, c.space));
  return a;
}

Agent random_eu_agent(std::mt19937_64& rng, const ExperimentConfig& c) {
  std::uniform_real_distribution<double> exponent(0.3, 3.0);
  double k = exponent(rng);
  Agent a{make_eu_model(UtilityCurve::power({k, 1.0, 0.0}, c.space))};
  a.d = c.space.worst;
  a.tau = 1.0;
  a.u_exponent = a.v_exponent = k;
  return a;
}

}  // namespace ecu
