#pragma once

// Switch counts over choice matrices and exact binomial / Fisher tests.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ecu::stats {

/// Participants x tasks matrix of 0/1 entries. The meaning of 1 is left
/// open; everything computed here is invariant to flipping the coding.
class ChoiceMatrix {
 public:
  ChoiceMatrix() = default;
  ChoiceMatrix(std::vector<std::string> row_ids, std::vector<std::vector<int>> rows);

  std::size_t participants() const { return row_ids_.size(); }
  std::size_t tasks() const { return tasks_; }
  const std::vector<std::string>& row_ids() const { return row_ids_; }
  std::span<const int> row(std::size_t i) const { return {cells_.data() + i * tasks_, tasks_}; }
  int at(std::size_t i, std::size_t j) const { return cells_[i * tasks_ + j]; }

 private:
  std::vector<std::string> row_ids_;
  std::size_t tasks_ = 0;
  std::vector<int> cells_;
};

/// Adjacent unequal pairs.
int count_switches(std::span<const int> row);

struct SwitcherSummary {
  std::size_t participants = 0;
  std::size_t switchers = 0;
  std::size_t single_switchers = 0;
  double share = 0.0;
  std::optional<double> mean_switches_conditional;  // absent with no switchers
  std::vector<int> switches;                        // per participant
};

SwitcherSummary switcher_summary(const ChoiceMatrix& m);

/// Raw-matrix CSV: a header row, then one row per participant. Leading
/// non-task columns named session, subject or stage are kept as ids.
struct RawMatrixRow {
  std::string session;
  std::string subject;
  std::string stage;
  std::vector<int> cells;
};
std::vector<RawMatrixRow> parse_raw_matrix_csv(std::string_view text);
std::string raw_matrix_csv(const std::vector<RawMatrixRow>& rows);

/// P(X >= s) for X ~ Binomial(n, p).
double binom_upper_tail(int s, int n, double p);
/// P(X <= s).
double binom_lower_tail(int s, int n, double p);

struct BinomialTestResult {
  int successes = 0;
  int trials = 0;
  double p0 = 0.5;
  double p_value = 1.0;   // one-sided, alternative "greater"
  double ci_lower = 0.0;  // one-sided 95% Clopper-Pearson, upper bound 1
  double point_estimate = 0.0;
};

BinomialTestResult binom_exact(int successes, int trials, double p0 = 0.5, double confidence = 0.95);

/// [[a, b], [c, d]].
struct Contingency2x2 {
  long a = 0, b = 0, c = 0, d = 0;
};

struct FisherResult {
  double p_one_sided = 1.0;  // P(top-left >= a), alternative "greater"
  double p_two_sided = 1.0;  // sum of tables no more likely than the observed one
};

FisherResult fisher_exact(const Contingency2x2& t);

/// Hypergeometric probability of top-left = x given the margins of t.
double fisher_table_probability(const Contingency2x2& t, long x);

}  // namespace ecu::stats
