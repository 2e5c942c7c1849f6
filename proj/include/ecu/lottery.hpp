#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ecu {

class InvalidLottery : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The prize interval [worst, best]; worst < best.
struct OutcomeSpace {
  double worst = 0.0;
  double best = 1.0;

  OutcomeSpace() = default;
  OutcomeSpace(double w, double b);

  bool contains(double x) const { return x >= worst && x <= best; }
  friend bool operator==(const OutcomeSpace&, const OutcomeSpace&) = default;
};

struct Outcome {
  double prize = 0.0;
  double prob = 0.0;
  friend bool operator==(const Outcome&, const Outcome&) = default;
};

/// Tolerance on the total mass accepted at construction.
inline constexpr double kMassTolerance = 1e-9;

/// A simple lottery: finite support, sorted by prize, no duplicate prizes,
/// strictly positive probabilities summing to one.
class Lottery {
 public:
  const std::vector<Outcome>& support() const { return support_; }
  const OutcomeSpace& space() const { return space_; }
  std::size_t size() const { return support_.size(); }

  double expectation() const;
  double min_prize() const { return support_.front().prize; }
  double max_prize() const { return support_.back().prize; }
  /// Probability of exactly `x`; 0 when x is not in the support.
  double prob_of(double x) const;

  friend bool operator==(const Lottery&, const Lottery&) = default;

 private:
  friend Lottery make_lottery(std::vector<Outcome> pairs, const OutcomeSpace& space);
  Lottery(std::vector<Outcome> support, OutcomeSpace space)
      : support_(std::move(support)), space_(space) {}

  std::vector<Outcome> support_;
  OutcomeSpace space_;
};

/// Merges duplicate prizes, drops zero entries, sorts, and renormalizes.
/// Throws InvalidLottery on negative probabilities, prizes outside the space,
/// or a total mass further than kMassTolerance from one.
Lottery make_lottery(std::vector<Outcome> pairs, const OutcomeSpace& space);

Lottery dirac(double x, const OutcomeSpace& space);

/// alpha * p + (1 - alpha) * q.
Lottery mix(const Lottery& p, const Lottery& q, double alpha);

/// Mass on [worst, x].
double cdf(const Lottery& p, double x);

/// Mass on the closed interval [worst, d]; d must lie in the space.
double disappointment_mass(const Lottery& p, double d);

/// True iff p first-order stochastically dominates q.
bool fosd(const Lottery& p, const Lottery& q);

/// `prize:probability` pairs joined by commas, shortest round-trip formatting.
std::string to_string(const Lottery& p);
Lottery parse_lottery(std::string_view text, const OutcomeSpace& space);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double x);

}  // namespace ecu
