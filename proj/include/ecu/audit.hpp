#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecu/lottery.hpp"
#include "ecu/model.hpp"

namespace ecu {

/// A black-box lottery -> value functional. Queries must be pure; the
/// auditor may call it from several threads at once.
struct PreferenceOracle {
  OutcomeSpace space;
  std::function<double(const Lottery&)> value;

  double operator()(const Lottery& p) const { return value(p); }
};

PreferenceOracle oracle_from(const EcuModel& model);

class SolvabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class AuditDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr double kAuditTolerance = 1e-10;

struct AuditGrids {
  std::vector<double> x_grid;      // sorted, spans [w, b)
  std::vector<double> alpha_grid;  // sorted, in [0, 1]
  std::vector<double> t_grid;      // sorted, in [0, 1]
  double tol = kAuditTolerance;
};

/// x in [w, b) with the given step; alpha and t on a 0.01 lattice.
AuditGrids default_grids(const OutcomeSpace& space, double x_step);

/// A recorded failure: the oracle should have ranked `left` against
/// `right` according to `expected` ("≻", "≽" or "~") but did not.
struct Witness {
  std::string expected;
  Lottery left;
  Lottery right;
  double left_value = 0.0;
  double right_value = 0.0;
  std::string note;
};

struct AxiomCheck {
  std::string axiom;
  bool passed = true;
  std::vector<Witness> witnesses;
  std::string note;
};

/// t -> oracle(t b + (1-t) w) strictly increasing across the grid.
AxiomCheck check_monotonicity(const PreferenceOracle& oracle, const std::vector<double>& t_grid);

AxiomCheck check_replacement_monotonicity(const PreferenceOracle& oracle,
                                          const std::vector<double>& x_grid,
                                          const std::vector<double>& alpha_grid,
                                          double tol = kAuditTolerance);

/// gamma with p ~ gamma b + (1-gamma) w. Throws SolvabilityError when the
/// oracle value of p lies outside [oracle(w), oracle(b)].
double bw_solve(const PreferenceOracle& oracle, const Lottery& p, double tol = kAuditTolerance);

double phi(const PreferenceOracle& oracle, double x, double tol = kAuditTolerance);

/// gamma with  a x + (1-a) y  ~  a gamma b + a (1-gamma) w + (1-a) y,
/// for y the worst or best prize.
double component_solve(const PreferenceOracle& oracle, double x, double alpha, double y,
                       double tol = kAuditTolerance);

struct ThresholdSetProbe {
  bool member = true;
  double max_gap = 0.0;
  double worst_alpha = 0.0;
};

/// Grid test of the worst-mixture substitution that defines the threshold
/// set. A finite grid can only refute membership, never prove it.
ThresholdSetProbe probe_threshold_set(const PreferenceOracle& oracle, double x,
                                      const std::vector<double>& alpha_grid,
                                      double tol = kAuditTolerance);
bool in_threshold_set(const PreferenceOracle& oracle, double x, const std::vector<double>& alpha_grid,
                      double tol = kAuditTolerance);

struct ThresholdRecovery {
  double lower = 0.0;  // largest member of the leading run of grid members
  double upper = 0.0;  // next grid point (or b): the threshold lies in [lower, upper)
  bool all_members = false;
  bool prefix_structure = true;     // members form a prefix of the grid
  std::optional<double> stray_member;  // first member after the prefix ended
  /// Threshold to use downstream: the lower end, which sorts every grid
  /// prize into the same context as the true threshold would.
  double point() const { return lower; }
};

ThresholdRecovery recover_threshold(const PreferenceOracle& oracle, const std::vector<double>& x_grid,
                                    const std::vector<double>& alpha_grid,
                                    double tol = kAuditTolerance, bool parallel = true);

/// Context-dependent weight phi_x^alpha. Throws AuditDomainError for
/// x <= threshold with alpha = 0 or x > threshold with alpha = 1.
double phi_alpha(const PreferenceOracle& oracle, double x, double alpha, double threshold,
                 double tol = kAuditTolerance);

AxiomCheck check_contextual_substitutability(const PreferenceOracle& oracle,
                                             const std::vector<Lottery>& sample, double threshold,
                                             double tol = kAuditTolerance);

/// Random lotteries with support size 1..max_support drawn from the prize
/// grid (plus b), probabilities on a 1/resolution lattice.
std::vector<Lottery> sample_lotteries(const OutcomeSpace& space, const std::vector<double>& prizes,
                                      std::size_t count, std::uint64_t seed,
                                      std::size_t max_support = 4, int resolution = 100);

struct AuditReport {
  std::vector<AxiomCheck> checks;
  ThresholdRecovery threshold;
  bool variation_condition = true;
  std::vector<double> variation_failures;  // grid x where every phi_x^alpha agreed
  std::vector<std::string> notes;

  bool passed() const;
  const AxiomCheck* find(const std::string& axiom) const;
};

struct AuditOptions {
  std::size_t sample_size = 200;
  std::uint64_t seed = 7;
  bool parallel = true;
};

struct Reconstruction {
  EcuModel model;
  TabulatedFamily table;
  AuditReport audit;
};

class AuditFailure : public std::runtime_error {
 public:
  AuditFailure(const std::string& what, AuditReport report)
      : std::runtime_error(what), report_(std::move(report)) {}
  const AuditReport& report() const { return report_; }

 private:
  AuditReport report_;
};

/// Runs the axiom checks and recovers the threshold and phi table.
Reconstruction run_audit(const PreferenceOracle& oracle, const AuditGrids& grids,
                         const AuditOptions& options = {});

/// Builds a tabulated model with u_pi(x) = phi_x^pi, u(w) = 0, u(b) = 1.
/// Throws AuditFailure when an axiom check fails.
Reconstruction reconstruct_ecu(const PreferenceOracle& oracle, const AuditGrids& grids,
                               const AuditOptions& options = {});

struct AffineMap {
  double scale = 1.0;
  double shift = 0.0;
};

/// (k, c) with b_pi(x) = k a_pi(x) + c on every defined cell, or nullopt.
/// Throws std::invalid_argument for mismatched grids or a degenerate famA.
std::optional<AffineMap> affine_match(const TabulatedFamily& a, const TabulatedFamily& b,
                                      double tol = 1e-9);

/// Grid weights alpha (of p) at which betweenness fails for the pair.
std::vector<double> detect_betweenness_violation(const PreferenceOracle& oracle, const Lottery& p,
                                                 const Lottery& q,
                                                 const std::vector<double>& alpha_grid,
                                                 double tol = kIndifferenceTolerance);

enum class AllaisPattern { NoReversal, ReversalAB, ReversalBA };
const char* to_string(AllaisPattern a);

struct AllaisResult {
  AllaisPattern pattern = AllaisPattern::NoReversal;
  bool indifference = false;
  Preference first = Preference::Indifferent;
  Preference second = Preference::Indifferent;
};

/// Compares strict choices in two (A, B) pairs; a reversal is A in one pair
/// and B in the other.
AllaisResult detect_allais(const PreferenceOracle& oracle, const std::pair<Lottery, Lottery>& pair1,
                           const std::pair<Lottery, Lottery>& pair2,
                           double tol = kIndifferenceTolerance);

}  // namespace ecu
