#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ecu/lottery.hpp"
#include "ecu/utility_curve.hpp"

namespace ecu {

class IllFormedFamily : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Slack used when comparing a disappointment mass with a context boundary
/// such as tau, so that sums like 0.9 + 0.05 + 0.05 land on the right side.
inline constexpr double kContextSlack = 1e-12;

/// Indifference band for prefer().
inline constexpr double kIndifferenceTolerance = 1e-9;

/// Two utilities: u for disappointment mass <= tau, v above it.
struct BinaryFamily {
  double tau = 0.5;
  UtilityCurve u;
  UtilityCurve v;
};

/// u_pi(x) = ((x - w) / (b - w))^(0.5 + pi).
struct ParametricFamily {
  OutcomeSpace space;
};

/// Utilities on an (x, pi) grid. Values are row-major by pi; NaN marks an
/// undefined cell. Lookup uses the nearest declared pi and linear
/// interpolation in x.
struct TabulatedFamily {
  std::vector<double> x_knots;
  std::vector<double> pi_knots;
  std::vector<double> values;

  double at(std::size_t pi_index, std::size_t x_index) const {
    return values[pi_index * x_knots.size() + x_index];
  }
  double& at(std::size_t pi_index, std::size_t x_index) {
    return values[pi_index * x_knots.size() + x_index];
  }
  std::optional<double> lookup(double pi, double x) const;
};

/// Arbitrary evaluator; return NaN where undefined.
struct CustomFamily {
  std::function<double(double pi, double x)> utility;
  std::string name = "custom";
};

class ContextualFamily {
 public:
  using Kind = std::variant<BinaryFamily, ParametricFamily, TabulatedFamily, CustomFamily>;

  ContextualFamily(Kind kind) : kind_(std::move(kind)) {}  // NOLINT(implicit)
  ContextualFamily(BinaryFamily f) : kind_(std::move(f)) {}      // NOLINT(implicit)
  ContextualFamily(ParametricFamily f) : kind_(std::move(f)) {}  // NOLINT(implicit)
  ContextualFamily(TabulatedFamily f) : kind_(std::move(f)) {}   // NOLINT(implicit)
  ContextualFamily(CustomFamily f) : kind_(std::move(f)) {}      // NOLINT(implicit)

  /// u_pi(x), or nullopt where the family leaves it undefined.
  std::optional<double> utility(double pi, double x) const;

  const Kind& kind() const { return kind_; }
  const BinaryFamily* binary() const { return std::get_if<BinaryFamily>(&kind_); }
  const TabulatedFamily* tabulated() const { return std::get_if<TabulatedFamily>(&kind_); }
  std::string kind_name() const;

 private:
  Kind kind_;
};

class EcuModel {
 public:
  EcuModel(OutcomeSpace space, double d, ContextualFamily family);

  const OutcomeSpace& space() const { return space_; }
  double threshold() const { return d_; }
  const ContextualFamily& family() const { return family_; }

  /// u(w) and u(b), the context-free endpoint utilities.
  double worst_utility() const;
  double best_utility() const;

 private:
  OutcomeSpace space_;
  double d_;
  ContextualFamily family_;
};

/// Contextual utility value of `p`: sum of p(x) u_pi(x) with pi = p([w, d]).
double evaluate(const EcuModel& model, const Lottery& p);

enum class Preference { FirstStrict, SecondStrict, Indifferent };
const char* to_string(Preference pref);

Preference prefer(const EcuModel& model, const Lottery& p, const Lottery& q,
                  double tolerance = kIndifferenceTolerance);

/// Weight gamma on the best prize such that p ~ gamma*b + (1-gamma)*w.
double bw_weight(const EcuModel& model, const Lottery& p);

double parametric_u(double pi, double x, const OutcomeSpace& space);

// Convenience constructors.
EcuModel make_binary_model(OutcomeSpace space, double d, double tau, UtilityCurve u, UtilityCurve v);
EcuModel make_parametric_model(OutcomeSpace space, double d);
/// Expected-utility model: one utility for every context, threshold at w.
EcuModel make_eu_model(UtilityCurve u);

/// Samples the model's family on the grid, marking cells the domain rules
/// exclude (u_0 on [w,d], u_1 on (d,b]) as undefined.
TabulatedFamily tabulate(const EcuModel& model, const std::vector<double>& x_grid,
                         const std::vector<double>& pi_grid);

enum class ContextCondition {
  OrderedEndpoints,   // u_pi(w) < u_pi(b)
  SharedEndpoints,    // u_pi(w) = u(w), u_pi(b) = u(b)
  BoundedRange,       // u(w) <= u_pi(x) <= u(b)
  InteriorVariation,  // some pi, mu in (0,1) disagree at every interior x
};
const char* to_string(ContextCondition c);

struct ContextViolation {
  ContextCondition condition;
  double pi = 0.0;
  double mu = 0.0;
  double x = 0.0;
  std::string detail;
};

struct ContextualReport {
  std::vector<ContextViolation> violations;
  bool ok() const { return violations.empty(); }
  bool violates(ContextCondition c) const;
};

/// Checks the four contextual conditions on the given grids.
ContextualReport validate_contextual(const ContextualFamily& family, const OutcomeSpace& space,
                                     double d, const std::vector<double>& pi_grid,
                                     const std::vector<double>& x_grid);

struct FosdWitness {
  int condition = 1;  // 1: u_pi non-decreasing, 2: u_pi >= u_mu for pi <= mu
  double pi = 0.0;
  double mu = 0.0;
  double x = 0.0;
  double x_next = 0.0;
};

struct FosdConditionReport {
  bool nondecreasing = true;
  bool pessimistic = true;
  std::vector<FosdWitness> witnesses;
  bool ok() const { return nondecreasing && pessimistic; }
};

FosdConditionReport check_fosd_conditions(const EcuModel& model, const std::vector<double>& pi_grid,
                                          const std::vector<double>& x_grid);

/// Evenly spaced grid from lo to hi inclusive, `n` points (n >= 2).
std::vector<double> linspace(double lo, double hi, std::size_t n);
/// lo, lo+step, ... strictly below hi (or including hi when `inclusive`).
std::vector<double> step_grid(double lo, double hi, double step, bool inclusive);

}  // namespace ecu
