#include "ecu/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ecu {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEndpointSlack = 1e-12;

// Linear interpolation along one pi row; nullopt if a needed cell is NaN.
std::optional<double> interpolate_row(const TabulatedFamily& t, std::size_t row, double x) {
  const auto& xs = t.x_knots;
  auto hi = std::lower_bound(xs.begin(), xs.end(), x);
  if (hi == xs.end()) return std::nullopt;
  auto j = static_cast<std::size_t>(hi - xs.begin());
  if (*hi == x) {
    double v = t.at(row, j);
    return std::isnan(v) ? std::nullopt : std::optional<double>(v);
  }
  if (j == 0) return std::nullopt;
  double a = t.at(row, j - 1);
  double b = t.at(row, j);
  if (std::isnan(a) || std::isnan(b)) return std::nullopt;
  double s = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
  return a + s * (b - a);
}

}  // namespace

std::optional<double> TabulatedFamily::lookup(double pi, double x) const {
  if (pi_knots.empty() || x_knots.empty()) return std::nullopt;
  auto distance_order = [&](std::size_t a, std::size_t b) {
    double da = std::abs(pi_knots[a] - pi), db = std::abs(pi_knots[b] - pi);
    return da < db || (da == db && a < b);
  };
  // Fast path: the nearest row (ties to the lower knot).
  std::size_t best = 0;
  for (std::size_t i = 1; i < pi_knots.size(); ++i)
    if (distance_order(i, best)) best = i;
  if (auto v = interpolate_row(*this, best, x)) return v;
  // Otherwise the nearest row where the cell is defined.
  std::vector<std::size_t> order(pi_knots.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), distance_order);
  for (std::size_t row : order)
    if (auto v = interpolate_row(*this, row, x)) return v;
  return std::nullopt;
}

std::optional<double> ContextualFamily::utility(double pi, double x) const {
  return std::visit(
      [&](const auto& f) -> std::optional<double> {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, BinaryFamily>) {
          return pi <= f.tau + kContextSlack ? f.u(x) : f.v(x);
        } else if constexpr (std::is_same_v<T, ParametricFamily>) {
          return parametric_u(pi, x, f.space);
        } else if constexpr (std::is_same_v<T, TabulatedFamily>) {
          return f.lookup(pi, x);
        } else {
          double v = f.utility(pi, x);
          return std::isnan(v) ? std::nullopt : std::optional<double>(v);
        }
      },
      kind_);
}

std::string ContextualFamily::kind_name() const {
  switch (kind_.index()) {
    case 0: return "binary";
    case 1: return "parametric";
    case 2: return "tabulated";
    default: return std::get<CustomFamily>(kind_).name;
  }
}

EcuModel::EcuModel(OutcomeSpace space, double d, ContextualFamily family)
    : space_(space), d_(d), family_(std::move(family)) {
  if (!space_.contains(d_)) throw std::invalid_argument("threshold d outside the outcome space");
}

double EcuModel::worst_utility() const {
  // w is always disappointing, so context 1 is always admissible for it.
  auto v = family_.utility(1.0, space_.worst);
  if (!v) throw IllFormedFamily("u_1(w) undefined");
  return *v;
}

double EcuModel::best_utility() const {
  double ctx = d_ < space_.best ? 0.0 : 1.0;
  auto v = family_.utility(ctx, space_.best);
  if (!v) throw IllFormedFamily("u(b) undefined");
  return *v;
}

double evaluate(const EcuModel& model, const Lottery& p) {
  double pi = disappointment_mass(p, model.threshold());
  double value = 0.0;
  for (const auto& o : p.support()) {
    auto u = model.family().utility(pi, o.prize);
    if (!u)
      throw IllFormedFamily("utility undefined at pi=" + format_number(pi) +
                            ", x=" + format_number(o.prize));
    value += o.prob * *u;
  }
  return value;
}

const char* to_string(Preference pref) {
  switch (pref) {
    case Preference::FirstStrict: return "first";
    case Preference::SecondStrict: return "second";
    case Preference::Indifferent: return "indifferent";
  }
  return "?";
}

Preference prefer(const EcuModel& model, const Lottery& p, const Lottery& q, double tolerance) {
  double gap = evaluate(model, p) - evaluate(model, q);
  if (gap > tolerance) return Preference::FirstStrict;
  if (gap < -tolerance) return Preference::SecondStrict;
  return Preference::Indifferent;
}

double bw_weight(const EcuModel& model, const Lottery& p) {
  double uw = model.worst_utility();
  double ub = model.best_utility();
  return (evaluate(model, p) - uw) / (ub - uw);
}

double parametric_u(double pi, double x, const OutcomeSpace& space) {
  double s = (x - space.worst) / (space.best - space.worst);
  return std::pow(std::clamp(s, 0.0, 1.0), 0.5 + pi);
}

EcuModel make_binary_model(OutcomeSpace space, double d, double tau, UtilityCurve u, UtilityCurve v) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("tau outside [0,1]");
  return EcuModel(space, d, BinaryFamily{tau, std::move(u), std::move(v)});
}

EcuModel make_parametric_model(OutcomeSpace space, double d) {
  return EcuModel(space, d, ParametricFamily{space});
}

EcuModel make_eu_model(UtilityCurve u) {
  auto space = u.space();
  return EcuModel(space, space.worst,
                  CustomFamily{[u = std::move(u)](double, double x) { return u(x); }, "expected-utility"});
}

TabulatedFamily tabulate(const EcuModel& model, const std::vector<double>& x_grid,
                         const std::vector<double>& pi_grid) {
  TabulatedFamily t{x_grid, pi_grid, std::vector<double>(x_grid.size() * pi_grid.size(), kNaN)};
  double d = model.threshold();
  for (std::size_t i = 0; i < pi_grid.size(); ++i)
    for (std::size_t j = 0; j < x_grid.size(); ++j) {
      double pi = pi_grid[i];
      double x = x_grid[j];
      if ((pi == 0.0 && x <= d) || (pi == 1.0 && x > d)) continue;
      if (auto v = model.family().utility(pi, x)) t.at(i, j) = *v;
    }
  return t;
}

const char* to_string(ContextCondition c) {
  switch (c) {
    case ContextCondition::OrderedEndpoints: return "ordered-endpoints";
    case ContextCondition::SharedEndpoints: return "shared-endpoints";
    case ContextCondition::BoundedRange: return "bounded-range";
    case ContextCondition::InteriorVariation: return "interior-variation";
  }
  return "?";
}

bool ContextualReport::violates(ContextCondition c) const {
  return std::any_of(violations.begin(), violations.end(),
                     [c](const ContextViolation& v) { return v.condition == c; });
}

namespace {

// Domain rule: u_0 is undefined on [w,d], u_1 on (d,b].
bool admissible(double pi, double x, double d) {
  return !((pi == 0.0 && x <= d) || (pi == 1.0 && x > d));
}

std::optional<double> defined_utility(const ContextualFamily& f, double pi, double x, double d) {
  if (!admissible(pi, x, d)) return std::nullopt;
  return f.utility(pi, x);
}

}  // namespace

ContextualReport validate_contextual(const ContextualFamily& family, const OutcomeSpace& space,
                                     double d, const std::vector<double>& pi_grid,
                                     const std::vector<double>& x_grid) {
  ContextualReport report;
  const double w = space.worst;
  const double b = space.best;

  std::optional<double> ref_w, ref_b;
  double ref_w_pi = 0.0, ref_b_pi = 0.0;
  for (double pi : pi_grid) {
    auto uw = defined_utility(family, pi, w, d);
    auto ub = defined_utility(family, pi, b, d);
    if (uw && ub && !(*uw < *ub))
      report.violations.push_back({ContextCondition::OrderedEndpoints, pi, pi, w,
                                   "u_pi(w) >= u_pi(b)"});
    if (uw) {
      if (!ref_w) {
        ref_w = uw;
        ref_w_pi = pi;
      } else if (std::abs(*uw - *ref_w) > kEndpointSlack * (1.0 + std::abs(*ref_w))) {
        report.violations.push_back({ContextCondition::SharedEndpoints, pi, ref_w_pi, w,
                                     "u_pi(w) differs across contexts"});
      }
    }
    if (ub) {
      if (!ref_b) {
        ref_b = ub;
        ref_b_pi = pi;
      } else if (std::abs(*ub - *ref_b) > kEndpointSlack * (1.0 + std::abs(*ref_b))) {
        report.violations.push_back({ContextCondition::SharedEndpoints, pi, ref_b_pi, b,
                                     "u_pi(b) differs across contexts"});
      }
    }
  }

  if (ref_w && ref_b) {
    double lo = *ref_w, hi = *ref_b;
    double slack = kEndpointSlack * (1.0 + std::max(std::abs(lo), std::abs(hi)));
    for (double pi : pi_grid)
      for (double x : x_grid)
        if (auto u = defined_utility(family, pi, x, d); u && (*u < lo - slack || *u > hi + slack))
          report.violations.push_back({ContextCondition::BoundedRange, pi, pi, x,
                                       "u_pi(x) outside [u(w), u(b)]"});
  }

  if (d != b) {
    for (double x : x_grid) {
      if (!(x > w && x < b)) continue;
      std::optional<double> first;
      double first_pi = 0.0;
      bool varies = false;
      for (double pi : pi_grid) {
        if (!(pi > 0.0 && pi < 1.0)) continue;
        auto u = family.utility(pi, x);
        if (!u) continue;
        if (!first) {
          first = u;
          first_pi = pi;
        } else if (*u != *first) {
          varies = true;
          break;
        }
      }
      if (!varies)
        report.violations.push_back({ContextCondition::InteriorVariation, first_pi, first_pi, x,
                                     "u_pi(x) identical for every interior context"});
    }
  }
  return report;
}

FosdConditionReport check_fosd_conditions(const EcuModel& model, const std::vector<double>& pi_grid,
                                          const std::vector<double>& x_grid) {
  FosdConditionReport report;
  const auto& f = model.family();
  const double d = model.threshold();
  constexpr double slack = 1e-12;

  for (double pi : pi_grid) {
    std::optional<double> prev;
    double prev_x = 0.0;
    for (double x : x_grid) {
      auto u = defined_utility(f, pi, x, d);
      if (!u) continue;
      if (prev && *u < *prev - slack) {
        report.nondecreasing = false;
        report.witnesses.push_back({1, pi, pi, prev_x, x});
      }
      prev = u;
      prev_x = x;
    }
  }

  for (std::size_t i = 0; i < pi_grid.size(); ++i)
    for (std::size_t k = i + 1; k < pi_grid.size(); ++k)
      for (double x : x_grid) {
        auto a = defined_utility(f, pi_grid[i], x, d);
        auto c = defined_utility(f, pi_grid[k], x, d);
        if (a && c && *a < *c - slack) {
          report.pessimistic = false;
          report.witnesses.push_back({2, pi_grid[i], pi_grid[k], x, x});
        }
      }
  return report;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n < 2) throw std::invalid_argument("linspace needs at least two points");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = (i == n - 1) ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return out;
}

std::vector<double> step_grid(double lo, double hi, double step, bool inclusive) {
  if (!(step > 0.0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> out;
  for (std::size_t i = 0;; ++i) {
    double x = lo + step * static_cast<double>(i);
    if (x > hi || (!inclusive && x >= hi)) break;
    out.push_back(x);
  }
  if (inclusive && (out.empty() || out.back() < hi)) out.push_back(hi);
  return out;
}

}  // namespace ecu
