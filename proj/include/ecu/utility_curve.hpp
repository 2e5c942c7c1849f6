#pragma once

#include <utility>
#include <variant>
#include <vector>

#include "ecu/lottery.hpp"

namespace ecu {

/// A prize -> utility map on an outcome space, given either as knots with
/// piecewise-linear interpolation or as a scaled power rule
///   offset + scale * ((x - w) / (b - w))^exponent.
class UtilityCurve {
 public:
  struct Knot {
    double prize;
    double utility;
  };
  struct Power {
    double exponent = 1.0;
    double scale = 1.0;
    double offset = 0.0;
  };

  /// Knots must be strictly increasing in prize and span [w, b] exactly.
  static UtilityCurve table(std::vector<Knot> knots, const OutcomeSpace& space);
  static UtilityCurve power(Power rule, const OutcomeSpace& space);

  double operator()(double x) const;
  const OutcomeSpace& space() const { return space_; }

  bool is_table() const { return std::holds_alternative<std::vector<Knot>>(rule_); }
  const std::vector<Knot>& knots() const { return std::get<std::vector<Knot>>(rule_); }
  const Power& power_rule() const { return std::get<Power>(rule_); }

  /// Strictly increasing at the knots (table) or scale, exponent > 0 (power).
  bool strictly_increasing() const;

 private:
  UtilityCurve(std::variant<std::vector<Knot>, Power> rule, OutcomeSpace space)
      : rule_(std::move(rule)), space_(space) {}

  std::variant<std::vector<Knot>, Power> rule_;
  OutcomeSpace space_;
};

}  // namespace ecu
