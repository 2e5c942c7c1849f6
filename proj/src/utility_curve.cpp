#include "ecu/utility_curve.hpp"

#include <algorithm>
#include <cmath>

namespace ecu {

UtilityCurve UtilityCurve::table(std::vector<Knot> knots, const OutcomeSpace& space) {
  if (knots.size() < 2) throw std::invalid_argument("utility table needs at least two knots");
  for (std::size_t i = 1; i < knots.size(); ++i)
    if (!(knots[i].prize > knots[i - 1].prize))
      throw std::invalid_argument("utility table prizes must be strictly increasing");
  if (knots.front().prize != space.worst || knots.back().prize != space.best)
    throw std::invalid_argument("utility table must span the outcome space exactly");
  return UtilityCurve(std::move(knots), space);
}

UtilityCurve UtilityCurve::power(Power rule, const OutcomeSpace& space) {
  if (!(rule.exponent > 0.0)) throw std::invalid_argument("power utility needs exponent > 0");
  return UtilityCurve(rule, space);
}

double UtilityCurve::operator()(double x) const {
  if (const auto* knots = std::get_if<std::vector<Knot>>(&rule_)) {
    if (x <= knots->front().prize) return knots->front().utility;
    if (x >= knots->back().prize) return knots->back().utility;
    auto hi = std::upper_bound(knots->begin(), knots->end(), x,
                               [](double v, const Knot& k) { return v < k.prize; });
    auto lo = hi - 1;
    if (x == lo->prize) return lo->utility;
    double t = (x - lo->prize) / (hi->prize - lo->prize);
    return lo->utility + t * (hi->utility - lo->utility);
  }
  const auto& p = std::get<Power>(rule_);
  double s = (x - space_.worst) / (space_.best - space_.worst);
  return p.offset + p.scale * std::pow(std::clamp(s, 0.0, 1.0), p.exponent);
}

bool UtilityCurve::strictly_increasing() const {
  if (const auto* knots = std::get_if<std::vector<Knot>>(&rule_)) {
    for (std::size_t i = 1; i < knots->size(); ++i)
      if (!((*knots)[i].utility > (*knots)[i - 1].utility)) return false;
    return true;
  }
  const auto& p = std::get<Power>(rule_);
  return p.scale > 0.0 && p.exponent > 0.0;
}

}  // namespace ecu
