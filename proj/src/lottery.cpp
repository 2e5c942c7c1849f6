#include "ecu/lottery.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

namespace ecu {

OutcomeSpace::OutcomeSpace(double w, double b) : worst(w), best(b) {
  if (!(w < b) || !std::isfinite(w) || !std::isfinite(b))
    throw InvalidLottery("outcome space requires finite worst < best");
}

double Lottery::expectation() const {
  double e = 0.0;
  for (const auto& o : support_) e += o.prize * o.prob;
  return e;
}

double Lottery::prob_of(double x) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), x,
                             [](const Outcome& o, double v) { return o.prize < v; });
  return (it != support_.end() && it->prize == x) ? it->prob : 0.0;
}

Lottery make_lottery(std::vector<Outcome> pairs, const OutcomeSpace& space) {
  if (pairs.empty()) throw InvalidLottery("lottery needs at least one outcome");
  double total = 0.0;
  for (const auto& o : pairs) {
    if (!std::isfinite(o.prob) || o.prob < 0.0)
      throw InvalidLottery("negative or non-finite probability");
    if (!std::isfinite(o.prize) || !space.contains(o.prize))
      throw InvalidLottery("prize " + format_number(o.prize) + " outside [" +
                           format_number(space.worst) + ", " + format_number(space.best) + "]");
    total += o.prob;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw InvalidLottery("probabilities sum to " + format_number(total) + ", not 1");

  std::sort(pairs.begin(), pairs.end(),
            [](const Outcome& a, const Outcome& b) { return a.prize < b.prize; });
  std::vector<Outcome> merged;
  merged.reserve(pairs.size());
  for (const auto& o : pairs) {
    if (o.prob == 0.0) continue;
    if (!merged.empty() && merged.back().prize == o.prize)
      merged.back().prob += o.prob;
    else
      merged.push_back(o);
  }
  // Rescale only past rounding noise, so canonical input comes back unchanged.
  const double noise = 8.0 * static_cast<double>(pairs.size()) * std::numeric_limits<double>::epsilon();
  if (std::abs(total - 1.0) > noise)
    for (auto& o : merged) o.prob /= total;
  return Lottery(std::move(merged), space);
}

Lottery dirac(double x, const OutcomeSpace& space) { return make_lottery({{x, 1.0}}, space); }

Lottery mix(const Lottery& p, const Lottery& q, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidLottery("mixture weight outside [0,1]");
  if (!(p.space() == q.space())) throw InvalidLottery("mixing lotteries over different spaces");
  std::vector<Outcome> pairs;
  pairs.reserve(p.size() + q.size());
  for (const auto& o : p.support()) pairs.push_back({o.prize, alpha * o.prob});
  for (const auto& o : q.support()) pairs.push_back({o.prize, (1.0 - alpha) * o.prob});
  return make_lottery(std::move(pairs), p.space());
}

double cdf(const Lottery& p, double x) {
  double mass = 0.0;
  for (const auto& o : p.support()) {
    if (o.prize > x) break;
    mass += o.prob;
  }
  return std::min(mass, 1.0);
}

double disappointment_mass(const Lottery& p, double d) {
  if (!p.space().contains(d)) throw InvalidLottery("threshold outside the outcome space");
  return cdf(p, d);
}

bool fosd(const Lottery& p, const Lottery& q) {
  // Both CDFs are right-continuous step functions, so checking at every
  // support point of either lottery covers all x.
  constexpr double slack = 1e-12;
  for (const auto* lot : {&p, &q})
    for (const auto& o : lot->support())
      if (cdf(p, o.prize) > cdf(q, o.prize) + slack) return false;
  return true;
}

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string to_string(const Lottery& p) {
  std::string out;
  for (const auto& o : p.support()) {
    if (!out.empty()) out += ',';
    out += format_number(o.prize);
    out += ':';
    out += format_number(o.prob);
  }
  return out;
}

namespace {

double parse_double(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InvalidLottery("malformed number '" + std::string(s) + "'");
  return v;
}

}  // namespace

Lottery parse_lottery(std::string_view text, const OutcomeSpace& space) {
  std::vector<Outcome> pairs;
  while (!text.empty()) {
    auto comma = text.find(',');
    auto item = text.substr(0, comma);
    auto colon = item.find(':');
    if (colon == std::string_view::npos)
      throw InvalidLottery("expected prize:probability, got '" + std::string(item) + "'");
    pairs.push_back({parse_double(item.substr(0, colon)), parse_double(item.substr(colon + 1))});
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return make_lottery(std::move(pairs), space);
}

}  // namespace ecu
