#include "ecu/triangle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ecu/bisection.hpp"
#include "ecu/csv.hpp"

namespace ecu {

namespace {

constexpr double kLevelTolerance = 1e-9;
constexpr double kEdgeSlack = 1e-12;

const BinaryFamily& require_binary(const EcuModel& m) {
  const auto* b = m.family().binary();
  if (!b) throw std::invalid_argument("this operation needs a binary family");
  return *b;
}

bool optimistic_context(const EcuModel& m, const Lottery& p) {
  const auto& bin = require_binary(m);
  return disappointment_mass(p, m.threshold()) <= bin.tau + kContextSlack;
}

bool level_ok(double value, double level) {
  return std::abs(value - level) <= kLevelTolerance * std::max(1.0, std::abs(level));
}

double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw csv::CsvError("bad number '" + s + "'");
  return v;
}

// Appends a point, opening a new segment when `fresh` is set.
void push_point(Polyline& line, Point pt, bool fresh) {
  if (fresh || line.segments.empty()) {
    line.segments.emplace_back();
  } else if (!line.segments.back().empty() && line.segments.back().back() == pt) {
    return;
  }
  line.segments.back().push_back(pt);
}

}  // namespace

TriangleSpec::TriangleSpec(double h, double m, double l, EcuModel mdl) : H(h), M(m), L(l), model(std::move(mdl)) {
  if (!(H > M && M > L)) throw std::invalid_argument("triangle prizes must satisfy H > M > L");
  const auto& s = model.space();
  if (!s.contains(H) || !s.contains(L)) throw std::invalid_argument("triangle prizes outside the outcome space");
}

std::size_t Polyline::point_count() const {
  std::size_t n = 0;
  for (const auto& s : segments) n += s.size();
  return n;
}

const char* to_string(TriangleCase c) {
  switch (c) {
    case TriangleCase::EuAllAbove: return "eu-all-above";
    case TriangleCase::EuAllBelow: return "eu-all-below";
    case TriangleCase::Fig2: return "fig2";
    case TriangleCase::Fig3: return "fig3";
  }
  return "?";
}

TriangleCase classify_case(const TriangleSpec& spec) {
  const double d = spec.model.threshold();
  if (spec.M > d && d >= spec.L) return TriangleCase::Fig2;
  if (spec.H > d && d >= spec.M) return TriangleCase::Fig3;
  return d < spec.L ? TriangleCase::EuAllAbove : TriangleCase::EuAllBelow;
}

std::optional<Rule> threshold_line(const TriangleSpec& spec) {
  const double tau = require_binary(spec.model).tau;
  switch (classify_case(spec)) {
    case TriangleCase::Fig2: return Rule{true, tau};
    case TriangleCase::Fig3: return Rule{false, 1.0 - tau};
    default: return std::nullopt;
  }
}

Lottery triangle_lottery(const TriangleSpec& spec, Point at) {
  double pm = std::max(0.0, 1.0 - at.x - at.y);
  return make_lottery({{spec.L, at.x}, {spec.M, pm}, {spec.H, at.y}}, spec.model.space());
}

double region_slope(const TriangleSpec& spec, bool optimistic) {
  const auto& bin = require_binary(spec.model);
  const auto& f = optimistic ? bin.u : bin.v;
  double denom = f(spec.H) - f(spec.M);
  if (denom == 0.0) throw std::domain_error("degenerate slope: f(H) = f(M)");
  return (f(spec.M) - f(spec.L)) / denom;
}

Polyline indifference_curve(const TriangleSpec& spec, Point through, double step) {
  if (!(step > 0.0 && step <= 1.0)) throw std::invalid_argument("step must lie in (0, 1]");
  if (through.x < 0 || through.y < 0 || through.x + through.y > 1.0 + kEdgeSlack)
    throw std::invalid_argument("point outside the triangle");
  const EcuModel& model = spec.model;
  const double level = evaluate(model, triangle_lottery(spec, through));
  const auto* bin = model.family().binary();

  std::vector<double> xs;
  const auto n = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
  for (std::size_t i = 0; i <= n; ++i) xs.push_back(std::min(1.0, static_cast<double>(i) * step));
  if (xs.back() < 1.0) xs.push_back(1.0);
  if (bin) {
    auto rule = threshold_line(spec);
    if (rule && rule->vertical) xs.push_back(rule->value);
    if (rule && !rule->vertical) {
      // where the optimistic line meets pH = 1 - tau
      const auto& u = bin->u;
      double denom = u(spec.L) - u(spec.M);
      if (denom != 0.0) {
        double x = (level - u(spec.M) - rule->value * (u(spec.H) - u(spec.M))) / denom;
        if (x >= 0.0 && x <= 1.0 - rule->value) xs.push_back(x);
      }
    }
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  Polyline line;
  line.label = "V=" + format_number(level);
  int last_region = -1;
  bool gap = false;
  std::size_t omitted = 0;
  for (double x : xs) {
    std::optional<Point> found;
    int region = 0;
    if (bin) {
      for (bool opt : {true, false}) {
        const auto& f = opt ? bin->u : bin->v;
        double denom = f(spec.H) - f(spec.M);
        if (denom == 0.0) continue;
        double y = (level - f(spec.M) - x * (f(spec.L) - f(spec.M))) / denom;
        if (y < -kEdgeSlack || x + y > 1.0 + kEdgeSlack) continue;
        y = std::clamp(y, 0.0, 1.0 - x);
        Point pt{x, y};
        auto lot = triangle_lottery(spec, pt);
        if (optimistic_context(model, lot) != opt) continue;
        if (!level_ok(evaluate(model, lot), level)) continue;
        found = pt;
        region = opt ? 0 : 1;
        break;
      }
    } else {
      auto g = [&](double y) { return evaluate(model, triangle_lottery(spec, {x, y})) - level; };
      try {
        auto r = bisect_increasing(g, 0.0, std::max(0.0, 1.0 - x));
        if (r.residual <= kLevelTolerance * std::max(1.0, std::abs(level))) found = Point{x, r.root};
      } catch (const NotBracketed&) {
      }
    }
    if (!found) {
      ++omitted;
      gap = true;
      continue;
    }
    push_point(line, *found, gap || (last_region != -1 && region != last_region));
    gap = false;
    last_region = region;
  }
  line.segments.erase(std::remove_if(line.segments.begin(), line.segments.end(),
                                     [](const auto& s) { return s.empty(); }),
                      line.segments.end());
  if (omitted) line.flags.push_back(std::to_string(omitted) + " sample(s) of pL without a point at this level");
  if (bin) line.flags.push_back("mass exactly tau is evaluated with u");
  return line;
}

std::vector<Polyline> indifference_map(const TriangleSpec& spec, const std::vector<double>& levels, double step) {
  std::vector<Polyline> out;
  out.reserve(levels.size());
  for (double level : levels) {
    if (level < 0.0 || level > 1.0) throw std::invalid_argument("levels are pH values in [0, 1]");
    out.push_back(indifference_curve(spec, {0.0, level}, step));
    out.back().label = "pH0=" + format_number(level);
  }
  return out;
}

Polyline gul_curve(const EcuModel& model, double p, double level, const std::vector<double>& x_grid) {
  const auto& bin = require_binary(model);
  if (!(p > 0.0 && p < bin.tau && bin.tau < 0.5)) throw std::invalid_argument("gul_curve needs 0 < p < tau < 0.5");
  const auto& s = model.space();
  const double d = model.threshold();
  const auto& fam = model.family();
  auto util = [&](double pi, double x) {
    auto v = fam.utility(pi, x);
    if (!v) throw IllFormedFamily("utility undefined");
    return *v;
  };

  Polyline line;
  line.label = "V=" + format_number(level);
  int last_branch = -1;
  bool gap = false;
  std::size_t omitted = 0;
  for (double x : x_grid) {
    if (!s.contains(x)) throw std::invalid_argument("x grid outside the outcome space");
    double x_mass = x <= d ? p : 0.0;
    std::optional<double> y;
    int branch = 0;
    if (d < s.best) {
      double pi = x_mass;
      auto f = [&](double yy) { return p * util(pi, x) + (1 - p) * util(pi, yy) - level; };
      if (f(d) < 0.0 && f(s.best) >= -kLevelTolerance) y = bisect_increasing(f, d, s.best).root;
    }
    if (!y) {
      double pi = 1 - p + x_mass;
      auto f = [&](double yy) { return p * util(pi, x) + (1 - p) * util(pi, yy) - level; };
      if (f(s.worst) <= kLevelTolerance && f(d) >= -kLevelTolerance) {
        y = bisect_increasing(f, s.worst, d).root;
        branch = 1;
      }
    }
    if (y && !level_ok(evaluate(model, make_lottery({{x, p}, {*y, 1 - p}}, s)), level)) y.reset();
    if (!y) {
      ++omitted;
      gap = true;
      continue;
    }
    push_point(line, {x, *y}, gap || (last_branch != -1 && branch != last_branch));
    gap = false;
    last_branch = branch;
  }
  if (omitted) line.flags.push_back(std::to_string(omitted) + " grid x value(s) where the level is unreachable");
  return line;
}

CurveFormat parse_curve_format(std::string_view name) {
  if (name == "csv") return CurveFormat::Csv;
  if (name == "svg") return CurveFormat::Svg;
  throw std::invalid_argument("unknown curve format '" + std::string(name) + "'");
}

namespace {

std::pair<Point, Point> rule_ends(const Rule& r) {
  if (r.vertical) return {{r.value, 0.0}, {r.value, 1.0 - r.value}};
  return {{0.0, r.value}, {1.0 - r.value, r.value}};
}

std::string export_csv(const CurveSet& set) {
  std::string out = csv::format_row({"kind", "curve", "segment", "x", "y"});
  for (const auto& c : set.curves)
    for (std::size_t s = 0; s < c.segments.size(); ++s)
      for (const auto& pt : c.segments[s])
        out += csv::format_row({"curve", c.label, std::to_string(s), format_number(pt.x), format_number(pt.y)});
  for (std::size_t i = 0; i < set.rules.size(); ++i) {
    const auto& r = set.rules[i];
    auto [a, b] = rule_ends(r);
    for (const auto& pt : {a, b})
      out += csv::format_row({"rule", r.vertical ? "vertical" : "horizontal", std::to_string(i),
                              format_number(pt.x), format_number(pt.y)});
  }
  return out;
}

std::string export_svg(const CurveSet& set) {
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool first = true;
  auto extend = [&](Point p) {
    if (first) {
      x0 = x1 = p.x;
      y0 = y1 = p.y;
      first = false;
    }
    x0 = std::min(x0, p.x), x1 = std::max(x1, p.x), y0 = std::min(y0, p.y), y1 = std::max(y1, p.y);
  };
  for (const auto& c : set.curves)
    for (const auto& s : c.segments)
      for (const auto& p : s) extend(p);
  for (const auto& r : set.rules) {
    auto [a, b] = rule_ends(r);
    extend(a);
    extend(b);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  constexpr double W = 480, H = 480, pad = 20;
  auto px = [&](Point p) {
    return format_number(pad + (p.x - x0) / (x1 - x0) * (W - 2 * pad)) + "," +
           format_number(H - pad - (p.y - y0) / (y1 - y0) * (H - 2 * pad));
  };
  std::ostringstream os;
  os << R"(<svg xmlns="http://www.w3.org/2000/svg" width=")" << W << R"(" height=")" << H << "\">\n";
  if (!set.title.empty()) os << "  <title>" << set.title << "</title>\n";
  for (const auto& c : set.curves) {
    os << "  <g class=\"curve\" data-label=\"" << c.label << "\">\n";
    for (const auto& s : c.segments) {
      os << "    <polyline fill=\"none\" stroke=\"black\" points=\"";
      for (std::size_t i = 0; i < s.size(); ++i) os << (i ? " " : "") << px(s[i]);
      os << "\"/>\n";
    }
    os << "  </g>\n";
  }
  for (const auto& r : set.rules) {
    auto [a, b] = rule_ends(r);
    os << "  <polyline class=\"rule\" fill=\"none\" stroke=\"red\" stroke-dasharray=\"4 3\" points=\"" << px(a)
       << " " << px(b) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace

std::string export_curves(const CurveSet& set, CurveFormat format) {
  if (set.empty()) return {};
  return format == CurveFormat::Csv ? export_csv(set) : export_svg(set);
}

CurveSet parse_curves_csv(std::string_view text) {
  CurveSet set;
  auto rows = csv::parse(text);
  if (rows.empty()) return set;
  const auto& h = rows.front();
  auto kind = csv::column(h, "kind"), curve = csv::column(h, "curve"), seg = csv::column(h, "segment");
  auto cx = csv::column(h, "x"), cy = csv::column(h, "y");
  long last_rule = -1;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != h.size()) throw csv::CsvError("row " + std::to_string(i) + " has the wrong width");
    Point pt{parse_double(r[cx]), parse_double(r[cy])};
    auto segment = std::stoul(r[seg]);
    if (r[kind] == "curve") {
      if (set.curves.empty() || set.curves.back().label != r[curve]) set.curves.push_back({r[curve], {}, {}});
      auto& c = set.curves.back();
      if (segment >= c.segments.size()) c.segments.resize(segment + 1);
      c.segments[segment].push_back(pt);
    } else if (r[kind] == "rule") {
      if (static_cast<long>(segment) == last_rule) continue;
      last_rule = static_cast<long>(segment);
      bool vertical = r[curve] == "vertical";
      set.rules.push_back({vertical, vertical ? pt.x : pt.y});
    } else {
      throw csv::CsvError("unknown row kind '" + r[kind] + "'");
    }
  }
  return set;
}

}  // namespace ecu
