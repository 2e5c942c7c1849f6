#pragma once

// Marschak-Machina triangle maps for ECU models, and two-prize indifference
// curves with their break at the threshold.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecu/model.hpp"

namespace ecu {

/// Triangle over prizes H > M > L. Points are (pL, pH); M gets the rest.
struct TriangleSpec {
  double H = 0.0;
  double M = 0.0;
  double L = 0.0;
  EcuModel model;

  TriangleSpec(double h, double m, double l, EcuModel mdl);
};

struct Point {
  double x = 0.0;  // pL in triangle coordinates
  double y = 0.0;  // pH in triangle coordinates
  friend bool operator==(const Point&, const Point&) = default;
};

/// A curve split into segments; each segment boundary is a break marker.
struct Polyline {
  std::string label;
  std::vector<std::vector<Point>> segments;
  std::vector<std::string> flags;

  std::size_t point_count() const;
  std::size_t break_count() const { return segments.empty() ? 0 : segments.size() - 1; }
  friend bool operator==(const Polyline& a, const Polyline& b) {
    return a.label == b.label && a.segments == b.segments;
  }
};

enum class TriangleCase { EuAllAbove, EuAllBelow, Fig2, Fig3 };
const char* to_string(TriangleCase c);

TriangleCase classify_case(const TriangleSpec& spec);

/// A vertical (x = value) or horizontal (y = value) rule.
struct Rule {
  bool vertical = true;
  double value = 0.0;
  friend bool operator==(const Rule&, const Rule&) = default;
};

/// Fig2: pL = tau. Fig3: pH = 1 - tau. Nothing for the EU-like cases.
/// Needs a binary family.
std::optional<Rule> threshold_line(const TriangleSpec& spec);

Lottery triangle_lottery(const TriangleSpec& spec, Point at);

/// dpH/dpL of an indifference line in the context using u (optimistic) or v.
/// Throws std::domain_error when f(H) = f(M).
double region_slope(const TriangleSpec& spec, bool optimistic);

inline constexpr double kCurveStep = 1e-3;

/// Indifference curve through `through`, traced over pL with the threshold
/// crossing inserted exactly. Binary families are solved in closed form,
/// others by bisection on pH.
Polyline indifference_curve(const TriangleSpec& spec, Point through, double step = kCurveStep);

/// One curve per level, each through (0, level) on the pL = 0 edge.
std::vector<Polyline> indifference_map(const TriangleSpec& spec, const std::vector<double>& levels,
                                       double step = kCurveStep);

/// Curve of (x w.p. p; y w.p. 1-p) lotteries with value `level`; x on the
/// horizontal axis, y solved per grid x. Needs p < tau < 0.5.
Polyline gul_curve(const EcuModel& model, double p, double level, const std::vector<double>& x_grid);

struct CurveSet {
  std::vector<Polyline> curves;
  std::vector<Rule> rules;
  std::string title;
  bool empty() const { return curves.empty() && rules.empty(); }
};

enum class CurveFormat { Csv, Svg };
CurveFormat parse_curve_format(std::string_view name);

/// CSV columns: kind,curve,segment,x,y. Rules are two-point rows of kind
/// "rule". Empty sets give an empty document.
std::string export_curves(const CurveSet& set, CurveFormat format);
CurveSet parse_curves_csv(std::string_view text);

}  // namespace ecu
