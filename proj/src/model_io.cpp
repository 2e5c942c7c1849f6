#include "ecu/model_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace ecu {

using nlohmann::json;

namespace {

const json& require(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ModelFormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double number(const json& j, const char* key) {
  const auto& v = require(j, key);
  if (!v.is_number()) throw ModelFormatError(std::string("field '") + key + "' must be a number");
  return v.get<double>();
}

UtilityCurve parse_curve(const json& j, const OutcomeSpace& space) {
  if (j.contains("table")) {
    std::vector<UtilityCurve::Knot> knots;
    for (const auto& k : j.at("table")) {
      if (!k.is_array() || k.size() != 2) throw ModelFormatError("table entries are [prize, utility] pairs");
      knots.push_back({k[0].get<double>(), k[1].get<double>()});
    }
    return UtilityCurve::table(std::move(knots), space);
  }
  if (j.contains("power")) {
    const auto& p = j.at("power");
    UtilityCurve::Power rule;
    rule.exponent = number(p, "exponent");
    rule.scale = p.value("scale", 1.0);
    rule.offset = p.value("offset", 0.0);
    return UtilityCurve::power(rule, space);
  }
  throw ModelFormatError("utility curve needs 'table' or 'power'");
}

json curve_json(const UtilityCurve& c) {
  if (c.is_table()) {
    json t = json::array();
    for (const auto& k : c.knots()) t.push_back({k.prize, k.utility});
    return {{"table", t}};
  }
  const auto& p = c.power_rule();
  return {{"power", {{"exponent", p.exponent}, {"scale", p.scale}, {"offset", p.offset}}}};
}

TabulatedFamily parse_tabulated(const json& f) {
  TabulatedFamily t;
  t.x_knots = require(f, "x").get<std::vector<double>>();
  t.pi_knots = require(f, "pi").get<std::vector<double>>();
  const auto& rows = require(f, "values");
  if (rows.size() != t.pi_knots.size()) throw ModelFormatError("one value row per pi knot expected");
  for (const auto& row : rows) {
    if (row.size() != t.x_knots.size()) throw ModelFormatError("value row length differs from x knots");
    for (const auto& cell : row)
      t.values.push_back(cell.is_null() ? std::numeric_limits<double>::quiet_NaN() : cell.get<double>());
  }
  if (t.x_knots.empty() || t.pi_knots.empty()) throw ModelFormatError("empty tabulated family");
  return t;
}

}  // namespace

EcuModel parse_model(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ModelFormatError(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (require(j, "schema").get<std::string>() != kModelSchema)
      throw ModelFormatError("unsupported schema " + j.at("schema").dump());
    const auto& sp = require(j, "space");
    OutcomeSpace space(number(sp, "w"), number(sp, "b"));
    double d = number(j, "d");
    const auto& f = require(j, "family");
    auto kind = require(f, "kind").get<std::string>();
    if (kind == "binary")
      return make_binary_model(space, d, number(f, "tau"), parse_curve(require(f, "u"), space),
                               parse_curve(require(f, "v"), space));
    if (kind == "parametric") return make_parametric_model(space, d);
    if (kind == "tabulated") return EcuModel(space, d, parse_tabulated(f));
    throw ModelFormatError("unknown family kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ModelFormatError(std::string("malformed model: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelFormatError(std::string("invalid model: ") + e.what());
  }
}

EcuModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ModelFormatError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_model(buf.str());
}

std::string dump_model(const EcuModel& model, int indent) {
  json j;
  j["schema"] = kModelSchema;
  j["space"] = {{"w", model.space().worst}, {"b", model.space().best}};
  j["d"] = model.threshold();
  const auto& kind = model.family().kind();
  if (const auto* bin = std::get_if<BinaryFamily>(&kind)) {
    j["family"] = {{"kind", "binary"}, {"tau", bin->tau}, {"u", curve_json(bin->u)}, {"v", curve_json(bin->v)}};
  } else if (std::holds_alternative<ParametricFamily>(kind)) {
    j["family"] = {{"kind", "parametric"}};
  } else if (const auto* tab = std::get_if<TabulatedFamily>(&kind)) {
    json rows = json::array();
    for (std::size_t i = 0; i < tab->pi_knots.size(); ++i) {
      json row = json::array();
      for (std::size_t k = 0; k < tab->x_knots.size(); ++k) {
        double v = tab->at(i, k);
        row.push_back(std::isnan(v) ? json(nullptr) : json(v));
      }
      rows.push_back(std::move(row));
    }
    j["family"] = {{"kind", "tabulated"}, {"x", tab->x_knots}, {"pi", tab->pi_knots}, {"values", rows}};
  } else {
    throw ModelFormatError("custom families cannot be serialized");
  }
  return j.dump(indent);
}

}  // namespace ecu
