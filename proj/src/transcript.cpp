#include <algorithm>
#include <map>
#include <sstream>

#include "ecu/csv.hpp"
#include "ecu/experiment.hpp"

namespace ecu {

namespace {

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (const auto& f : flags) out += (out.empty() ? "" : ";") + f;
  return out;
}

std::vector<std::string> split_flags(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ';'))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::string opt_number(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> parse_opt(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stod(s);
}

}  // namespace

const std::vector<std::string>& transcript_columns() {
  static const std::vector<std::string> cols{"session_id", "seq",      "record",    "stage",  "row",
                                             "task_id",    "option_a", "option_b",  "choice", "d_point",
                                             "tau_point",  "points",   "usd",       "flags",  "timestamp"};
  return cols;
}

std::string transcript_csv(const std::vector<Transcript>& sessions) {
  std::string out = csv::format_row(transcript_columns());
  for (const auto& s : sessions) {
    int seq = 0;
    for (const auto& t : s.tasks)
      out += csv::format_row({s.session_id, std::to_string(++seq), "task", std::to_string(t.task.stage),
                              std::to_string(t.task.row), t.task.id, to_string(t.task.option_a),
                              to_string(t.task.option_b), to_string(t.choice), "", "", "", "",
                              join_flags(t.flags), t.timestamp});
    auto flags = s.flags;
    flags.insert(flags.end(), s.estimates.flags.begin(), s.estimates.flags.end());
    out += csv::format_row({s.session_id, std::to_string(++seq), "estimates", "", "", "", "", "", "",
                            opt_number(s.estimates.d_point), opt_number(s.estimates.tau_point), "", "",
                            join_flags(flags), ""});
    if (s.payment)
      out += csv::format_row({s.session_id, std::to_string(++seq), "payment", "", "", s.payment->task_id, "", "",
                              to_string(s.payment->option), "", "", format_number(s.payment->points),
                              format_number(s.payment->usd), "", ""});
  }
  return out;
}

std::vector<Transcript> parse_transcript_csv(std::string_view text, const ExperimentConfig& config) {
  auto rows = csv::parse(text);
  std::vector<Transcript> out;
  if (rows.empty()) return out;
  const auto& h = rows.front();
  std::map<std::string, std::size_t> col;
  for (const auto& name : transcript_columns()) col[name] = csv::column(h, name);
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != h.size()) throw csv::CsvError("transcript row " + std::to_string(i) + " has the wrong width");
    auto get = [&](const char* name) -> const std::string& { return r[col.at(name)]; };
    const auto& id = get("session_id");
    auto [it, fresh] = index.emplace(id, out.size());
    if (fresh) {
      out.emplace_back();
      out.back().session_id = id;
    }
    auto& tr = out[it->second];
    const auto& kind = get("record");
    if (kind == "task") {
      ChoiceTask task{get("task_id"), std::stoi(get("stage")), std::stoi(get("row")),
                      parse_lottery(get("option_a"), config.space), parse_lottery(get("option_b"), config.space),
                      {}};
      tr.tasks.push_back({std::move(task), parse_choice(get("choice")), get("timestamp"), split_flags(get("flags"))});
    } else if (kind == "estimates") {
      auto& e = tr.estimates;
      e.d_point = parse_opt(get("d_point"));
      e.tau_point = parse_opt(get("tau_point"));
      e.d_used = e.d_point.value_or(config.fallback_d);
      e.tau_used = e.tau_point.value_or(config.fallback_tau);
      e.flags = split_flags(get("flags"));
    } else if (kind == "payment") {
      Payment p;
      p.task_id = get("task_id");
      p.option = parse_choice(get("choice"));
      p.points = std::stod(get("points"));
      p.usd = std::stod(get("usd"));
      auto pos = std::find_if(tr.tasks.begin(), tr.tasks.end(), [&](const TaskRecord& t) { return t.task.id == p.task_id; });
      p.task_index = static_cast<std::size_t>(pos - tr.tasks.begin());
      tr.payment = p;
    } else {
      throw csv::CsvError("unknown transcript record '" + kind + "'");
    }
  }
  return out;
}

}  // namespace ecu
