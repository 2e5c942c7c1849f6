#include "ecu/report.hpp"

#include <iomanip>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ecu {

namespace {

std::vector<int> coded(const std::vector<const TaskRecord*>& recs) {
  std::vector<int> out;
  for (const auto* r : recs) out.push_back(r->choice == Choice::B);
  return out;
}

void add_test(ResultsReport& r, const std::string& name, std::size_t count, std::size_t total) {
  if (total == 0) return;
  r.tests.push_back({name, stats::binom_exact(static_cast<int>(count), static_cast<int>(total))});
}

}  // namespace

const CountStat* ResultsReport::count(std::string_view name) const {
  for (const auto& c : counts)
    if (c.name == name) return &c;
  return nullptr;
}

const NamedSummary* ResultsReport::summary(std::string_view name) const {
  for (const auto& s : summaries)
    if (s.name == name) return &s;
  return nullptr;
}

ResultsReport main_report(const std::vector<Transcript>& sessions) {
  ResultsReport r;
  r.suite = "main";
  const std::size_t n = sessions.size();
  std::vector<std::string> ids;
  std::vector<std::vector<int>> stage_rows[2];
  std::size_t s1 = 0, s2 = 0, s2_given_s1 = 0, s2_given_no_s1 = 0, neither = 0, both = 0;
  std::map<std::string, std::size_t> reversals, reversals_dual;
  std::size_t flagged = 0;
  for (const auto& tr : sessions) {
    std::vector<const TaskRecord*> st[3];
    std::map<std::string, Choice> s3;
    for (const auto& t : tr.tasks) {
      if (t.task.stage < 1 || t.task.stage > 3) throw std::invalid_argument("transcript has an unknown stage");
      st[t.task.stage - 1].push_back(&t);
      if (t.task.stage == 3) s3[t.task.id] = t.choice;
    }
    if (st[0].empty() || st[1].empty()) throw std::invalid_argument("session " + tr.session_id + " lacks Stage 1 or 2");
    ids.push_back(tr.session_id);
    auto r1 = coded(st[0]), r2 = coded(st[1]);
    bool sw1 = stats::count_switches(r1) > 0, sw2 = stats::count_switches(r2) > 0;
    stage_rows[0].push_back(std::move(r1));
    stage_rows[1].push_back(std::move(r2));
    s1 += sw1;
    s2 += sw2;
    s2_given_s1 += sw1 && sw2;
    s2_given_no_s1 += !sw1 && sw2;
    neither += !sw1 && !sw2;
    both += sw1 && sw2;
    if (!tr.estimates.flags.empty() || !tr.flags.empty()) ++flagged;
    for (const auto& pair : stage3_pairs()) {
      auto a = s3.find(pair.first), b = s3.find(pair.second);
      if (a == s3.end() || b == s3.end()) continue;
      bool rev = a->second != b->second;
      reversals[pair.name] += rev;
      if (sw1 && sw2) reversals_dual[pair.name] += rev;
    }
  }
  r.counts = {{"stage1-switchers", s1, n},
              {"stage2-switchers", s2, n},
              {"stage2-switchers-given-stage1-switch", s2_given_s1, s1},
              {"stage2-switchers-given-no-stage1-switch", s2_given_no_s1, n - s1},
              {"dual-switchers", both, n},
              {"dual-non-switchers", neither, n},
              {"flagged-sessions", flagged, n}};
  for (const auto& pair : stage3_pairs()) {
    r.counts.push_back({"stage3-reversal-" + pair.name, reversals[pair.name], n});
    r.counts.push_back({"stage3-reversal-" + pair.name + "-among-dual-switchers", reversals_dual[pair.name], both});
  }
  r.summaries.push_back({"stage1", stats::switcher_summary(stats::ChoiceMatrix(ids, stage_rows[0]))});
  r.summaries.push_back({"stage2", stats::switcher_summary(stats::ChoiceMatrix(ids, stage_rows[1]))});
  add_test(r, "stage1-switchers", s1, n);
  add_test(r, "stage2-switchers-given-stage1-switch", s2_given_s1, s1);
  add_test(r, "stage2-switchers", s2, n);
  if (n == 0) r.notes.push_back("empty dataset");
  return r;
}

ResultsReport pilot_report(const std::vector<stats::RawMatrixRow>& rows) {
  ResultsReport r;
  r.suite = "pilot";
  std::map<std::pair<std::string, std::string>, std::pair<std::vector<std::string>, std::vector<std::vector<int>>>> groups;
  for (const auto& row : rows) {
    auto& g = groups[{row.session, row.stage}];
    g.first.push_back(row.subject);
    g.second.push_back(row.cells);
  }
  for (auto& [key, g] : groups) {
    std::string name = "session" + (key.first.empty() ? std::string("-") : key.first) + "-stage" +
                       (key.second.empty() ? std::string("-") : key.second);
    auto s = stats::switcher_summary(stats::ChoiceMatrix(g.first, g.second));
    r.counts.push_back({name + "-switchers", s.switchers, s.participants});
    r.counts.push_back({name + "-single-switchers", s.single_switchers, s.participants});
    r.summaries.push_back({name, std::move(s)});
  }
  r.notes.push_back("raw matrices: only coding-invariant statistics (switch counts) are reported");
  if (rows.empty()) r.notes.push_back("empty dataset");
  return r;
}

std::string render_text(const ResultsReport& r) {
  std::ostringstream os;
  os << "suite: " << r.suite << "\n\ncounts\n";
  os << std::fixed;
  for (const auto& c : r.counts)
    os << "  " << std::left << std::setw(58) << c.name << std::right << std::setw(5) << c.count << " / "
       << std::setw(5) << c.total << "  (" << std::setprecision(1) << 100.0 * c.share() << "%)\n";
  os << "\nswitching\n";
  for (const auto& s : r.summaries) {
    os << "  " << s.name << ": " << s.summary.switchers << " of " << s.summary.participants << " switched, "
       << s.summary.single_switchers << " once, mean switches among switchers ";
    if (s.summary.mean_switches_conditional)
      os << std::setprecision(4) << *s.summary.mean_switches_conditional;
    else
      os << "n/a";
    os << "\n";
  }
  if (!r.tests.empty()) {
    os << "\nexact binomial tests (H1: p > 0.5)\n";
    for (const auto& t : r.tests)
      os << "  " << std::left << std::setw(40) << t.name << std::right << " " << t.test.successes << "/"
         << t.test.trials << "  p = " << std::setprecision(4) << std::scientific << t.test.p_value << std::fixed
         << "  95% CI [" << std::setprecision(7) << t.test.ci_lower << ", 1]\n";
  }
  for (const auto& n : r.notes) os << "\nnote: " << n;
  if (!r.notes.empty()) os << "\n";
  return os.str();
}

std::string render_json(const ResultsReport& r) {
  using nlohmann::json;
  json j;
  j["suite"] = r.suite;
  j["counts"] = json::array();
  for (const auto& c : r.counts) j["counts"].push_back({{"name", c.name}, {"count", c.count}, {"total", c.total}});
  j["summaries"] = json::array();
  for (const auto& s : r.summaries) {
    json e = {{"name", s.name},
              {"participants", s.summary.participants},
              {"switchers", s.summary.switchers},
              {"single_switchers", s.summary.single_switchers},
              {"switches", s.summary.switches}};
    e["mean_switches_conditional"] =
        s.summary.mean_switches_conditional ? json(*s.summary.mean_switches_conditional) : json(nullptr);
    j["summaries"].push_back(std::move(e));
  }
  j["tests"] = json::array();
  for (const auto& t : r.tests)
    j["tests"].push_back({{"name", t.name},
                          {"successes", t.test.successes},
                          {"trials", t.test.trials},
                          {"p_value", t.test.p_value},
                          {"ci_lower", t.test.ci_lower}});
  j["notes"] = r.notes;
  return j.dump(2);
}

}  // namespace ecu
