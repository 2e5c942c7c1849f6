#include "ecu/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ecu/bisection.hpp"
#include "ecu/csv.hpp"

namespace ecu::stats {

namespace {

double log_choose(double n, double k) { return std::lgamma(n + 1) - std::lgamma(k + 1) - std::lgamma(n - k + 1); }

double binom_log_pmf(int j, int n, double p) {
  if (p == 0.0) return j == 0 ? 0.0 : -INFINITY;
  if (p == 1.0) return j == n ? 0.0 : -INFINITY;
  return log_choose(n, j) + j * std::log(p) + (n - j) * std::log1p(-p);
}

void check_counts(int s, int n) {
  if (n < 0 || s < 0 || s > n) throw std::invalid_argument("need 0 <= successes <= trials");
}

}  // namespace

ChoiceMatrix::ChoiceMatrix(std::vector<std::string> row_ids, std::vector<std::vector<int>> rows)
    : row_ids_(std::move(row_ids)) {
  if (row_ids_.size() != rows.size()) throw std::invalid_argument("one id per row");
  tasks_ = rows.empty() ? 0 : rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != tasks_) throw std::invalid_argument("choice matrix must be rectangular");
    for (int v : r) {
      if (v != 0 && v != 1) throw std::invalid_argument("choice matrix entries must be 0 or 1");
      cells_.push_back(v);
    }
  }
}

int count_switches(std::span<const int> row) {
  int n = 0;
  for (std::size_t i = 1; i < row.size(); ++i) n += row[i] != row[i - 1];
  return n;
}

SwitcherSummary switcher_summary(const ChoiceMatrix& m) {
  SwitcherSummary s;
  s.participants = m.participants();
  long total = 0;
  for (std::size_t i = 0; i < m.participants(); ++i) {
    int k = count_switches(m.row(i));
    s.switches.push_back(k);
    if (k > 0) {
      ++s.switchers;
      total += k;
    }
    if (k == 1) ++s.single_switchers;
  }
  if (s.participants) s.share = static_cast<double>(s.switchers) / static_cast<double>(s.participants);
  if (s.switchers) s.mean_switches_conditional = static_cast<double>(total) / static_cast<double>(s.switchers);
  return s;
}

std::vector<RawMatrixRow> parse_raw_matrix_csv(std::string_view text) {
  auto rows = csv::parse(text);
  std::vector<RawMatrixRow> out;
  if (rows.empty()) return out;
  const auto& h = rows.front();
  std::optional<std::size_t> session, subject, stage;
  std::vector<std::size_t> task_cols;
  for (std::size_t j = 0; j < h.size(); ++j) {
    if (h[j] == "session") session = j;
    else if (h[j] == "subject") subject = j;
    else if (h[j] == "stage") stage = j;
    else task_cols.push_back(j);
  }
  if (task_cols.size() < 2) throw csv::CsvError("raw matrix needs at least two task columns");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.size() != h.size()) throw csv::CsvError("raw matrix row " + std::to_string(i) + " has the wrong width");
    RawMatrixRow row;
    if (session) row.session = r[*session];
    row.subject = subject ? r[*subject] : std::to_string(i);
    if (stage) row.stage = r[*stage];
    for (auto j : task_cols) {
      if (r[j] != "0" && r[j] != "1") throw csv::CsvError("raw matrix entries must be 0 or 1");
      row.cells.push_back(r[j] == "1");
    }
    out.push_back(std::move(row));
  }
  return out;
}

std::string raw_matrix_csv(const std::vector<RawMatrixRow>& rows) {
  std::size_t width = rows.empty() ? 0 : rows.front().cells.size();
  csv::Row header{"session", "subject", "stage"};
  for (std::size_t j = 1; j <= width; ++j) header.push_back("task" + std::to_string(j));
  std::string out = csv::format_row(header);
  for (const auto& r : rows) {
    if (r.cells.size() != width) throw std::invalid_argument("raw matrix rows differ in width");
    csv::Row line{r.session, r.subject, r.stage};
    for (int v : r.cells) line.push_back(std::to_string(v));
    out += csv::format_row(line);
  }
  return out;
}

double binom_upper_tail(int s, int n, double p) {
  check_counts(s, n);
  if (s == 0) return 1.0;
  double sum = 0.0;
  for (int j = s; j <= n; ++j) sum += std::exp(binom_log_pmf(j, n, p));
  return std::min(1.0, sum);
}

double binom_lower_tail(int s, int n, double p) {
  if (s < 0) return 0.0;
  check_counts(s, n);
  double sum = 0.0;
  for (int j = 0; j <= s; ++j) sum += std::exp(binom_log_pmf(j, n, p));
  return std::min(1.0, sum);
}

BinomialTestResult binom_exact(int successes, int trials, double p0, double confidence) {
  check_counts(successes, trials);
  if (!(p0 > 0.0 && p0 < 1.0)) throw std::invalid_argument("p0 must lie in (0, 1)");
  if (trials == 0) throw std::invalid_argument("binomial test needs at least one trial");
  BinomialTestResult r;
  r.successes = successes;
  r.trials = trials;
  r.p0 = p0;
  r.p_value = binom_upper_tail(successes, trials, p0);
  r.point_estimate = static_cast<double>(successes) / trials;
  const double alpha = 1.0 - confidence;
  if (successes > 0) {
    auto f = [&](double p) { return binom_upper_tail(successes, trials, p) - alpha; };
    BisectionOptions opt;
    opt.value_tol = 1e-14;
    opt.x_tol = 1e-14;
    r.ci_lower = bisect_increasing(f, 0.0, 1.0, opt).root;
  }
  return r;
}

double fisher_table_probability(const Contingency2x2& t, long x) {
  const long r1 = t.a + t.b, c1 = t.a + t.c, n = t.a + t.b + t.c + t.d;
  const long lo = std::max(0L, r1 + c1 - n), hi = std::min(r1, c1);
  if (x < lo || x > hi) return 0.0;
  return std::exp(log_choose(r1, x) + log_choose(n - r1, c1 - x) - log_choose(n, c1));
}

FisherResult fisher_exact(const Contingency2x2& t) {
  if (t.a < 0 || t.b < 0 || t.c < 0 || t.d < 0) throw std::invalid_argument("counts must be non-negative");
  const long r1 = t.a + t.b, r2 = t.c + t.d, c1 = t.a + t.c, c2 = t.b + t.d;
  if (r1 == 0 || r2 == 0 || c1 == 0 || c2 == 0) throw std::invalid_argument("Fisher test needs positive margins");
  const long n = r1 + r2;
  const long lo = std::max(0L, r1 + c1 - n), hi = std::min(r1, c1);
  const double observed = fisher_table_probability(t, t.a);
  FisherResult r{0.0, 0.0};
  for (long x = lo; x <= hi; ++x) {
    double p = fisher_table_probability(t, x);
    if (x >= t.a) r.p_one_sided += p;
    if (p <= observed * (1.0 + 1e-7)) r.p_two_sided += p;
  }
  r.p_one_sided = std::min(1.0, r.p_one_sided);
  r.p_two_sided = std::min(1.0, r.p_two_sided);
  return r;
}

}  // namespace ecu::stats
