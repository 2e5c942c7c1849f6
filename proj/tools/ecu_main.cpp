// ecu: command-line front end for the library and the session service.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "ecu/audit.hpp"
#include "ecu/examples.hpp"
#include "ecu/http_api.hpp"
#include "ecu/model_io.hpp"
#include "ecu/pilot_data.hpp"
#include "ecu/report.hpp"
#include "ecu/triangle.hpp"
#include "httplib.h"

namespace {

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string read_file(const std::string& path) {
  if (path == "-") {
    std::stringstream buf;
    buf << std::cin.rdbuf();
    return buf.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ecu::EcuModel model_from(const std::string& path, int example) {
  if (!path.empty()) return ecu::load_model(path);
  if (example >= 1 && example <= 4) return ecu::example_model(example);
  throw CLI::ValidationError("--model", "give a model file or --example 1..4");
}

std::vector<double> parse_levels(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(std::stod(item));
  return out;
}

httplib::Server* g_server = nullptr;

int serve(const std::string& content_path, const std::string& store) {
  auto content = content_path.empty() ? ecu::default_content() : ecu::load_content(content_path);
  ecu::SessionService service(std::move(content), store);
  httplib::Server server;
  ecu::register_routes(server, service, env_or("ECU_OPERATOR_TOKEN", ""));

  const auto bind = env_or("ECU_BIND", "127.0.0.1:8080");
  const auto colon = bind.rfind(':');
  if (colon == std::string::npos) throw std::runtime_error("ECU_BIND must be host:port");
  const auto host = bind.substr(0, colon);
  const int port = std::stoi(bind.substr(colon + 1));

  g_server = &server;
  std::signal(SIGINT, [](int) { g_server->stop(); });
  std::signal(SIGTERM, [](int) { g_server->stop(); });
  std::cerr << "listening on " << host << ":" << port << (store.empty() ? " (in-memory store)" : " store " + store)
            << "\n";
  if (!server.listen(host, port)) throw std::runtime_error("cannot bind " + bind);
  service.snapshot();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Expected contextual utility toolkit"};
  app.require_subcommand(1);

  std::string content_path, store = env_or("ECU_STORE", "");
  auto* serve_cmd = app.add_subcommand("serve", "Run the experiment HTTP service");
  serve_cmd->add_option("--content", content_path, "Experiment content JSON (default content if omitted)");
  serve_cmd->add_option("--store", store, "Event log path; empty keeps sessions in memory (env ECU_STORE)");

  int agents = 100;
  std::string model_path;
  std::uint64_t seed = 1;
  bool eu_agents = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate sessions and write a transcript CSV to stdout");
  sim_cmd->add_option("--agents", agents, "Number of simulated participants")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--model", model_path, "Model JSON shared by every agent (random binary agents if omitted)");
  sim_cmd->add_option("--seed", seed, "Master seed");
  sim_cmd->add_flag("--eu", eu_agents, "Draw random expected-utility agents instead of binary ECU agents");

  std::string format = "text";
  auto* verify_cmd = app.add_subcommand("verify-examples", "Recompute the four worked examples");
  verify_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  std::string input, suite = "main";
  auto* analyze_cmd = app.add_subcommand("analyze", "Compute the results tables");
  analyze_cmd->add_option("--input", input, "Transcript CSV (main) or raw choice matrix CSV (pilot); - for stdin");
  analyze_cmd->add_option("--suite", suite, "main or pilot")->check(CLI::IsMember({"main", "pilot"}));
  analyze_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  int example = 0;
  double H = 0, M = 0, L = 0, step = ecu::kCurveStep;
  std::string levels = "0.1,0.3,0.5,0.7,0.9", curve_format = "csv";
  auto* tri_cmd = app.add_subcommand("triangle", "Indifference map in the probability triangle");
  tri_cmd->add_option("--model", model_path, "Model JSON");
  tri_cmd->add_option("--example", example, "Use a built-in example model (1-4)");
  tri_cmd->add_option("--H", H, "High prize")->required();
  tri_cmd->add_option("--M", M, "Middle prize")->required();
  tri_cmd->add_option("--L", L, "Low prize")->required();
  tri_cmd->add_option("--levels", levels, "Comma-separated pH values where curves meet the pL = 0 edge");
  tri_cmd->add_option("--step", step, "pL step");
  tri_cmd->add_option("--format", curve_format, "csv or svg")->check(CLI::IsMember({"csv", "svg"}));

  double grid_step = 1.0;
  auto* audit_cmd = app.add_subcommand("audit", "Check the axioms and reconstruct the model from its preferences");
  audit_cmd->add_option("--model", model_path, "Model JSON");
  audit_cmd->add_option("--example", example, "Use a built-in example model (1-4)");
  audit_cmd->add_option("--grid-step", grid_step, "Prize grid step")->check(CLI::PositiveNumber);
  audit_cmd->add_option("--format", format, "text or json")->check(CLI::IsMember({"text", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*serve_cmd) return serve(content_path, store);

    if (*sim_cmd) {
      const ecu::ExperimentConfig config;
      std::mt19937_64 rng(seed);
      std::optional<ecu::EcuModel> shared;
      if (!model_path.empty()) shared = ecu::load_model(model_path);
      std::vector<ecu::Transcript> sessions;
      for (int i = 0; i < agents; ++i) {
        const auto model = shared ? *shared
                           : eu_agents ? ecu::random_eu_agent(rng, config).model
                                       : ecu::random_binary_agent(rng, config).model;
        char id[16];
        std::snprintf(id, sizeof id, "sim-%05d", i + 1);
        sessions.push_back(ecu::simulate_session(model, config, rng(), id));
      }
      std::cout << ecu::transcript_csv(sessions);
      return 0;
    }

    if (*verify_cmd) {
      const auto report = ecu::verify_examples();
      std::cout << (format == "json" ? ecu::render_json(report) : ecu::render_text(report));
      return 0;
    }

    if (*analyze_cmd) {
      ecu::ResultsReport report;
      if (suite == "pilot") {
        report = ecu::pilot_report(input.empty() ? ecu::pilot_rows() : ecu::stats::parse_raw_matrix_csv(read_file(input)));
      } else {
        if (input.empty()) throw CLI::ValidationError("--input", "the main suite needs a transcript CSV");
        report = ecu::main_report(ecu::parse_transcript_csv(read_file(input), ecu::ExperimentConfig{}));
      }
      std::cout << (format == "json" ? ecu::render_json(report) : ecu::render_text(report));
      return 0;
    }

    if (*tri_cmd) {
      const ecu::TriangleSpec spec(H, M, L, model_from(model_path, example));
      ecu::CurveSet set;
      set.title = std::string("ECU indifference map (") + ecu::to_string(ecu::classify_case(spec)) + ")";
      set.curves = ecu::indifference_map(spec, parse_levels(levels), step);
      if (spec.model.family().binary())
        if (auto rule = ecu::threshold_line(spec)) set.rules.push_back(*rule);
      std::cout << ecu::export_curves(set, ecu::parse_curve_format(curve_format));
      return 0;
    }

    if (*audit_cmd) {
      const auto model = model_from(model_path, example);
      const auto grids = ecu::default_grids(model.space(), grid_step);
      const auto rec = ecu::run_audit(ecu::oracle_from(model), grids);
      const auto& a = rec.audit;
      if (format == "json") {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : a.checks)
          checks.push_back({{"axiom", c.axiom}, {"passed", c.passed}, {"witnesses", c.witnesses.size()}, {"note", c.note}});
        nlohmann::json j = {{"passed", a.passed()},
                            {"checks", checks},
                            {"threshold", {{"lower", a.threshold.lower}, {"upper", a.threshold.upper},
                                           {"point", a.threshold.point()}, {"prefix", a.threshold.prefix_structure}}},
                            {"true_threshold", model.threshold()},
                            {"variation_condition", a.variation_condition},
                            {"notes", a.notes}};
        std::cout << j.dump(2) << "\n";
      } else {
        for (const auto& c : a.checks)
          std::cout << (c.passed ? "PASS " : "FAIL ") << c.axiom << (c.note.empty() ? "" : "  (" + c.note + ")")
                    << "\n";
        std::cout << "threshold in [" << a.threshold.lower << ", " << a.threshold.upper << "), point "
                  << a.threshold.point() << " (model d = " << model.threshold() << ")\n";
        std::cout << "variation condition: " << (a.variation_condition ? "holds" : "fails") << "\n";
        for (const auto& n : a.notes) std::cout << "note: " << n << "\n";
      }
      return a.passed() ? 0 : 2;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "ecu: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
