#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"
#include "ecu/examples.hpp"
#include "ecu/model_io.hpp"
#include "ecu/triangle.hpp"
#include "json.hpp"

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(ECU_CLI_PATH) + " " + args + " 2>/dev/null";
  std::FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  std::string out;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
  const int rc = pclose(p);
  return {WEXITSTATUS(rc), out};
}

}  // namespace

TEST_CASE("verify-examples") {
  auto text = run("verify-examples");
  CHECK(text.status == 0);
  CHECK(text.out.find("[FAIL-AS-PRINTED] p > q") != std::string::npos);
  auto j = nlohmann::json::parse(run("verify-examples --format json").out);
  CHECK(j["checks"].size() == ecu::verify_examples().checks.size());
}

TEST_CASE("simulate then analyze") {
  auto dir = std::filesystem::temp_directory_path() / "ecu-cli-test";
  std::filesystem::create_directories(dir);
  auto csv = dir / "t.csv";
  auto sim = run("simulate --agents 20 --seed 3 > " + csv.string());
  CHECK(sim.status == 0);
  CHECK(run("simulate --agents 20 --seed 3").out == run("simulate --agents 20 --seed 3").out);
  auto a = run("analyze --input " + csv.string() + " --format json");
  REQUIRE(a.status == 0);
  auto j = nlohmann::json::parse(a.out);
  CHECK(j["suite"] == "main");
  auto pilot = run("analyze --suite pilot");
  CHECK(pilot.out.find("session2-stage2") != std::string::npos);
  CHECK(run("analyze --suite main").status != 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("triangle and audit") {
  auto dir = std::filesystem::temp_directory_path() / "ecu-cli-tri";
  std::filesystem::create_directories(dir);
  auto model = dir / "m.json";
  std::ofstream(model) << ecu::dump_model(ecu::example_model(1));
  auto tri = run("triangle --model " + model.string() + " --H 300 --M 100 --L 0 --levels 0.2,0.5");
  REQUIRE(tri.status == 0);
  auto set = ecu::parse_curves_csv(tri.out);
  CHECK(set.curves.size() == 2);
  CHECK(set.rules.size() == 1);
  auto svg = run("triangle --example 1 --H 300 --M 100 --L 0 --format svg");
  CHECK(svg.out.find("<svg") != std::string::npos);
  auto audit = run("audit --example 1 --grid-step 5 --format json");
  CHECK(audit.status == 0);
  auto j = nlohmann::json::parse(audit.out);
  CHECK(j["passed"] == true);
  CHECK(j["threshold"]["point"] == 20.0);
  CHECK(run("audit").status != 0);
  std::filesystem::remove_all(dir);
}
