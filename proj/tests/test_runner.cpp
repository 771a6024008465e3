#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "coevo/errors.hpp"
#include "coevo/runner.hpp"
#include "test_support.hpp"

using namespace coevo;
using namespace coevo::test;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("action scripts round-trip") {
  std::vector<Action> actions{Action::click(17, 5), Action::type("a \"quoted\" \\ string"),
                              Action::click(0, 127), Action::type("")};
  std::string script = format_action_script(actions);
  CHECK(parse_action_script(script) == actions);
}

TEST_CASE("script parse errors") {
  CHECK_THROWS_AS(parse_action_script("hover 1 2\n"), ScriptError);
  CHECK_THROWS_AS(parse_action_script("click 1\n"), ScriptError);
  CHECK_THROWS_AS(parse_action_script("type \"open\n"), ScriptError);
  CHECK_THROWS_AS(parse_action_script("click 1 2 3\n"), ScriptError);
  CHECK_THROWS_AS(parse_action_script("type \"a\" junk\n"), ScriptError);
  CHECK(parse_action_script("").empty());
  CHECK(parse_action_script("\n   \n").empty());
}

TEST_CASE("replay reports the trigger verdict") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();

  auto hit = replay(m, v, parse_action_script(
      "click 64 30\ntype \"<script>alert(1)</script>\"\nclick 64 80\nclick 64 30\n"));
  REQUIRE(hit.trigger.has_value());
  CHECK(hit.trigger->procedure == "welcome");
  CHECK(hit.trigger->signature == "echo");

  auto miss = replay(m, v, parse_action_script(
      "click 64 30\ntype \"john42\"\nclick 64 80\nclick 64 80\n"));
  CHECK_FALSE(miss.trigger.has_value());
  CHECK(miss.trace.invocations.back().procedure == "signup");

  auto idle = replay(m, v, {});
  CHECK_FALSE(idle.trigger.has_value());
  REQUIRE(idle.trace.invocations.size() == 1);
}

TEST_CASE("run artifacts: curves, scripts and summary") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  RunConfig cfg;
  cfg.workers = 2;
  cfg.seed = 8;
  cfg.engine.max_generations = 5;
  cfg.engine.test_population = 10;
  const auto dir = std::filesystem::temp_directory_path() / "coevo_runner_test";
  std::filesystem::remove_all(dir);
  cfg.out_dir = dir.string();

  RunResult result = run_workers(m, v, cfg);
  REQUIRE(result.reports.size() == 2);
  write_artifacts(result, cfg);

  for (int i = 0; i < 2; ++i) {
    std::string csv = slurp(dir / ("digest_test" + std::to_string(i) + ".csv"));
    std::istringstream lines(csv);
    std::string line;
    REQUIRE(std::getline(lines, line));
    REQUIRE(line == "X,Y");
    long long prev_x = -1;
    double prev_y = 1e100;
    int rows = 0;
    while (std::getline(lines, line)) {
      const auto comma = line.find(',');
      REQUIRE(comma != std::string::npos);
      const long long x = std::stoll(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      REQUIRE(x > prev_x);
      REQUIRE(y <= prev_y);
      prev_x = x;
      prev_y = y;
      ++rows;
    }
    REQUIRE(rows == static_cast<int>(result.reports[static_cast<std::size_t>(i)].stats.curve.size()));
  }

  std::string summary = slurp(dir / "summary");
  CHECK(summary.find("workers: 2") != std::string::npos);
  CHECK(summary.find("worker 0:") != std::string::npos);
  CHECK(summary.find("worker 1:") != std::string::npos);

  // every emitted exploit script replays to a trigger
  for (const auto& report : result.reports) {
    if (report.stats.termination != Termination::success) continue;
    const auto path = dir / ("exploit_" + std::to_string(report.index) + ".txt");
    auto actions = parse_action_script(slurp(path));
    CHECK(replay(m, v, actions).trigger.has_value());
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("solver dumps cover every procedure") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  const auto dir = std::filesystem::temp_directory_path() / "coevo_smt_dump";
  std::filesystem::remove_all(dir);
  dump_smt(m, v, dir.string());
  for (const char* name : {"signup.smt2", "confirm.smt2", "welcome.smt2", "vuln.smt2"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  std::string confirm = slurp(dir / "confirm.smt2");
  CHECK(confirm.find("(declare-const payload String)") != std::string::npos);
  CHECK(confirm.find("str.in.re") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("single worker with a zero budget yields one csv row") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  RunConfig cfg;
  cfg.workers = 1;
  cfg.engine.max_generations = 0;
  cfg.engine.test_population = 5;
  const auto dir = std::filesystem::temp_directory_path() / "coevo_zero_budget";
  std::filesystem::remove_all(dir);
  cfg.out_dir = dir.string();
  RunResult result = run_workers(m, v, cfg);
  CHECK_FALSE(result.any_success);
  write_artifacts(result, cfg);
  std::string csv = slurp(dir / "digest_test0.csv");
  int newlines = 0;
  for (char c : csv) newlines += c == '\n';
  CHECK(newlines == 2);  // header plus a single row
  std::filesystem::remove_all(dir);
}
