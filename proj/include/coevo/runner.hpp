#ifndef COEVO_RUNNER_HPP
#define COEVO_RUNNER_HPP

#include <optional>
#include <string>
#include <vector>

#include "coevo/aut.hpp"
#include "coevo/ccea.hpp"

namespace coevo {

struct RunConfig {
  std::string model_path;
  std::string vuln_path;
  std::size_t workers = 10;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  std::optional<std::string> smt_dump_dir;
  EngineConfig engine;
};

struct WorkerReport {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double seconds = 0;
  WorkerStats stats;
};

struct RunResult {
  std::vector<WorkerReport> reports;
  bool any_success = false;
};

// Runs the workers in parallel (each fully independent) and joins.
RunResult run_workers(const AutModel& model, const VulnSpec& vuln, const RunConfig& cfg);

// digest_test<i>.csv fitness curves, exploit_<i>.txt scripts for successful
// workers, and a summary file, all under cfg.out_dir.
void write_artifacts(const RunResult& result, const RunConfig& cfg);

// Dumps each procedure's call contract (and the vulnerability contract) in
// solver text format under dir.
void dump_smt(const AutModel& model, const VulnSpec& vuln, const std::string& dir);

// One action per line: `click <x> <y>` or `type "<string>"` with backslash
// escapes for quote and backslash.
std::string format_action_script(const std::vector<Action>& actions);
std::vector<Action> parse_action_script(std::string_view text);

struct ReplayResult {
  ExecutionTrace trace;
  std::optional<SinkEvent> trigger;
};

ReplayResult replay(const AutModel& model, const VulnSpec& vuln, const std::vector<Action>& actions);

}  // namespace coevo

#endif
