#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "coevo/errors.hpp"
#include "coevo/runner.hpp"

namespace {

int do_run(const coevo::RunConfig& cfg) {
  const coevo::AutModel model = coevo::load_model(cfg.model_path);
  const coevo::VulnSpec vuln = coevo::load_vuln_spec(cfg.vuln_path);
  if (cfg.smt_dump_dir) coevo::dump_smt(model, vuln, *cfg.smt_dump_dir);

  const coevo::RunResult result = coevo::run_workers(model, vuln, cfg);
  coevo::write_artifacts(result, cfg);

  for (const auto& report : result.reports) {
    const auto& s = report.stats;
    std::cout << "worker " << report.index << ": "
              << (s.termination == coevo::Termination::success ? "success" : "cap")
              << " generations=" << s.generations << " best_phi=" << s.best_phi << " time="
              << report.seconds << "s\n";
  }
  std::cout << (result.any_success ? "exploit found" : "no exploit found") << "; artifacts in "
            << cfg.out_dir << "\n";
  return result.any_success ? 0 : 1;
}

int do_replay(const std::string& model_path, const std::string& vuln_path,
              const std::string& script_path) {
  const coevo::AutModel model = coevo::load_model(model_path);
  const coevo::VulnSpec vuln = coevo::load_vuln_spec(vuln_path);

  std::ifstream in(script_path, std::ios::binary);
  if (!in) throw coevo::ScriptError("cannot read script '" + script_path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto actions = coevo::parse_action_script(ss.str());

  const coevo::ReplayResult r = coevo::replay(model, vuln, actions);
  std::cout << "trace:\n";
  for (const auto& inv : r.trace.invocations) {
    std::cout << "  " << inv.procedure << coevo::to_display(inv.params) << "\n";
  }
  for (const auto& sink : r.trace.sinks) {
    std::cout << "  sink " << sink.procedure << " / " << sink.signature << " = "
              << coevo::to_display(coevo::Value(sink.value)) << "\n";
  }
  if (r.trigger) {
    std::cout << "TRIGGERED: " << r.trigger->procedure << " / " << r.trigger->signature << " with "
              << coevo::to_display(coevo::Value(r.trigger->value)) << "\n";
    return 0;
  }
  std::cout << "NOT TRIGGERED\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"contract-driven co-evolutionary exploit search"};
  app.require_subcommand(1);

  coevo::RunConfig cfg;
  std::string dump_dir;

  CLI::App* run = app.add_subcommand("run", "search for an exploit and write run artifacts");
  run->add_option("--aut", cfg.model_path, "application model file")->required();
  run->add_option("--vuln", cfg.vuln_path, "vulnerability specification file")->required();
  run->add_option("--workers", cfg.workers, "independent workers");
  run->add_option("--max-gens", cfg.engine.max_generations, "generation cap per worker");
  run->add_option("--pop", cfg.engine.test_population, "test population size");
  run->add_option("--contract-pop", cfg.engine.contract_population, "contract population size");
  run->add_option("--cx-prob", cfg.engine.crossover_prob, "crossover probability")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--mut-prob", cfg.engine.mutation_prob, "mutation probability")
      ->check(CLI::Range(0.0, 1.0));
  run->add_option("--clicks", cfg.engine.clicks, "click actions per test");
  run->add_option("--types", cfg.engine.types, "type actions per test");
  run->add_option("--seed", cfg.seed, "base random seed");
  run->add_option("--out", cfg.out_dir, "output directory");
  run->add_option("--dump-smt", dump_dir, "dump call contracts as solver text into this directory");

  std::string replay_model, replay_vuln, replay_script;
  CLI::App* rep = app.add_subcommand("replay", "re-execute an action script and print the verdict");
  rep->add_option("--aut", replay_model, "application model file")->required();
  rep->add_option("--vuln", replay_vuln, "vulnerability specification file")->required();
  rep->add_option("script", replay_script, "action script file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) {
      if (cfg.workers < 1) throw coevo::Error("workers must be >= 1");
      if (!dump_dir.empty()) cfg.smt_dump_dir = dump_dir;
      return do_run(cfg);
    }
    return do_replay(replay_model, replay_vuln, replay_script);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
