#include "coevo/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "coevo/errors.hpp"
#include "coevo/smtlib.hpp"

namespace coevo {

namespace {

std::uint64_t worker_seed(std::uint64_t base, std::size_t index) {
  // splitmix64 of (base, index) so adjacent seeds decorrelate
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

}  // namespace

RunResult run_workers(const AutModel& model, const VulnSpec& vuln, const RunConfig& cfg) {
  RunResult result;
  result.reports.resize(cfg.workers);
  std::vector<std::exception_ptr> errors(cfg.workers);

  auto body = [&](std::size_t i) {
    auto& report = result.reports[i];
    report.index = i;
    report.seed = worker_seed(cfg.seed, i);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      report.stats = run_worker(model, vuln, cfg.engine, report.seed);
    } catch (...) {
      errors[i] = std::current_exception();
    }
    report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  std::vector<std::thread> threads;
  threads.reserve(cfg.workers);
  for (std::size_t i = 0; i < cfg.workers; ++i) threads.emplace_back(body, i);
  for (auto& t : threads) t.join();

  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (const auto& r : result.reports) {
    result.any_success = result.any_success || r.stats.termination == Termination::success;
  }
  return result;
}

namespace {

std::string format_phi(double phi) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", phi);
  return buf;
}

}  // namespace

void write_artifacts(const RunResult& result, const RunConfig& cfg) {
  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);

  for (const auto& report : result.reports) {
    std::ofstream csv(fs::path(cfg.out_dir) / ("digest_test" + std::to_string(report.index) + ".csv"));
    csv << "X,Y\n";
    for (const auto& [gen, phi] : report.stats.curve) {
      csv << gen << ',' << format_phi(phi) << '\n';
    }
    if (report.stats.termination == Termination::success) {
      std::ofstream script(fs::path(cfg.out_dir) / ("exploit_" + std::to_string(report.index) + ".txt"));
      script << format_action_script(report.stats.best);
    }
  }

  std::ofstream summary(fs::path(cfg.out_dir) / "summary");
  summary << "result: " << (result.any_success ? "success" : "cap") << "\n";
  summary << "workers: " << result.reports.size() << "\n";
  summary << "seed: " << cfg.seed << "\n";
  std::uint64_t total_generations = 0;
  double total_seconds = 0;
  for (const auto& report : result.reports) {
    const auto& s = report.stats;
    summary << "worker " << report.index << ": "
            << (s.termination == Termination::success ? "success" : "cap")
            << " generations=" << s.generations << " best_phi=" << format_phi(s.best_phi)
            << " time=" << format_phi(report.seconds) << "s\n";
    total_generations += s.generations;
    total_seconds += report.seconds;
  }
  if (total_seconds > 0) {
    summary << "throughput: " << format_phi(static_cast<double>(total_generations) / total_seconds)
            << " generations/s per worker\n";
  }
}

void dump_smt(const AutModel& model, const VulnSpec& vuln, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  for (const auto& p : model.procedures) {
    std::ofstream out(fs::path(dir) / (p.name + ".smt2"));
    out << export_smtlib(p.call_contract);
  }
  std::ofstream out(fs::path(dir) / "vuln.smt2");
  out << export_smtlib(vuln.contract);
}

// ---------------------------------------------------------------------------
// Action scripts

std::string format_action_script(const std::vector<Action>& actions) {
  std::string out;
  for (const auto& a : actions) {
    if (a.kind == Action::Kind::click) {
      out += "click " + std::to_string(a.x) + " " + std::to_string(a.y) + "\n";
    } else {
      out += "type \"";
      for (char c : a.text) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
      }
      out += "\"\n";
    }
  }
  return out;
}

namespace {

[[noreturn]] void script_fail(std::size_t line_no, const std::string& msg) {
  throw ScriptError("line " + std::to_string(line_no) + ": " + msg);
}

}  // namespace

std::vector<Action> parse_action_script(std::string_view text) {
  std::vector<Action> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string_view::npos) {
      if (pos > text.size()) break;
      continue;
    }

    std::istringstream ss{std::string(line)};
    std::string verb;
    ss >> verb;
    if (verb == "click") {
      long long x, y;
      if (!(ss >> x >> y)) script_fail(line_no, "click needs two integer coordinates");
      std::string rest;
      if (ss >> rest) script_fail(line_no, "trailing input after click");
      out.push_back(Action::click(static_cast<int>(x), static_cast<int>(y)));
    } else if (verb == "type") {
      std::size_t q = line.find('"');
      if (q == std::string_view::npos) script_fail(line_no, "type needs a quoted string");
      std::string s;
      bool closed = false;
      for (std::size_t i = q + 1; i < line.size(); ++i) {
        char c = line[i];
        if (c == '\\') {
          if (i + 1 >= line.size()) script_fail(line_no, "unterminated escape");
          char e = line[++i];
          if (e != '"' && e != '\\') script_fail(line_no, "unknown escape sequence");
          s.push_back(e);
          continue;
        }
        if (c == '"') {
          closed = true;
          if (line.find_first_not_of(" \t\r", i + 1) != std::string_view::npos) {
            script_fail(line_no, "trailing input after string");
          }
          break;
        }
        s.push_back(c);
      }
      if (!closed) script_fail(line_no, "unterminated string");
      out.push_back(Action::type(std::move(s)));
    } else {
      script_fail(line_no, "unknown action '" + verb + "'");
    }
    if (pos > text.size()) break;
  }
  return out;
}

ReplayResult replay(const AutModel& model, const VulnSpec& vuln, const std::vector<Action>& actions) {
  ReplayResult r;
  r.trace = execute_test(model, actions);
  r.trigger = find_trigger(r.trace, vuln);
  return r;
}

}  // namespace coevo
