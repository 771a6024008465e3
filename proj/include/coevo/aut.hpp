#ifndef COEVO_AUT_HPP
#define COEVO_AUT_HPP

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "coevo/contract.hpp"
#include "coevo/value.hpp"

namespace coevo {

// Literal text with ${var} interpolation over parameters and session state.
struct ValueTemplate {
  struct Piece {
    bool is_var = false;
    std::string text;
  };
  std::vector<Piece> pieces;

  static ValueTemplate parse(std::string_view text);
  std::string expand(const Env& scope) const;  // unbound variables expand empty
};

struct Control {
  enum class Kind { text_field, button, link };
  Kind kind = Kind::text_field;
  std::string name;
  int x = 0, y = 0, w = 0, h = 0;
  std::string field;                  // text_field: form field written into
  std::string target;                 // button/link: invoked procedure
  std::map<std::string, Value> link_params;

  bool contains(int px, int py) const {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
};

struct Page {
  std::vector<Control> controls;
};

struct Transform {
  std::string var;
  bool is_replace = true;
  RegexPtr pattern;  // leftmost-longest replace of every match
  std::shared_ptr<const Dfa> pattern_dfa;
  std::string replacement;
  std::string constant;  // is_replace == false: plain assignment
};

struct SessionAssign {
  std::string var;
  ValueTemplate value;
};

struct Sink {
  std::string signature;
  ValueTemplate value;
};

struct Param {
  std::string name;
  ValueType type = ValueType::string;
  std::optional<std::string> from_session;  // bound from session instead of the request
};

struct Procedure {
  std::string name;
  std::vector<Param> params;
  Contract guard;          // pass/fail branch condition
  Contract call_contract;  // sufficient condition to advance toward the target
  std::vector<Transform> transforms;
  std::vector<SessionAssign> session_assigns;
  std::string render;                   // page shown on pass; own page if empty
  std::optional<std::string> redirect;  // invoked on fail
  std::vector<Sink> sinks;
  Page page;
};

struct AutModel {
  int canvas_w = 128;
  int canvas_h = 128;
  int max_input_length = 30;
  std::string entry;
  std::vector<Procedure> procedures;
  std::map<std::string, std::size_t> index;

  const Procedure& proc(const std::string& name) const;
  bool has_proc(const std::string& name) const { return index.count(name) != 0; }
};

struct VulnSpec {
  std::string signature;
  Contract contract;  // over the sink value; at most one free string variable
};

struct Action {
  enum class Kind { click, type };
  Kind kind = Kind::click;
  int x = 0, y = 0;
  std::string text;

  static Action click(int x, int y);
  static Action type(std::string s);
  bool operator==(const Action&) const = default;
};

struct Invocation {
  std::string procedure;
  ParamVector params;  // post-dispatch, pre-transform actuals
  bool operator==(const Invocation&) const = default;
};

struct SinkEvent {
  std::string procedure;
  std::string signature;
  std::string value;  // post-transform
  bool operator==(const SinkEvent&) const = default;
};

struct ExecutionTrace {
  std::vector<Invocation> invocations;
  std::vector<SinkEvent> sinks;
};

AutModel load_model(const std::string& path);
AutModel parse_model_text(std::string_view text);

VulnSpec load_vuln_spec(const std::string& path);
VulnSpec parse_vuln_spec_text(std::string_view text);

// Procedures declaring a sink whose signature matches the specification.
std::set<std::string> target_procedures(const AutModel& m, const VulnSpec& v);

// Per procedure, shortest path length to any target along render, redirect
// and control-target edges; nullopt where no target is reachable.
using DistanceMap = std::map<std::string, std::optional<std::uint32_t>>;
DistanceMap call_graph_distances(const AutModel& m, const std::set<std::string>& targets);

// Deterministic simulation from the entry page.
ExecutionTrace execute_test(const AutModel& m, const std::vector<Action>& actions);

// First sink event satisfying the specification, if any.
std::optional<SinkEvent> find_trigger(const ExecutionTrace& tr, const VulnSpec& v);

bool is_successful(const ExecutionTrace& tr, const VulnSpec& v);

}  // namespace coevo

#endif
