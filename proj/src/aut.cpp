#include "coevo/aut.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "coevo/errors.hpp"

namespace coevo {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Templates

ValueTemplate ValueTemplate::parse(std::string_view text) {
  ValueTemplate out;
  std::string lit;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '$' && i + 1 < text.size() && text[i + 1] == '{') {
      std::size_t close = text.find('}', i + 2);
      if (close == std::string_view::npos) {
        throw SchemaError("unterminated ${...} in template: " + std::string(text));
      }
      if (!lit.empty()) {
        out.pieces.push_back({false, std::move(lit)});
        lit.clear();
      }
      out.pieces.push_back({true, std::string(text.substr(i + 2, close - i - 2))});
      i = close + 1;
      continue;
    }
    lit.push_back(text[i++]);
  }
  if (!lit.empty()) out.pieces.push_back({false, std::move(lit)});
  return out;
}

std::string ValueTemplate::expand(const Env& scope) const {
  std::string out;
  for (const auto& piece : pieces) {
    if (!piece.is_var) {
      out += piece.text;
      continue;
    }
    auto it = scope.find(piece.text);
    if (it == scope.end()) continue;  // unbound: expands empty
    if (value_type(it->second) == ValueType::string) {
      out += std::get<std::string>(it->second);
    } else {
      out += to_display(it->second);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Actions

Action Action::click(int x, int y) {
  Action a;
  a.kind = Kind::click;
  a.x = x;
  a.y = y;
  return a;
}

Action Action::type(std::string s) {
  Action a;
  a.kind = Kind::type;
  a.text = std::move(s);
  return a;
}

// ---------------------------------------------------------------------------
// Model loading

const Procedure& AutModel::proc(const std::string& name) const {
  auto it = index.find(name);
  if (it == index.end()) throw SchemaError("unknown procedure '" + name + "'");
  return procedures[it->second];
}

namespace {

ValueType parse_type(const std::string& s) {
  if (s == "string") return ValueType::string;
  if (s == "integer") return ValueType::integer;
  if (s == "boolean") return ValueType::boolean;
  throw SchemaError("unknown parameter type '" + s + "'");
}

Value value_from_json(const Json& j, const std::string& where) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  throw SchemaError("unsupported value in " + where);
}

Contract parse_model_contract(const Json& j, const std::string& fallback, const RegexDefs& defs,
                              const std::string& where) {
  std::string src = fallback;
  if (!j.is_null()) {
    if (!j.is_string()) throw SchemaError(where + " must be a contract string");
    src = j.get<std::string>();
  }
  return parse_contract(src, &defs);
}

Control parse_control(const Json& j, const AutModel& model) {
  Control c;
  c.name = j.at("name").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  c.x = j.at("x").get<int>();
  c.y = j.at("y").get<int>();
  c.w = j.value("w", 64);
  c.h = j.value("h", 32);
  if (c.x < 0 || c.y < 0 || c.w <= 0 || c.h <= 0 || c.x + c.w > model.canvas_w ||
      c.y + c.h > model.canvas_h) {
    throw SchemaError("control '" + c.name + "' does not fit the canvas");
  }
  if (kind == "text_field") {
    c.kind = Control::Kind::text_field;
    c.field = j.value("field", c.name);
  } else if (kind == "button" || kind == "link") {
    c.kind = kind == "button" ? Control::Kind::button : Control::Kind::link;
    c.target = j.at("target").get<std::string>();
    if (kind == "link") {
      const Json params = j.value("params", Json::object());
      for (const auto& [k, v] : params.items()) {
        c.link_params.emplace(k, value_from_json(v, "link '" + c.name + "' parameter '" + k + "'"));
      }
    }
  } else {
    throw SchemaError("unknown control kind '" + kind + "'");
  }
  return c;
}

void validate_procedure(const AutModel& model, const Procedure& p) {
  auto check_target = [&](const std::string& target, const std::string& what) {
    if (!model.has_proc(target)) {
      throw DanglingTargetError("procedure '" + p.name + "': " + what + " names missing procedure '" +
                                target + "'");
    }
  };
  if (!p.render.empty()) check_target(p.render, "render");
  if (p.redirect) check_target(*p.redirect, "redirect");
  for (const auto& c : p.page.controls) {
    if (c.kind == Control::Kind::text_field) continue;
    check_target(c.target, "control '" + c.name + "'");
    if (c.kind == Control::Kind::link) {
      const Procedure& target = model.proc(c.target);
      for (const auto& [k, v] : c.link_params) {
        bool found = false;
        for (const auto& formal : target.params) {
          if (formal.name != k) continue;
          found = true;
          if (formal.from_session) {
            throw SchemaError("link '" + c.name + "' passes session-bound parameter '" + k + "'");
          }
          if (value_type(v) != formal.type) {
            throw SchemaError("link '" + c.name + "' parameter '" + k + "' has the wrong type");
          }
        }
        if (!found) {
          throw SchemaError("link '" + c.name + "' passes unknown parameter '" + k + "' to '" +
                            c.target + "'");
        }
      }
    }
  }
  std::set<std::string> names;
  for (const auto& c : p.page.controls) {
    if (!names.insert(c.name).second) {
      throw SchemaError("procedure '" + p.name + "': duplicate control name '" + c.name + "'");
    }
  }
  for (const auto& t : p.transforms) {
    bool ok = false;
    for (const auto& formal : p.params) {
      if (formal.name == t.var && formal.type == ValueType::string) ok = true;
    }
    if (!ok) {
      throw SchemaError("procedure '" + p.name + "': transform names '" + t.var +
                        "', which is not a declared string parameter");
    }
  }
  // Contract variables that coincide with declared parameters must agree on
  // type; every other variable is read from the session at run time.
  auto check_contract = [&](const Contract& c, const std::string& what) {
    for (const auto& [name, type] : c.vars) {
      for (const auto& formal : p.params) {
        if (formal.name == name && formal.type != type) {
          throw SchemaError("procedure '" + p.name + "': " + what + " uses parameter '" + name +
                            "' at the wrong type");
        }
      }
    }
  };
  check_contract(p.guard, "guard");
  check_contract(p.call_contract, "call contract");
  // The contract species evolves vectors shaped like the call contract, fed
  // from invocation actuals; every call-contract variable must be a formal.
  for (const auto& [name, type] : p.call_contract.vars) {
    bool found = false;
    for (const auto& formal : p.params) found = found || formal.name == name;
    if (!found) {
      throw SchemaError("procedure '" + p.name + "': call contract variable '" + name +
                        "' is not a declared parameter");
    }
  }
}

}  // namespace

AutModel parse_model_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("model is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("model root must be an object");
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1) {
    throw SchemaError("model schema_version must be 1");
  }

  AutModel model;
  if (doc.contains("canvas")) {
    model.canvas_w = doc["canvas"].value("width", 128);
    model.canvas_h = doc["canvas"].value("height", 128);
    if (model.canvas_w <= 0 || model.canvas_h <= 0) throw SchemaError("canvas must be positive");
  }
  model.max_input_length = doc.value("max_input_length", 30);
  if (model.max_input_length < 0) throw SchemaError("max_input_length must be nonnegative");

  RegexDefs defs;
  const Json defines = doc.value("defines", Json::object());
  for (const auto& [k, v] : defines.items()) {
    if (!v.is_string()) throw SchemaError("define '" + k + "' must be a string");
    defs.emplace(k, v.get<std::string>());
  }

  if (!doc.contains("procedures") || !doc["procedures"].is_array() || doc["procedures"].empty()) {
    throw SchemaError("model must declare a nonempty procedure list");
  }

  for (const auto& jp : doc["procedures"]) {
    Procedure p;
    p.name = jp.at("name").get<std::string>();
    if (model.index.count(p.name)) throw SchemaError("duplicate procedure '" + p.name + "'");
    for (const auto& jparam : jp.value("params", Json::array())) {
      Param param;
      param.name = jparam.at("name").get<std::string>();
      param.type = parse_type(jparam.value("type", std::string("string")));
      if (jparam.contains("from_session")) {
        param.from_session = jparam["from_session"].get<std::string>();
      }
      for (const auto& other : p.params) {
        if (other.name == param.name) {
          throw SchemaError("procedure '" + p.name + "': duplicate parameter '" + param.name + "'");
        }
      }
      p.params.push_back(std::move(param));
    }
    p.guard = parse_model_contract(jp.contains("guard") ? jp["guard"] : Json(), "true", defs,
                                   "guard of '" + p.name + "'");
    p.call_contract = parse_model_contract(
        jp.contains("call_contract") ? jp["call_contract"] : Json(), "true", defs,
        "call contract of '" + p.name + "'");

    if (jp.contains("on_pass")) {
      const Json& pass = jp["on_pass"];
      for (const auto& jt : pass.value("transforms", Json::array())) {
        Transform t;
        t.var = jt.at("var").get<std::string>();
        if (jt.contains("constant")) {
          t.is_replace = false;
          t.constant = jt["constant"].get<std::string>();
        } else {
          t.pattern = parse_regex_source(jt.at("pattern").get<std::string>(), &defs);
          t.pattern_dfa = std::make_shared<const Dfa>(compile_regex(t.pattern));
          t.replacement = jt.value("replacement", std::string());
        }
        p.transforms.push_back(std::move(t));
      }
      const Json session = pass.value("session", Json::object());
      for (const auto& [k, v] : session.items()) {
        if (!v.is_string()) throw SchemaError("session assignment '" + k + "' must be a template");
        p.session_assigns.push_back({k, ValueTemplate::parse(v.get<std::string>())});
      }
      p.render = pass.value("render", std::string());
    }
    if (jp.contains("on_fail") && !jp["on_fail"].is_null()) {
      p.redirect = jp["on_fail"].at("redirect").get<std::string>();
    }
    for (const auto& js : jp.value("sinks", Json::array())) {
      Sink s;
      s.signature = js.at("signature").get<std::string>();
      s.value = ValueTemplate::parse(js.at("value").get<std::string>());
      p.sinks.push_back(std::move(s));
    }
    if (jp.contains("page")) {
      for (const auto& jc : jp["page"].value("controls", Json::array())) {
        p.page.controls.push_back(parse_control(jc, model));
      }
    }
    model.index.emplace(p.name, model.procedures.size());
    model.procedures.push_back(std::move(p));
  }

  if (!doc.contains("entry")) throw SchemaError("model must declare an entry procedure");
  model.entry = doc["entry"].get<std::string>();
  if (!model.has_proc(model.entry)) {
    throw DanglingTargetError("entry names missing procedure '" + model.entry + "'");
  }
  for (const auto& p : model.procedures) validate_procedure(model, p);
  return model;
}

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SchemaError("cannot read file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

AutModel load_model(const std::string& path) { return parse_model_text(slurp(path)); }

VulnSpec parse_vuln_spec_text(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError(std::string("vulnerability spec is not valid JSON: ") + e.what());
  }
  if (!doc.contains("schema_version") || doc["schema_version"].get<int>() != 1) {
    throw SchemaError("vulnerability spec schema_version must be 1");
  }
  VulnSpec v;
  v.signature = doc.at("signature").get<std::string>();
  v.contract = parse_contract(doc.at("contract").get<std::string>());
  if (v.contract.vars.size() > 1 ||
      (v.contract.vars.size() == 1 && v.contract.vars[0].second != ValueType::string)) {
    throw SchemaError("vulnerability contract must have at most one free string variable");
  }
  return v;
}

VulnSpec load_vuln_spec(const std::string& path) { return parse_vuln_spec_text(slurp(path)); }

// ---------------------------------------------------------------------------
// Call graph

std::set<std::string> target_procedures(const AutModel& m, const VulnSpec& v) {
  std::set<std::string> out;
  for (const auto& p : m.procedures) {
    for (const auto& s : p.sinks) {
      if (s.signature == v.signature) out.insert(p.name);
    }
  }
  return out;
}

DistanceMap call_graph_distances(const AutModel& m, const std::set<std::string>& targets) {
  // Reverse breadth-first search from the targets.
  std::map<std::string, std::vector<std::string>> rev;
  for (const auto& p : m.procedures) rev[p.name];
  auto add_edge = [&rev](const std::string& from, const std::string& to) {
    rev[to].push_back(from);
  };
  for (const auto& p : m.procedures) {
    if (!p.render.empty()) add_edge(p.name, p.render);
    if (p.redirect) add_edge(p.name, *p.redirect);
    for (const auto& c : p.page.controls) {
      if (c.kind != Control::Kind::text_field) add_edge(p.name, c.target);
    }
  }

  DistanceMap dist;
  for (const auto& p : m.procedures) dist[p.name] = std::nullopt;
  std::vector<std::string> frontier;
  for (const auto& t : targets) {
    if (dist.count(t)) {
      dist[t] = 0;
      frontier.push_back(t);
    }
  }
  std::uint32_t level = 0;
  while (!frontier.empty()) {
    ++level;
    std::vector<std::string> next;
    for (const auto& q : frontier) {
      for (const auto& p : rev[q]) {
        if (!dist[p]) {
          dist[p] = level;
          next.push_back(p);
        }
      }
    }
    frontier = std::move(next);
  }
  return dist;
}

// ---------------------------------------------------------------------------
// Simulation

namespace {

// Leftmost-longest replacement of every pattern match; empty matches are
// skipped so the scan always advances.
std::string regex_replace_all(const std::string& input, const Dfa& pattern,
                              const std::string& replacement) {
  std::string out;
  std::size_t i = 0;
  while (i < input.size()) {
    int q = pattern.start();
    std::size_t best_end = pattern.accepting(q) ? i : std::string::npos;
    for (std::size_t j = i; j < input.size(); ++j) {
      int sym = symbol_index(input[j]);
      if (sym < 0) break;
      q = pattern.step_sym(q, sym);
      if (pattern.accepting(q)) best_end = j + 1;
    }
    if (best_end != std::string::npos && best_end > i) {
      out += replacement;
      i = best_end;
    } else {
      out.push_back(input[i++]);
    }
  }
  return out;
}

class Simulator {
 public:
  Simulator(const AutModel& model, ExecutionTrace& trace) : model_(model), trace_(trace) {}

  void run(const std::vector<Action>& actions) {
    invoke(model_.entry, {}, 0);
    for (const auto& a : actions) {
      if (a.kind == Action::Kind::click) {
        click(a.x, a.y);
      } else {
        type(a.text);
      }
    }
  }

 private:
  const AutModel& model_;
  ExecutionTrace& trace_;

  const Page* page_ = nullptr;
  std::optional<std::string> focus_;              // field name of the focused text_field
  std::map<std::string, std::string> fields_;     // typed form values on the current page
  Env session_;

  void click(int x, int y) {
    if (!page_) return;
    for (const auto& c : page_->controls) {
      if (!c.contains(x, y)) continue;
      switch (c.kind) {
        case Control::Kind::text_field:
          focus_ = c.field;
          return;
        case Control::Kind::button: {
          std::map<std::string, Value> env;
          for (const auto& ctl : page_->controls) {
            if (ctl.kind != Control::Kind::text_field) continue;
            auto it = fields_.find(ctl.field);
            env.emplace(ctl.field, it == fields_.end() ? std::string() : it->second);
          }
          invoke(c.target, env, 0);
          return;
        }
        case Control::Kind::link:
          invoke(c.target, c.link_params, 0);
          return;
      }
    }
    // background click: no-op
  }

  void type(const std::string& text) {
    if (!focus_) return;  // typing without focus is a no-op
    std::string value = text.substr(0, static_cast<std::size_t>(model_.max_input_length));
    fields_[*focus_] = std::move(value);
  }

  void invoke(const std::string& name, const std::map<std::string, Value>& dispatch, int depth) {
    if (depth > static_cast<int>(model_.procedures.size())) {
      throw Error("redirect chain does not terminate");
    }
    const Procedure& p = model_.proc(name);

    ParamVector actuals;
    Env locals;
    for (const auto& formal : p.params) {
      Value v = default_value(formal.type);
      if (formal.from_session) {
        auto it = session_.find(*formal.from_session);
        if (it != session_.end() && value_type(it->second) == formal.type) v = it->second;
      } else {
        auto it = dispatch.find(formal.name);
        if (it != dispatch.end() && value_type(it->second) == formal.type) v = it->second;
      }
      actuals.push_back(v);
      locals.emplace(formal.name, std::move(v));
    }
    trace_.invocations.push_back({p.name, std::move(actuals)});

    if (!guard_holds(p, locals)) {
      if (p.redirect) invoke(*p.redirect, {}, depth + 1);
      return;
    }

    for (const auto& t : p.transforms) {
      auto it = locals.find(t.var);
      if (it == locals.end()) continue;
      std::string& s = std::get<std::string>(it->second);
      s = t.is_replace ? regex_replace_all(s, *t.pattern_dfa, t.replacement) : t.constant;
    }
    for (const auto& assign : p.session_assigns) {
      Env scope = scoped(locals);
      session_[assign.var] = assign.value.expand(scope);
    }
    if (!p.sinks.empty()) {
      Env scope = scoped(locals);
      for (const auto& sink : p.sinks) {
        trace_.sinks.push_back({p.name, sink.signature, sink.value.expand(scope)});
      }
    }
    render(p.render.empty() ? p.name : p.render);
  }

  bool guard_holds(const Procedure& p, const Env& locals) {
    Env env;
    for (const auto& [var, type] : p.guard.vars) {
      auto it = locals.find(var);
      if (it != locals.end() && value_type(it->second) == type) {
        env.emplace(var, it->second);
        continue;
      }
      auto st = session_.find(var);
      if (st != session_.end() && value_type(st->second) == type) {
        env.emplace(var, st->second);
        continue;
      }
      env.emplace(var, default_value(type));  // absent binds to the type default
    }
    return evaluate(p.guard, env);
  }

  // Parameters shadow session variables.
  Env scoped(const Env& locals) const {
    Env scope = session_;
    for (const auto& [k, v] : locals) scope[k] = v;
    return scope;
  }

  void render(const std::string& proc_name) {
    page_ = &model_.proc(proc_name).page;
    focus_.reset();
    fields_.clear();
  }
};

}  // namespace

ExecutionTrace execute_test(const AutModel& m, const std::vector<Action>& actions) {
  ExecutionTrace trace;
  Simulator sim(m, trace);
  sim.run(actions);
  return trace;
}

std::optional<SinkEvent> find_trigger(const ExecutionTrace& tr, const VulnSpec& v) {
  for (const auto& sink : tr.sinks) {
    if (sink.signature != v.signature) continue;
    Env env;
    if (!v.contract.vars.empty()) env.emplace(v.contract.vars[0].first, sink.value);
    if (evaluate(v.contract, env)) return sink;
  }
  return std::nullopt;
}

bool is_successful(const ExecutionTrace& tr, const VulnSpec& v) {
  return find_trigger(tr, v).has_value();
}

}  // namespace coevo
