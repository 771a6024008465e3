#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "coevo/aut.hpp"
#include "coevo/ccea.hpp"
#include "coevo/contract.hpp"
#include "coevo/distance.hpp"
#include "coevo/errors.hpp"
#include "coevo/runner.hpp"
#include "coevo/sampler.hpp"
#include "coevo/smtlib.hpp"

namespace py = pybind11;
using namespace coevo;

PYBIND11_MODULE(coevo, m) {
  m.doc() = "contract-driven co-evolutionary exploit search";

  py::register_exception<Error>(m, "CoevoError");

  // contracts -------------------------------------------------------------
  py::class_<Contract>(m, "Contract")
      .def("__str__", [](const Contract& c) { return to_string(c); })
      .def_property_readonly("free_vars", [](const Contract& c) {
        std::vector<std::pair<std::string, std::string>> out;
        for (const auto& [name, type] : c.vars) out.emplace_back(name, type_name(type));
        return out;
      });
  m.def("parse_contract", [](const std::string& text) { return parse_contract(text); });
  m.def("evaluate", [](const Contract& c, const Env& env) { return evaluate(c, env); });
  m.def("desugar", [](const Contract& c) { return desugar(c); });
  m.def("export_smtlib",
        [](const Contract& c, const std::vector<ParamVector>& excluded) {
          return export_smtlib(c, excluded);
        },
        py::arg("contract"), py::arg("excluded") = std::vector<ParamVector>{});

  py::class_<Dfa>(m, "Dfa")
      .def("accepts", [](const Dfa& d, const std::string& s) { return d.accepts(s); })
      .def("complement", &Dfa::complement)
      .def_property_readonly("states", &Dfa::state_count);
  m.def("compile_regex",
        [](const std::string& src) { return compile_regex(parse_regex_source(src)); });

  // distances ---------------------------------------------------------------
  m.def("dist_bool", &dist_bool);
  m.def("dist_int", &dist_int);
  m.def("dist_str", [](const std::string& a, const std::string& b) { return dist_str(a, b); });
  m.def("manhattan", &manhattan);
  m.def("regex_edit_distance",
        [](const std::string& s, const Dfa& d) { return regex_edit_distance(s, d); });

  py::class_<OracleBounds>(m, "OracleBounds")
      .def(py::init<>())
      .def_readwrite("max_string_len", &OracleBounds::max_string_len)
      .def_readwrite("int_lo", &OracleBounds::int_lo)
      .def_readwrite("int_hi", &OracleBounds::int_hi)
      .def_readwrite("budget", &OracleBounds::budget);
  m.def("gamma_exact",
        [](const Contract& c, const ParamVector& v, const OracleBounds& b) {
          return gamma_exact(c, v, b);
        },
        py::arg("contract"), py::arg("query"), py::arg("bounds") = OracleBounds{});

  // sampling ----------------------------------------------------------------
  py::class_<SampleSpace>(m, "SampleSpace")
      .def(py::init<>())
      .def_readwrite("alphabet", &SampleSpace::alphabet)
      .def_readwrite("max_string_len", &SampleSpace::max_string_len)
      .def_readwrite("int_lo", &SampleSpace::int_lo)
      .def_readwrite("int_hi", &SampleSpace::int_hi);

  py::enum_<SampleStatus>(m, "SampleStatus")
      .value("model", SampleStatus::model)
      .value("exhausted", SampleStatus::exhausted)
      .value("unsat", SampleStatus::unsat);

  py::class_<ModelStream>(m, "ModelStream")
      .def(py::init([](const Contract& c, std::uint64_t seed, std::uint64_t budget,
                       const SampleSpace& space) { return ModelStream(c, seed, budget, space); }),
           py::arg("contract"), py::arg("seed"), py::arg("budget") = 10000,
           py::arg("space") = SampleSpace{})
      .def("next", [](ModelStream& s) -> py::object {
        SampleResult r = s.next();
        if (r.status == SampleStatus::model) return py::cast(r.model);
        return py::cast(r.status);
      });
  m.def("seed_population",
        [](const Contract& c, std::size_t n, std::uint64_t seed, std::uint64_t budget,
           const SampleSpace& space) { return seed_population(c, n, seed, budget, space); },
        py::arg("contract"), py::arg("n"), py::arg("seed"), py::arg("budget") = 10000,
        py::arg("space") = SampleSpace{});

  // application model ---------------------------------------------------------
  py::class_<Action>(m, "Action")
      .def_property_readonly("kind",
                             [](const Action& a) {
                               return a.kind == Action::Kind::click ? "click" : "type";
                             })
      .def_readonly("x", &Action::x)
      .def_readonly("y", &Action::y)
      .def_readonly("text", &Action::text)
      .def("__repr__", [](const Action& a) {
        if (a.kind == Action::Kind::click) {
          return "click(" + std::to_string(a.x) + ", " + std::to_string(a.y) + ")";
        }
        return "type(" + to_display(Value(a.text)) + ")";
      });
  m.def("click", &Action::click);
  m.def("type_text", &Action::type);

  py::class_<Invocation>(m, "Invocation")
      .def_readonly("procedure", &Invocation::procedure)
      .def_readonly("params", &Invocation::params);
  py::class_<SinkEvent>(m, "SinkEvent")
      .def_readonly("procedure", &SinkEvent::procedure)
      .def_readonly("signature", &SinkEvent::signature)
      .def_readonly("value", &SinkEvent::value);
  py::class_<ExecutionTrace>(m, "ExecutionTrace")
      .def_readonly("invocations", &ExecutionTrace::invocations)
      .def_readonly("sinks", &ExecutionTrace::sinks);

  py::class_<AutModel>(m, "AutModel")
      .def_property_readonly("entry", [](const AutModel& a) { return a.entry; })
      .def_property_readonly("procedures", [](const AutModel& a) {
        std::vector<std::string> names;
        for (const auto& p : a.procedures) names.push_back(p.name);
        return names;
      });
  py::class_<VulnSpec>(m, "VulnSpec")
      .def_readonly("signature", &VulnSpec::signature)
      .def_readonly("contract", &VulnSpec::contract);

  m.def("load_model", &load_model);
  m.def("parse_model_text", [](const std::string& s) { return parse_model_text(s); });
  m.def("load_vuln_spec", &load_vuln_spec);
  m.def("parse_vuln_spec_text", [](const std::string& s) { return parse_vuln_spec_text(s); });
  m.def("target_procedures", &target_procedures);
  m.def("call_graph_distances", &call_graph_distances);
  m.def("execute_test", &execute_test);
  m.def("find_trigger", &find_trigger);
  m.def("is_successful", &is_successful);
  m.def("format_action_script", &format_action_script);
  m.def("parse_action_script", [](const std::string& s) { return parse_action_script(s); });

  // engine ----------------------------------------------------------------
  py::class_<EngineConfig>(m, "EngineConfig")
      .def(py::init<>())
      .def_readwrite("test_population", &EngineConfig::test_population)
      .def_readwrite("contract_population", &EngineConfig::contract_population)
      .def_readwrite("tournament", &EngineConfig::tournament)
      .def_readwrite("crossover_prob", &EngineConfig::crossover_prob)
      .def_readwrite("mutation_prob", &EngineConfig::mutation_prob)
      .def_readwrite("species_mutation_prob", &EngineConfig::species_mutation_prob)
      .def_readwrite("crossover_positions", &EngineConfig::crossover_positions)
      .def_readwrite("clicks", &EngineConfig::clicks)
      .def_readwrite("types", &EngineConfig::types)
      .def_readwrite("max_generations", &EngineConfig::max_generations)
      .def_readwrite("space", &EngineConfig::space);

  py::class_<WorkerStats>(m, "WorkerStats")
      .def_property_readonly("termination",
                             [](const WorkerStats& s) {
                               return s.termination == Termination::success ? "success" : "cap";
                             })
      .def_readonly("curve", &WorkerStats::curve)
      .def_readonly("best", &WorkerStats::best)
      .def_readonly("best_phi", &WorkerStats::best_phi)
      .def_readonly("generations", &WorkerStats::generations)
      .def_readonly("exploit_trace", &WorkerStats::exploit_trace);

  m.def("call_distance", &call_distance);
  m.def("run_worker", &run_worker, py::arg("model"), py::arg("vuln"), py::arg("config"),
        py::arg("seed"), py::call_guard<py::gil_scoped_release>());
}
