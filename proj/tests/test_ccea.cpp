#include <doctest.h>

#include <cmath>
#include <set>

#include "coevo/ccea.hpp"
#include "coevo/distance.hpp"
#include "coevo/errors.hpp"
#include "test_support.hpp"

using namespace coevo;
using namespace coevo::test;

namespace {

const char* kContractBase = "payload in any* . [0-9] . any* and len(payload) >= y";

// Two-hop chain: home -> mid -> deep, with mid's guard closed so every trace
// stalls at mid. The links into mid carry the two vectors of the worked
// fitness example.
const char* kChainModel = R"({
  "schema_version": 1,
  "entry": "home",
  "procedures": [
    {
      "name": "home",
      "page": {"controls": [
        {"kind": "link", "name": "t1", "target": "mid",
         "params": {"payload": "john", "y": 7}, "x": 0, "y": 0, "w": 16, "h": 16},
        {"kind": "link", "name": "t2", "target": "mid",
         "params": {"payload": "c4rl", "y": 5}, "x": 16, "y": 0, "w": 16, "h": 16}
      ]}
    },
    {
      "name": "mid",
      "params": [{"name": "y", "type": "integer"}, {"name": "payload", "type": "string"}],
      "guard": "false",
      "call_contract": "payload in any* . [0-9] . any* and len(payload) >= y",
      "page": {"controls": [
        {"kind": "link", "name": "go", "target": "deep", "params": {}, "x": 0, "y": 0, "w": 8, "h": 8}
      ]}
    },
    {"name": "deep", "sinks": [{"signature": "echo", "value": "boom"}]}
  ]
})";

const char* kChainVuln = R"({"schema_version": 1, "signature": "echo", "contract": "x = \"boom\""})";

ContractSpecies base_species(std::vector<ParamVector> pop) {
  return ContractSpecies("mid", parse_contract(kContractBase), std::move(pop));
}

}  // namespace

TEST_CASE("call distance on fixture traces") {
  AutModel m = load_scw();
  DistanceMap d = call_graph_distances(m, {"welcome"});

  ExecutionTrace back;
  back.invocations = {{"signup", {}}, {"confirm", {std::string("john42")}}, {"signup", {}}};
  CHECK(call_distance(back, d, false) == 2);

  ExecutionTrace stuck;
  stuck.invocations = {{"signup", {}}};
  CHECK(call_distance(stuck, d, false) == 3);

  ExecutionTrace win;
  win.invocations = {{"signup", {}}, {"confirm", {std::string("x")}}, {"welcome", {std::string("x")}}};
  CHECK(call_distance(win, d, true) == 0);

  CHECK_THROWS_AS(call_distance(ExecutionTrace{}, d, false), EmptyTraceError);
}

TEST_CASE("traces touching only unreachable procedures get the ceiling") {
  DistanceMap d;
  d["a"] = std::nullopt;
  d["b"] = 0;
  d["c"] = 4;
  ExecutionTrace tr;
  tr.invocations = {{"a", {}}};
  CHECK(call_distance(tr, d, false) == 6);  // diameter 4, plus 2
}

TEST_CASE("species distance approximation") {
  ContractSpecies cs = base_species({{std::string("john42"), std::int64_t{6}}});
  ParamVector query{std::string("john"), std::int64_t{7}};
  CHECK(gamma_approx(cs, query) == 3);

  ContractSpecies self = base_species({{std::string("a1bcde"), std::int64_t{3}}});
  CHECK(gamma_approx(self, {std::string("a1bcde"), std::int64_t{3}}) == 0);

  // all members violating: infinite distance
  ContractSpecies bad = base_species({{std::string("x"), std::int64_t{9}}});
  CHECK_FALSE(gamma_approx(bad, query).has_value());

  CHECK_THROWS_AS(gamma_approx(cs, {std::string("john")}), ArityMismatchError);
}

TEST_CASE("species member fitness") {
  ContractSpecies cs = base_species({});
  ParamVector v{std::string("john"), std::int64_t{7}};
  CHECK(fitness_contract(cs, {std::string("G?_9"), std::int64_t{0}}, v) == 11);
  CHECK_FALSE(fitness_contract(cs, {std::string("7"), std::int64_t{2}}, v).has_value());
  ParamVector sat{std::string("a1bcde"), std::int64_t{4}};
  CHECK(fitness_contract(cs, sat, sat) == 0);
}

TEST_CASE("test fitness matches the worked example") {
  AutModel m = parse_model_text(kChainModel);
  VulnSpec v = parse_vuln_spec_text(kChainVuln);
  EngineConfig cfg;
  Rng rng(1);
  EngineContext ctx = EngineContext::create(m, v, cfg, rng);
  REQUIRE(ctx.distances.at("home") == 2);
  REQUIRE(ctx.distances.at("mid") == 1);
  REQUIRE(ctx.distances.at("deep") == 0);

  // pin the species so gamma is known exactly
  ctx.species[ctx.species_index.at("mid")].replace_population(
      {{std::string("john42"), std::int64_t{6}}});

  TestChromosome t{Action::click(2, 2)};    // -> mid("john", 7), gamma 3
  TestChromosome t2{Action::click(18, 2)};  // -> mid("c4rl", 5), gamma 1... via a closer member

  FitnessResult r = fitness_test(t, ctx);
  CHECK_FALSE(r.successful);
  CHECK(r.phi == doctest::Approx(7.0 / 4.0).epsilon(1e-12));

  ctx.species[ctx.species_index.at("mid")].replace_population(
      {{std::string("c4rl"), std::int64_t{4}}});
  FitnessResult r2 = fitness_test(t2, ctx);
  CHECK(r2.phi == doctest::Approx(3.0 / 2.0).epsilon(1e-12));

  // an empty species yields no correction
  ctx.species[ctx.species_index.at("mid")].replace_population({});
  CHECK(fitness_test(t, ctx).phi == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("successful tests have fitness exactly zero") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  EngineConfig cfg;
  Rng rng(2);
  EngineContext ctx = EngineContext::create(m, v, cfg, rng);
  TestChromosome exploit{Action::click(64, 30), Action::type("<script>alert(1)</script>"),
                         Action::click(64, 80), Action::click(64, 30)};
  FitnessResult r = fitness_test(exploit, ctx);
  CHECK(r.successful);
  CHECK(r.phi == 0.0);
}

TEST_CASE("fitness is zero exactly on successful tests") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  EngineConfig cfg;
  Rng rng(3);
  EngineContext ctx = EngineContext::create(m, v, cfg, rng);
  GeneLimits lim{m.canvas_w, m.canvas_h, m.max_input_length};
  for (int i = 0; i < 200; ++i) {
    TestChromosome t = random_chromosome(4, 1, lim, rng);
    FitnessResult r = fitness_test(t, ctx);
    REQUIRE(r.successful == is_successful(execute_test(m, t), v));
    REQUIRE((r.phi == 0.0) == r.successful);
    REQUIRE(r.phi >= 0.0);
    if (!r.successful) {
      const double delta = static_cast<double>(call_distance(r.trace, ctx.distances, false));
      REQUIRE(r.phi <= delta);
      REQUIRE(r.phi >= delta - 1.0);
    }
  }
}

TEST_CASE("string crossover reproduces the worked tapes") {
  auto [a, b] = cross_strings("john", "c4rl", 1, 1);
  CHECK(a == "jorl");
  CHECK(b == "c4hn");

  // full-length cuts are the identity
  auto [ia, ib] = cross_strings("john", "c4rl", 3, 3);
  CHECK(ia == "john");
  CHECK(ib == "c4rl");

  // empty strings survive
  auto [ea, eb] = cross_strings("", "xy", 0, 0);
  CHECK(ea == "y");
  CHECK(eb == "x");
}

TEST_CASE("click crossover cut points") {
  Action a = Action::click(6, 6), b = Action::click(9, 55);
  auto [s0a, s0b] = cross_clicks(a, b, 0);  // swap entirely
  CHECK((s0a.x == 9 && s0a.y == 55));
  CHECK((s0b.x == 6 && s0b.y == 6));
  auto [s1a, s1b] = cross_clicks(a, b, 1);  // swap y only
  CHECK((s1a.x == 6 && s1a.y == 55));
  CHECK((s1b.x == 9 && s1b.y == 6));
  auto [s2a, s2b] = cross_clicks(a, b, 2);  // identity
  CHECK(s2a == a);
  CHECK(s2b == b);
}

TEST_CASE("crossover preserves labels and bounds") {
  GeneLimits lim{128, 128, 30};
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    TestChromosome a = random_chromosome(4, 2, lim, rng);
    TestChromosome b = random_chromosome(4, 2, lim, rng);
    auto [c1, c2] = crossover_tests(a, b, 2, lim, rng);
    for (const TestChromosome* t : {&c1, &c2}) {
      REQUIRE(same_label_counts(*t, a));
      for (const auto& g : *t) {
        if (g.kind == Action::Kind::click) {
          REQUIRE(g.x >= 0);
          REQUIRE(g.x < 128);
          REQUIRE(g.y >= 0);
          REQUIRE(g.y < 128);
        } else {
          REQUIRE(g.text.size() <= 30);
        }
      }
    }
  }
  TestChromosome clicks_only = random_chromosome(3, 0, lim, rng);
  TestChromosome mixed = random_chromosome(2, 1, lim, rng);
  CHECK_THROWS_AS(crossover_tests(clicks_only, mixed, 1, lim, rng), LabelMismatchError);
  CHECK_THROWS_AS(crossover_tests(clicks_only, clicks_only, 0, lim, rng), Error);
}

TEST_CASE("identical parents produce identical offspring") {
  GeneLimits lim{128, 128, 30};
  Rng rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    TestChromosome a = random_chromosome(3, 1, lim, rng);
    auto [c1, c2] = crossover_tests(a, a, 2, lim, rng);
    REQUIRE(c1 == a);
    REQUIRE(c2 == a);
  }
}

TEST_CASE("mutation with probability zero is the identity") {
  GeneLimits lim{128, 128, 30};
  Rng rng(9);
  TestChromosome t = random_chromosome(4, 1, lim, rng);
  CHECK(mutate_test(t, 0.0, lim, rng) == t);
}

TEST_CASE("mutation preserves labels and bounds") {
  GeneLimits lim{128, 128, 30};
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    TestChromosome t = random_chromosome(4, 1, lim, rng);
    TestChromosome mutated = mutate_test(t, 1.0, lim, rng);
    REQUIRE(same_label_counts(mutated, t));
    for (const auto& g : mutated) {
      if (g.kind == Action::Kind::click) {
        REQUIRE(g.x >= 0);
        REQUIRE(g.x < 128);
        REQUIRE(g.y >= 0);
        REQUIRE(g.y < 128);
      } else {
        REQUIRE(g.text.size() <= 30);
        for (char c : g.text) REQUIRE(in_alphabet(c));
      }
    }
  }
}

TEST_CASE("string mutations are single edit operations") {
  // deletion / insertion / modification, one character at a time; deletion at
  // index 1 of "G?_9" gives "G_9"
  SpeciesParams params;
  bool saw_g9 = false;
  const std::vector<ParamVector> start(6, ParamVector{std::string("G?_9")});
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    Rng rng(seed);
    ContractSpecies cs("p", parse_contract("len(s) >= 0"), start);
    evolve_contract_species(cs, {std::string("G?_9")}, SpeciesParams{1, 0.0, 1.0, params.space},
                            rng);
    for (const auto& w : cs.population()) {
      const auto& s = std::get<std::string>(w[0]);
      REQUIRE(dist_str("G?_9", s) <= 1);
      saw_g9 = saw_g9 || s == "G_9";
    }
  }
  CHECK(saw_g9);
}

TEST_CASE("deterministic tournament selection") {
  Rng rng(13);
  std::vector<double> fitness{7.0 / 4.0, 3.0 / 2.0, std::numeric_limits<double>::infinity()};
  // the full-population tournament always returns the global best
  CHECK(tournament_select(3, 3, fitness, rng) == 1);

  std::vector<double> tie{2.0, 1.0, 1.0};
  CHECK(tournament_select(3, 3, tie, rng) == 1);  // earliest index wins ties

  // size-one tournaments are uniform draws: all indices appear
  std::set<std::size_t> seen;
  for (int i = 0; i < 200; ++i) seen.insert(tournament_select(3, 1, fitness, rng));
  CHECK(seen == std::set<std::size_t>{0, 1, 2});
}

TEST_CASE("species evolution keeps the population size and never drops the best") {
  Contract c = parse_contract(kContractBase);
  SpeciesParams params;
  Rng rng(17);
  auto pop = seed_population(c, 16, 23);
  ContractSpecies cs("confirm", c, pop);
  ParamVector query{std::string("john"), std::int64_t{7}};
  auto best_before = gamma_approx(cs, query);
  for (int gen = 0; gen < 50; ++gen) {
    evolve_contract_species(cs, query, params, rng);
    REQUIRE(cs.population().size() == 16);
    auto now = gamma_approx(cs, query);
    REQUIRE(now.has_value());  // the elite satisfying member survives
    REQUIRE(*now <= *best_before);
    best_before = now;
  }
}

TEST_CASE("species reach the exact distance on the two-variable example") {
  Contract c = parse_contract(kContractBase);
  ParamVector query{std::string("john"), std::int64_t{7}};
  OracleBounds bounds;  // strings to length 8, integers in [-32, 32]
  const auto exact = gamma_exact(c, query, bounds);
  REQUIRE(exact == 3);

  SampleSpace space;
  space.max_string_len = bounds.max_string_len;
  space.int_lo = bounds.int_lo;
  space.int_hi = bounds.int_hi;
  SpeciesParams params;
  params.space = space;

  int equal = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Rng rng(seed);
    ContractSpecies cs("confirm", c, seed_population(c, 32, rng.next_u64(), 10000, space));
    Rng evolve_rng(rng.next_u64());
    for (int gen = 0; gen < 200; ++gen) evolve_contract_species(cs, query, params, evolve_rng);
    auto approx = gamma_approx(cs, query);
    REQUIRE(approx.has_value());
    REQUIRE(*approx >= *exact);
    equal += *approx == *exact;
  }
  CHECK(equal >= 9);
}

TEST_CASE("species approximation never undercuts the exact distance") {
  SampleSpace space;
  space.alphabet = "ab01";
  space.max_string_len = 5;
  space.int_lo = 0;
  space.int_hi = 8;
  OracleBounds bounds;
  bounds.max_string_len = 5;
  bounds.int_lo = 0;
  bounds.int_hi = 8;

  Contract c = parse_contract("payload in [a-b]* . [0-1] . [a-b]* and len(payload) >= y");
  SpeciesParams params;
  params.space = space;
  Rng rng(19);
  ContractSpecies cs("p", c, seed_population(c, 16, 31, 10000, space));
  ParamVector query{std::string("abab"), std::int64_t{6}};
  const auto exact = gamma_exact(c, query, bounds);
  REQUIRE(exact.has_value());
  for (int gen = 0; gen < 100; ++gen) {
    evolve_contract_species(cs, query, params, rng);
    auto approx = gamma_approx(cs, query);
    if (approx) REQUIRE(*approx >= *exact);
  }
}

TEST_CASE("zero-generation budget terminates at the cap after one evaluation") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  EngineConfig cfg;
  cfg.max_generations = 0;
  cfg.test_population = 10;
  WorkerStats stats = run_worker(m, v, cfg, 5);
  CHECK(stats.termination == Termination::generation_cap);
  CHECK(stats.generations == 1);
  REQUIRE(stats.curve.size() == 1);
  CHECK(stats.curve[0].first == 0);
}

TEST_CASE("workers abort when the target contract is unsatisfiable") {
  AutModel m = parse_model_text(R"({
    "schema_version": 1,
    "entry": "t",
    "procedures": [{
      "name": "t",
      "params": [{"name": "x", "type": "string"}],
      "call_contract": "len(x) < 0",
      "sinks": [{"signature": "echo", "value": "v"}]
    }]
  })");
  VulnSpec v = parse_vuln_spec_text(R"({"schema_version": 1, "signature": "echo", "contract": "x = \"v\""})");
  EngineConfig cfg;
  cfg.max_generations = 0;
  CHECK_THROWS_AS(run_worker(m, v, cfg, 1), UnsatContractError);
}

TEST_CASE("non-target unsatisfiable contracts leave an inert species") {
  AutModel m = parse_model_text(R"({
    "schema_version": 1,
    "entry": "t",
    "procedures": [
      {"name": "t", "sinks": [{"signature": "echo", "value": "v"}]},
      {"name": "dead", "params": [{"name": "x", "type": "string"}], "call_contract": "len(x) < 0"}
    ]
  })");
  VulnSpec v = parse_vuln_spec_text(R"({"schema_version": 1, "signature": "echo", "contract": "x = \"w\""})");
  EngineConfig cfg;
  cfg.max_generations = 1;
  cfg.test_population = 4;
  cfg.clicks = 1;
  cfg.types = 0;
  WorkerStats stats = run_worker(m, v, cfg, 1);
  CHECK(stats.termination == Termination::generation_cap);
}

TEST_CASE("identical configuration and seed reproduce the run") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  EngineConfig cfg;
  cfg.max_generations = 40;
  cfg.test_population = 20;
  WorkerStats a = run_worker(m, v, cfg, 99);
  WorkerStats b = run_worker(m, v, cfg, 99);
  CHECK(a.termination == b.termination);
  CHECK(a.curve == b.curve);
  CHECK(a.best == b.best);
  WorkerStats c = run_worker(m, v, cfg, 100);
  CHECK(a.best != c.best);  // different seed, different search path
}

TEST_CASE("best fitness never increases across generations") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  EngineConfig cfg;
  cfg.max_generations = 60;
  cfg.test_population = 30;
  WorkerStats stats = run_worker(m, v, cfg, 41);
  REQUIRE(stats.curve.size() >= 2);
  for (std::size_t i = 1; i < stats.curve.size(); ++i) {
    REQUIRE(stats.curve[i].first == stats.curve[i - 1].first + 1);
    REQUIRE(stats.curve[i].second <= stats.curve[i - 1].second);
  }
}

TEST_CASE("superset traces never increase the invocation minimum") {
  AutModel m = load_scw();
  VulnSpec v = load_xss();
  DistanceMap d = call_graph_distances(m, target_procedures(m, v));
  auto min_dist = [&](const ExecutionTrace& tr) {
    std::optional<std::uint32_t> best;
    for (const auto& inv : tr.invocations) {
      auto it = d.find(inv.procedure);
      if (it != d.end() && it->second && (!best || *it->second < *best)) best = it->second;
    }
    return best;
  };
  Rng rng(43);
  GeneLimits lim{m.canvas_w, m.canvas_h, m.max_input_length};
  for (int i = 0; i < 100; ++i) {
    TestChromosome base = random_chromosome(3, 1, lim, rng);
    TestChromosome longer = base;
    TestChromosome extra = random_chromosome(2, 1, lim, rng);
    longer.insert(longer.end(), extra.begin(), extra.end());
    auto tr_base = execute_test(m, base);
    auto tr_long = execute_test(m, longer);
    if (is_successful(tr_base, v) || is_successful(tr_long, v)) continue;
    auto mb = min_dist(tr_base);
    auto ml = min_dist(tr_long);
    if (mb && ml) {
      REQUIRE(*ml <= *mb);
    } else if (mb) {
      FAIL("extension lost reachability");
    }
  }
}
