#include "coevo/ccea.hpp"

#include <algorithm>
#include <limits>
#include <tuple>

#include "coevo/distance.hpp"
#include "coevo/errors.hpp"

namespace coevo {

namespace {

constexpr double kInfFitness = std::numeric_limits<double>::infinity();

std::string random_string(const GeneLimits& lim, Rng& rng) {
  if (lim.max_string_len == 0) return {};
  const std::size_t len = static_cast<std::size_t>(rng.range(1, lim.max_string_len));
  std::string s;
  s.reserve(len);
  for (std::size_t i = 0; i < len; ++i) s.push_back(rng.printable());
  return s;
}

}  // namespace

bool same_label_counts(const TestChromosome& a, const TestChromosome& b) {
  std::size_t ac = 0, bc = 0;
  for (const auto& g : a) ac += g.kind == Action::Kind::click;
  for (const auto& g : b) bc += g.kind == Action::Kind::click;
  return a.size() == b.size() && ac == bc;
}

TestChromosome random_chromosome(std::size_t clicks, std::size_t types, const GeneLimits& lim,
                                 Rng& rng) {
  TestChromosome t;
  t.reserve(clicks + types);
  for (std::size_t i = 0; i < clicks; ++i) {
    t.push_back(Action::click(static_cast<int>(rng.below(static_cast<std::uint64_t>(lim.canvas_w))),
                              static_cast<int>(rng.below(static_cast<std::uint64_t>(lim.canvas_h)))));
  }
  for (std::size_t i = 0; i < types; ++i) t.push_back(Action::type(random_string(lim, rng)));
  // random permutation
  for (std::size_t i = t.size(); i > 1; --i) {
    std::swap(t[i - 1], t[rng.below(i)]);
  }
  return t;
}

std::pair<std::string, std::string> cross_strings(const std::string& a, const std::string& b,
                                                  std::size_t cut_a, std::size_t cut_b) {
  const std::size_t keep_a = a.empty() ? 0 : std::min(cut_a + 1, a.size());
  const std::size_t keep_b = b.empty() ? 0 : std::min(cut_b + 1, b.size());
  return {a.substr(0, keep_a) + b.substr(keep_b), b.substr(0, keep_b) + a.substr(keep_a)};
}

std::pair<Action, Action> cross_clicks(const Action& a, const Action& b, int cut) {
  Action oa = a, ob = b;
  if (cut <= 0) {
    std::swap(oa.x, ob.x);
    std::swap(oa.y, ob.y);
  } else if (cut == 1) {
    std::swap(oa.y, ob.y);
  }
  return {oa, ob};
}

std::pair<TestChromosome, TestChromosome> crossover_tests(const TestChromosome& a,
                                                          const TestChromosome& b,
                                                          std::size_t positions,
                                                          const GeneLimits& lim, Rng& rng) {
  if (!same_label_counts(a, b)) {
    throw LabelMismatchError("parents have different event-label counts");
  }
  if (positions == 0) throw Error("crossover needs at least one position");
  TestChromosome oa = a, ob = b;
  if (a.empty()) return {oa, ob};
  positions = std::min(positions, a.size());

  // Gene positions of each label, per parent, in order of appearance: the
  // i-th click of one parent pairs with the i-th click of the other.
  std::vector<std::size_t> a_clicks, a_types, b_clicks, b_types;
  for (std::size_t i = 0; i < a.size(); ++i) {
    (a[i].kind == Action::Kind::click ? a_clicks : a_types).push_back(i);
  }
  for (std::size_t i = 0; i < b.size(); ++i) {
    (b[i].kind == Action::Kind::click ? b_clicks : b_types).push_back(i);
  }

  std::vector<std::size_t> chosen(a.size());
  for (std::size_t i = 0; i < chosen.size(); ++i) chosen[i] = i;
  for (std::size_t i = 0; i < positions; ++i) {
    std::swap(chosen[i], chosen[i + rng.below(chosen.size() - i)]);
  }
  chosen.resize(positions);

  for (std::size_t pos : chosen) {
    const bool is_click = a[pos].kind == Action::Kind::click;
    const auto& a_idx = is_click ? a_clicks : a_types;
    const auto& b_idx = is_click ? b_clicks : b_types;
    const std::size_t rank =
        static_cast<std::size_t>(std::find(a_idx.begin(), a_idx.end(), pos) - a_idx.begin());
    const std::size_t pa = a_idx[rank];
    const std::size_t pb = b_idx[rank];
    if (is_click) {
      auto [ga, gb] = cross_clicks(a[pa], b[pb], static_cast<int>(rng.below(3)));
      oa[pa] = ga;
      ob[pb] = gb;
    } else {
      const std::string& sa = a[pa].text;
      const std::string& sb = b[pb].text;
      // one cut for the pair, clamped inside each string, so identical
      // parents always reproduce themselves
      const std::size_t cut =
          rng.below(std::max<std::uint64_t>(std::max(sa.size(), sb.size()), 1));
      auto [ra, rb] = cross_strings(sa, sb, cut, cut);
      const std::size_t cap = static_cast<std::size_t>(lim.max_string_len);
      if (ra.size() > cap) ra.resize(cap);
      if (rb.size() > cap) rb.resize(cap);
      oa[pa] = Action::type(std::move(ra));
      ob[pb] = Action::type(std::move(rb));
    }
  }
  return {oa, ob};
}

namespace {

void mutate_type_string(std::string& s, int max_len, const std::string& alphabet, Rng& rng) {
  enum Op { del, ins, mod };
  std::vector<Op> ops;
  if (!s.empty()) {
    ops.push_back(del);
    ops.push_back(mod);
  }
  if (static_cast<int>(s.size()) < max_len) ops.push_back(ins);
  if (ops.empty()) return;
  switch (ops[rng.below(ops.size())]) {
    case del:
      s.erase(rng.below(s.size()), 1);
      break;
    case ins:
      s.insert(s.begin() + static_cast<std::ptrdiff_t>(rng.below(s.size() + 1)),
               alphabet[rng.below(alphabet.size())]);
      break;
    case mod:
      s[rng.below(s.size())] = alphabet[rng.below(alphabet.size())];
      break;
  }
}

}  // namespace

TestChromosome mutate_test(const TestChromosome& t, double p_mut, const GeneLimits& lim, Rng& rng) {
  TestChromosome out = t;
  static const std::string full_alphabet = [] {
    std::string s;
    for (int i = 0; i < kAlphabetSize; ++i) s.push_back(symbol_at(i));
    return s;
  }();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!rng.chance(p_mut)) continue;
    if (rng.below(2) == 0) {
      // parameter mutation
      Action& g = out[i];
      if (g.kind == Action::Kind::click) {
        if (rng.below(2) == 0) {
          g.x = static_cast<int>(rng.below(static_cast<std::uint64_t>(lim.canvas_w)));
        } else {
          g.y = static_cast<int>(rng.below(static_cast<std::uint64_t>(lim.canvas_h)));
        }
      } else {
        mutate_type_string(g.text, lim.max_string_len, full_alphabet, rng);
      }
    } else {
      std::swap(out[i], out[rng.below(out.size())]);
    }
  }
  return out;
}

std::size_t tournament_select(std::size_t pop_size, std::size_t k,
                              const std::vector<double>& fitness, Rng& rng) {
  if (pop_size == 0) throw Error("tournament over an empty population");
  k = std::max<std::size_t>(1, std::min(k, pop_size));

  std::size_t best = pop_size;
  if (k * 2 >= pop_size) {
    // partial shuffle for large tournaments
    std::vector<std::size_t> idx(pop_size);
    for (std::size_t i = 0; i < pop_size; ++i) idx[i] = i;
    for (std::size_t i = 0; i < k; ++i) {
      std::swap(idx[i], idx[i + rng.below(pop_size - i)]);
      std::size_t entrant = idx[i];
      if (best == pop_size || fitness[entrant] < fitness[best] ||
          (fitness[entrant] == fitness[best] && entrant < best)) {
        best = entrant;
      }
    }
    return best;
  }
  // rejection sampling of k distinct entrants
  std::vector<std::size_t> drawn;
  drawn.reserve(k);
  while (drawn.size() < k) {
    std::size_t entrant = rng.below(pop_size);
    if (std::find(drawn.begin(), drawn.end(), entrant) != drawn.end()) continue;
    drawn.push_back(entrant);
    if (best == pop_size || fitness[entrant] < fitness[best] ||
        (fitness[entrant] == fitness[best] && entrant < best)) {
      best = entrant;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Contract species

ContractSpecies::ContractSpecies(std::string procedure, Contract contract,
                                 std::vector<ParamVector> population)
    : procedure_(std::move(procedure)), contract_(std::move(contract)) {
  replace_population(std::move(population));
}

void ContractSpecies::replace_population(std::vector<ParamVector> population) {
  population_ = std::move(population);
  satisfies_.assign(population_.size(), 0);
  for (std::size_t i = 0; i < population_.size(); ++i) {
    try {
      satisfies_[i] = evaluate(contract_, bind_params(contract_, population_[i])) ? 1 : 0;
    } catch (const EvalError&) {
      satisfies_[i] = 0;
    }
  }
  cache_.clear();
}

std::optional<std::uint64_t> ContractSpecies::gamma(const ParamVector& v) const {
  if (!params_match(contract_, v)) {
    throw ArityMismatchError("query vector does not match species contract '" + procedure_ + "'");
  }
  auto it = cache_.find(v);
  if (it != cache_.end()) return it->second;

  std::optional<std::uint64_t> best;
  for (std::size_t i = 0; i < population_.size(); ++i) {
    if (!satisfies_[i]) continue;
    std::uint64_t sum = 0;
    bool pruned = false;
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (value_type(v[j]) == ValueType::string) {
        const std::uint64_t cutoff =
            best ? (*best > sum ? *best - sum : 0) : std::numeric_limits<std::uint64_t>::max() - 1;
        sum += dist_str_bounded(std::get<std::string>(v[j]),
                                std::get<std::string>(population_[i][j]), cutoff);
      } else {
        sum += value_dist(v[j], population_[i][j]);
      }
      if (best && sum >= *best) {
        pruned = true;
        break;
      }
    }
    if (!pruned && (!best || sum < *best)) best = sum;
    if (best && *best == 0) break;
  }
  if (cache_.size() >= 4096) cache_.clear();
  cache_.emplace(v, best);
  return best;
}

std::optional<std::uint64_t> gamma_approx(const ContractSpecies& cs, const ParamVector& v) {
  return cs.gamma(v);
}

std::optional<std::uint64_t> fitness_contract(const ContractSpecies& cs, const ParamVector& w,
                                              const ParamVector& v) {
  if (!params_match(cs.contract(), w) || !params_match(cs.contract(), v)) {
    throw ArityMismatchError("vector does not match species contract '" + cs.procedure() + "'");
  }
  bool ok = false;
  try {
    ok = evaluate(cs.contract(), bind_params(cs.contract(), w));
  } catch (const EvalError&) {
    ok = false;
  }
  if (!ok) return std::nullopt;
  return manhattan(v, w);
}

namespace {

// The observed vector's own characters act as a second alphabet: half the
// inserted or substituted characters come from it, which keeps the string
// dimension from stalling on 1-in-94 lucky draws near the optimum.
ParamVector mutate_vector(const ParamVector& w, const SampleSpace& space,
                          const std::string& char_pool, Rng& rng) {
  ParamVector out = w;
  if (out.empty()) return out;
  const std::size_t i = rng.below(out.size());
  switch (value_type(out[i])) {
    case ValueType::boolean:
      out[i] = !std::get<bool>(out[i]);
      break;
    case ValueType::integer: {
      const std::int64_t step = rng.range(1, 3) * (rng.below(2) == 0 ? 1 : -1);
      std::int64_t v = std::get<std::int64_t>(out[i]) + step;
      v = std::clamp(v, space.int_lo, space.int_hi);
      out[i] = v;
      break;
    }
    case ValueType::string: {
      std::string s = std::get<std::string>(out[i]);
      const std::string alphabet = space.resolved_alphabet();
      const bool from_pool = !char_pool.empty() && rng.below(2) == 0;
      mutate_type_string(s, space.max_string_len, from_pool ? char_pool : alphabet, rng);
      out[i] = std::move(s);
      break;
    }
  }
  return out;
}

std::vector<double> species_fitness(const ContractSpecies& cs, const ParamVector& v) {
  std::vector<double> out(cs.population().size(), kInfFitness);
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!cs.satisfies()[i]) continue;
    out[i] = static_cast<double>(manhattan(v, cs.population()[i]));
  }
  return out;
}

}  // namespace

void evolve_contract_species(ContractSpecies& cs, const ParamVector& v, const SpeciesParams& params,
                             Rng& rng) {
  const auto& pop = cs.population();
  if (pop.empty()) return;
  const std::vector<double> fitness = species_fitness(cs, v);

  // Pool characters stay inside the sampling space so the population does.
  const std::string alphabet = params.space.resolved_alphabet();
  std::string char_pool;
  for (const auto& component : v) {
    if (value_type(component) != ValueType::string) continue;
    for (char c : std::get<std::string>(component)) {
      if (alphabet.find(c) != std::string::npos) char_pool.push_back(c);
    }
  }

  std::size_t elite = 0;
  for (std::size_t i = 1; i < pop.size(); ++i) {
    if (fitness[i] < fitness[elite]) elite = i;
  }

  std::vector<ParamVector> next;
  next.reserve(pop.size());
  next.push_back(pop[elite]);
  const std::size_t arity = cs.contract().vars.size();
  while (next.size() < pop.size()) {
    ParamVector c1 = pop[tournament_select(pop.size(), params.tournament, fitness, rng)];
    ParamVector c2 = pop[tournament_select(pop.size(), params.tournament, fitness, rng)];
    if (arity >= 2 && rng.chance(params.crossover_prob)) {
      const std::size_t point = 1 + rng.below(arity - 1);
      for (std::size_t j = point; j < arity; ++j) std::swap(c1[j], c2[j]);
    }
    if (rng.chance(params.mutation_prob)) c1 = mutate_vector(c1, params.space, char_pool, rng);
    if (rng.chance(params.mutation_prob)) c2 = mutate_vector(c2, params.space, char_pool, rng);
    next.push_back(std::move(c1));
    if (next.size() < pop.size()) next.push_back(std::move(c2));
  }
  cs.replace_population(std::move(next));
}

// ---------------------------------------------------------------------------
// Call distance and test fitness

std::uint64_t call_distance(const ExecutionTrace& tr, const DistanceMap& d, bool successful) {
  if (tr.invocations.empty()) throw EmptyTraceError("trace has no invocations");
  std::optional<std::uint64_t> min_d;
  for (const auto& inv : tr.invocations) {
    auto it = d.find(inv.procedure);
    if (it == d.end() || !it->second) continue;  // unreachable: ignored for the min
    if (!min_d || *it->second < *min_d) min_d = *it->second;
  }
  if (!min_d) {
    std::uint32_t diameter = 0;
    for (const auto& [name, dist] : d) {
      if (dist) diameter = std::max(diameter, *dist);
    }
    return static_cast<std::uint64_t>(diameter) + 2;
  }
  return *min_d + (successful ? 0 : 1);
}

EngineContext EngineContext::create(const AutModel& model, const VulnSpec& vuln,
                                    const EngineConfig& cfg, Rng& rng) {
  EngineContext ctx;
  ctx.model = &model;
  ctx.vuln = &vuln;
  const auto targets = target_procedures(model, vuln);
  ctx.distances = call_graph_distances(model, targets);

  for (const auto& p : model.procedures) {
    std::vector<ParamVector> population;
    try {
      population = seed_population(p.call_contract, cfg.contract_population, rng.next_u64(),
                                   cfg.sampler_budget, cfg.space);
    } catch (const UnsatContractError&) {
      if (targets.count(p.name)) throw;  // target unreachable under its contract
      // Non-target: keep an empty species; its correction stays zero.
    }
    ctx.species_index.emplace(p.name, ctx.species.size());
    ctx.species.emplace_back(p.name, p.call_contract, std::move(population));

    std::vector<std::size_t> projection;
    for (const auto& [var, type] : p.call_contract.vars) {
      for (std::size_t i = 0; i < p.params.size(); ++i) {
        if (p.params[i].name == var) projection.push_back(i);
      }
    }
    ctx.projections.emplace(p.name, std::move(projection));
  }
  return ctx;
}

ParamVector EngineContext::project(const std::string& procedure, const ParamVector& params) const {
  const auto& projection = projections.at(procedure);
  ParamVector out;
  out.reserve(projection.size());
  for (std::size_t i : projection) out.push_back(params[i]);
  return out;
}

FitnessResult fitness_test(const TestChromosome& t, const EngineContext& ctx) {
  FitnessResult r;
  r.trace = execute_test(*ctx.model, t);
  r.successful = is_successful(r.trace, *ctx.vuln);
  if (r.successful) {
    r.phi = 0;
    return r;
  }
  const std::uint64_t delta = call_distance(r.trace, ctx.distances, false);

  std::optional<std::uint64_t> min_d;
  for (const auto& inv : r.trace.invocations) {
    auto it = ctx.distances.find(inv.procedure);
    if (it != ctx.distances.end() && it->second && (!min_d || *it->second < *min_d)) {
      min_d = *it->second;
    }
  }
  std::optional<std::uint64_t> gamma;
  if (min_d) {
    // Gamma at the best invocation of any procedure realizing the minimum.
    for (const auto& inv : r.trace.invocations) {
      auto it = ctx.distances.find(inv.procedure);
      if (it == ctx.distances.end() || !it->second || *it->second != *min_d) continue;
      const ContractSpecies& cs = ctx.species[ctx.species_index.at(inv.procedure)];
      auto g = cs.gamma(ctx.project(inv.procedure, inv.params));
      if (g && (!gamma || *g < *gamma)) gamma = g;
    }
  }
  const double correction = gamma ? 1.0 / (static_cast<double>(*gamma) + 1.0) : 0.0;
  r.phi = static_cast<double>(delta) - correction;
  return r;
}

// ---------------------------------------------------------------------------
// Worker loop

WorkerStats run_worker(const AutModel& model, const VulnSpec& vuln, const EngineConfig& cfg,
                       std::uint64_t seed) {
  if (cfg.test_population == 0) throw Error("test population must be at least 1");
  if (cfg.crossover_prob < 0 || cfg.crossover_prob > 1 || cfg.mutation_prob < 0 ||
      cfg.mutation_prob > 1 || cfg.species_mutation_prob < 0 || cfg.species_mutation_prob > 1) {
    throw Error("probabilities must lie in [0, 1]");
  }
  Rng rng(seed);
  EngineContext ctx = EngineContext::create(model, vuln, cfg, rng);

  const GeneLimits lim{model.canvas_w, model.canvas_h, model.max_input_length};
  SpeciesParams species_params{cfg.tournament, cfg.crossover_prob, cfg.species_mutation_prob,
                               cfg.space};

  std::vector<TestChromosome> pop;
  pop.reserve(cfg.test_population);
  for (std::size_t i = 0; i < cfg.test_population; ++i) {
    pop.push_back(random_chromosome(cfg.clicks, cfg.types, lim, rng));
  }

  WorkerStats stats;
  double best_phi = kInfFitness;

  std::vector<double> fitness(pop.size(), kInfFitness);
  for (std::uint64_t gen = 0;; ++gen) {
    std::size_t gen_best = 0;
    ExecutionTrace gen_best_trace;
    for (std::size_t i = 0; i < pop.size(); ++i) {
      FitnessResult fr = fitness_test(pop[i], ctx);
      fitness[i] = fr.phi;
      if (fr.successful) {
        stats.termination = Termination::success;
        stats.best = pop[i];
        stats.best_phi = 0;
        stats.exploit_trace = std::move(fr.trace);
        stats.curve.emplace_back(gen, 0.0);
        stats.generations = gen + 1;
        return stats;
      }
      if (i == 0 || fr.phi < fitness[gen_best]) {
        gen_best = i;
        gen_best_trace = std::move(fr.trace);
      }
    }
    if (fitness[gen_best] < best_phi) {
      best_phi = fitness[gen_best];
      stats.best = pop[gen_best];
      stats.best_phi = best_phi;
    }
    stats.curve.emplace_back(gen, best_phi);
    stats.generations = gen + 1;
    if (gen == cfg.max_generations) break;

    // Contract species evolve against the best test's observations; species
    // whose procedure the best test never invoked stand still.
    for (auto& cs : ctx.species) {
      if (cs.population().empty()) continue;
      const ParamVector* query = nullptr;
      ParamVector projected;
      std::optional<std::uint64_t> best_gamma;
      bool invoked = false;
      for (const auto& inv : gen_best_trace.invocations) {
        if (inv.procedure != cs.procedure()) continue;
        invoked = true;
        ParamVector candidate = ctx.project(inv.procedure, inv.params);
        auto g = cs.gamma(candidate);
        const bool better = query == nullptr ||
                            (g && (!best_gamma || *g < *best_gamma));
        if (better) {
          projected = std::move(candidate);
          query = &projected;
          best_gamma = g;
        }
      }
      if (invoked) evolve_contract_species(cs, projected, species_params, rng);
    }

    std::vector<TestChromosome> next;
    next.reserve(pop.size());
    next.push_back(stats.best);  // elite
    while (next.size() < pop.size()) {
      const TestChromosome& a = pop[tournament_select(pop.size(), cfg.tournament, fitness, rng)];
      const TestChromosome& b = pop[tournament_select(pop.size(), cfg.tournament, fitness, rng)];
      TestChromosome c1, c2;
      if (rng.chance(cfg.crossover_prob)) {
        std::tie(c1, c2) = crossover_tests(a, b, cfg.crossover_positions, lim, rng);
      } else {
        c1 = a;
        c2 = b;
      }
      next.push_back(mutate_test(c1, cfg.mutation_prob, lim, rng));
      if (next.size() < pop.size()) next.push_back(mutate_test(c2, cfg.mutation_prob, lim, rng));
    }
    pop = std::move(next);
  }

  stats.termination = Termination::generation_cap;
  return stats;
}

}  // namespace coevo
