#ifndef COEVO_CCEA_HPP
#define COEVO_CCEA_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coevo/aut.hpp"
#include "coevo/contract.hpp"
#include "coevo/rng.hpp"
#include "coevo/sampler.hpp"
#include "coevo/value.hpp"

namespace coevo {

// A test chromosome is a fixed-multiset permutation of GUI actions; the
// per-label counts come from the engine configuration and every operator
// preserves them.
using TestChromosome = std::vector<Action>;

struct GeneLimits {
  int canvas_w = 128;
  int canvas_h = 128;
  int max_string_len = 30;
};

bool same_label_counts(const TestChromosome& a, const TestChromosome& b);

TestChromosome random_chromosome(std::size_t clicks, std::size_t types, const GeneLimits& lim,
                                 Rng& rng);

// Swap-tails crossover on two strings; each cut keeps cut+1 leading
// characters of its own parent (a full-length cut is the identity).
std::pair<std::string, std::string> cross_strings(const std::string& a, const std::string& b,
                                                  std::size_t cut_a, std::size_t cut_b);

// Single-point crossover over (x, y); cut is the number of leading
// coordinates kept: 0 swaps both, 1 swaps y only, 2 is the identity.
std::pair<Action, Action> cross_clicks(const Action& a, const Action& b, int cut);

// Crossover at `positions` label-relative gene pairs; offspring strings are
// truncated back to the length cap.
std::pair<TestChromosome, TestChromosome> crossover_tests(const TestChromosome& a,
                                                          const TestChromosome& b,
                                                          std::size_t positions,
                                                          const GeneLimits& lim, Rng& rng);

TestChromosome mutate_test(const TestChromosome& t, double p_mut, const GeneLimits& lim, Rng& rng);

// Deterministic tournament: k distinct entrants, lowest fitness wins, ties to
// the earliest population index. Returns the winner's index.
std::size_t tournament_select(std::size_t pop_size, std::size_t k,
                              const std::vector<double>& fitness, Rng& rng);

// ---------------------------------------------------------------------------

// Population of vectors approximating one call contract's distance function.
class ContractSpecies {
 public:
  ContractSpecies(std::string procedure, Contract contract, std::vector<ParamVector> population);

  const std::string& procedure() const { return procedure_; }
  const Contract& contract() const { return contract_; }
  const std::vector<ParamVector>& population() const { return population_; }
  const std::vector<char>& satisfies() const { return satisfies_; }

  // Min Manhattan distance from v to a satisfying member; nullopt = infinity.
  // Cached per query until the population changes.
  std::optional<std::uint64_t> gamma(const ParamVector& v) const;

  void replace_population(std::vector<ParamVector> population);

 private:
  std::string procedure_;
  Contract contract_;
  std::vector<ParamVector> population_;
  std::vector<char> satisfies_;
  mutable std::map<ParamVector, std::optional<std::uint64_t>> cache_;
};

std::optional<std::uint64_t> gamma_approx(const ContractSpecies& cs, const ParamVector& v);

// Manhattan distance to the execution-observed vector when the member
// satisfies the contract, infinity otherwise (Eq-style species fitness).
std::optional<std::uint64_t> fitness_contract(const ContractSpecies& cs, const ParamVector& w,
                                              const ParamVector& v);

struct SpeciesParams {
  std::size_t tournament = 3;
  double crossover_prob = 0.95;
  // Higher than the test species' rate: the small vectors need more mutation
  // events per generation to track a moving observation.
  double mutation_prob = 0.25;
  SampleSpace space;
};

// One generation of the species against the observed vector v.
void evolve_contract_species(ContractSpecies& cs, const ParamVector& v, const SpeciesParams& params,
                             Rng& rng);

// ---------------------------------------------------------------------------

// Min call-graph distance over the invoked procedures, plus one when the
// test is not successful; traces that touch no connected procedure get a
// ceiling of diameter + 2.
std::uint64_t call_distance(const ExecutionTrace& tr, const DistanceMap& d, bool successful);

struct EngineConfig {
  std::size_t test_population = 100;
  std::size_t contract_population = 32;
  std::size_t tournament = 3;
  double crossover_prob = 0.95;
  double mutation_prob = 0.06;
  double species_mutation_prob = 0.25;
  std::size_t crossover_positions = 2;
  std::size_t clicks = 4;
  std::size_t types = 1;
  std::uint64_t max_generations = 50000;
  std::uint64_t sampler_budget = 10000;
  SampleSpace space;
};

// Shared state for one worker: the AUT, the distances, and the species.
struct EngineContext {
  const AutModel* model = nullptr;
  const VulnSpec* vuln = nullptr;
  DistanceMap distances;
  std::vector<ContractSpecies> species;                    // one per procedure, model order
  std::map<std::string, std::size_t> species_index;        // procedure name -> slot
  std::map<std::string, std::vector<std::size_t>> projections;  // contract vars -> param slots

  static EngineContext create(const AutModel& model, const VulnSpec& vuln, const EngineConfig& cfg,
                              Rng& rng);

  // Invocation actuals projected onto the procedure's call-contract variables.
  ParamVector project(const std::string& procedure, const ParamVector& params) const;
};

struct FitnessResult {
  double phi = 0;
  bool successful = false;
  ExecutionTrace trace;
};

// Executes the test and grades it: 0 when successful, otherwise the call
// distance minus the contract-distance correction 1/(gamma+1) taken at the
// best invocation of a procedure realizing the call-distance minimum.
FitnessResult fitness_test(const TestChromosome& t, const EngineContext& ctx);

enum class Termination { success, generation_cap };

struct WorkerStats {
  Termination termination = Termination::generation_cap;
  std::vector<std::pair<std::uint64_t, double>> curve;  // (generation, best fitness so far)
  TestChromosome best;
  double best_phi = 0;
  std::optional<ExecutionTrace> exploit_trace;
  std::uint64_t generations = 0;
};

WorkerStats run_worker(const AutModel& model, const VulnSpec& vuln, const EngineConfig& cfg,
                       std::uint64_t seed);

}  // namespace coevo

#endif
