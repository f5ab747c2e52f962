#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "labelforge/quality.hpp"

namespace labelforge {

inline constexpr Gene kMaxGene = static_cast<Gene>(kCandidatesPerFeature - 1);

struct Chromosome {
  std::vector<Gene> genes;
  double fitness = std::numeric_limits<double>::infinity();

  friend bool operator==(const Chromosome&, const Chromosome&) = default;
};

using Population = std::vector<Chromosome>;
using Rng = std::mt19937_64;

enum class InitMode { elite, random };

// `as_printed`: gene > x steps up, gene < x steps down. `toward`: the mirrored variant.
enum class MutationDirection { as_printed, toward };

struct OptimizerConfig {
  std::size_t population_size = 100;
  std::size_t iterations = 10000;
  double crossover_rate = 0.5;
  double mutation_rate = 0.01;
  double ga_fraction = 0.70;
  double dde_scale = 0.5;
  std::uint64_t rng_seed = 1;
  std::optional<double> early_stop_threshold;
  InitMode init_mode = InitMode::elite;
  MutationDirection mutation_direction = MutationDirection::as_printed;

  void validate() const;
};

struct RunTrace {
  double initial_best = std::numeric_limits<double>::infinity();  // generation 0
  std::vector<double> best_per_generation;                        // generations 1..n
  std::size_t last_improvement = 0;
  double wall_seconds = 0.0;
};

// Chromosome 0 is the elite (all zeros) in elite mode; every other gene is uniform in [0, 23].
// Fitness values are left unset.
Population init_population(std::size_t gene_count, const OptimizerConfig& cfg, Rng& rng);

// One-point splice: genes [0, x) from pj, [x, Q) from pk.
Chromosome ga_offspring(const Chromosome& pj, const Chromosome& pk, std::size_t x);

// r1 + F (r2 - r3) per gene, rounded half away from zero and clamped to [0, 23].
Chromosome dde_offspring(const Chromosome& r1, const Chromosome& r2, const Chromosome& r3, double scale);

Gene mutate_gene(Gene gene, Gene pivot, MutationDirection direction);
void mutate(Chromosome& c, double rate, Rng& rng, MutationDirection direction = MutationDirection::as_printed);

void evaluate(Population& population, const FitnessModel& model);
std::size_t best_index(const Population& population);
std::size_t worst_index(const Population& population);

// One generation: best survivor + GA share + DDE share, mutation on all but the survivor.
Population evolve(const Population& population, const FitnessModel& model, const OptimizerConfig& cfg, Rng& rng);

// Stateful single-population optimizer; the unit an island worker owns.
class Optimizer {
 public:
  Optimizer(const FitnessModel& model, OptimizerConfig cfg);

  void step();
  // Replaces the current worst member.
  void inject(const Chromosome& c);
  bool reached_threshold() const;

  const Chromosome& best() const { return best_; }
  const Population& population() const { return population_; }
  std::size_t generation() const { return generation_; }
  RunTrace& trace() { return trace_; }
  const RunTrace& trace() const { return trace_; }

 private:
  void record();

  const FitnessModel* model_;
  OptimizerConfig cfg_;
  Rng rng_;
  Population population_;
  Chromosome best_;
  std::size_t generation_ = 0;
  RunTrace trace_;
};

struct RunResult {
  Chromosome best;
  RunTrace trace;
};

RunResult run(const FitnessModel& model, const OptimizerConfig& cfg);

}  // namespace labelforge
