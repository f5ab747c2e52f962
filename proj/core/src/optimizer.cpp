#include "labelforge/optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "labelforge/errors.hpp"

namespace labelforge {
namespace {

Gene clamp_gene(double v) { return static_cast<Gene>(std::clamp(v, 0.0, static_cast<double>(kMaxGene))); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(Rng& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

std::size_t tournament(const Population& pop, Rng& rng) {
  const std::size_t a = uniform_index(rng, pop.size());
  const std::size_t b = uniform_index(rng, pop.size());
  return pop[b].fitness < pop[a].fitness ? b : a;
}

}  // namespace

void OptimizerConfig::validate() const {
  if (population_size < 4) throw ConfigError("population size must be at least 4");
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(crossover_rate)) throw ConfigError("crossover rate must be in [0, 1]");
  if (!unit(mutation_rate)) throw ConfigError("mutation rate must be in [0, 1]");
  if (!unit(ga_fraction)) throw ConfigError("GA fraction must be in [0, 1]");
  if (!std::isfinite(dde_scale)) throw ConfigError("DDE scale must be finite");
}

Population init_population(std::size_t gene_count, const OptimizerConfig& cfg, Rng& rng) {
  std::uniform_int_distribution<int> gene(0, kMaxGene);
  Population pop(cfg.population_size);
  for (Chromosome& c : pop) {
    c.genes.resize(gene_count);
    for (Gene& g : c.genes) g = static_cast<Gene>(gene(rng));
  }
  if (cfg.init_mode == InitMode::elite && !pop.empty()) std::fill(pop[0].genes.begin(), pop[0].genes.end(), Gene{0});
  return pop;
}

Chromosome ga_offspring(const Chromosome& pj, const Chromosome& pk, std::size_t x) {
  Chromosome child;
  const std::size_t cut = std::min(x, pj.genes.size());
  child.genes.reserve(pj.genes.size());
  child.genes.insert(child.genes.end(), pj.genes.begin(), pj.genes.begin() + static_cast<std::ptrdiff_t>(cut));
  child.genes.insert(child.genes.end(), pk.genes.begin() + static_cast<std::ptrdiff_t>(cut), pk.genes.end());
  return child;
}

Chromosome dde_offspring(const Chromosome& r1, const Chromosome& r2, const Chromosome& r3, double scale) {
  Chromosome child;
  child.genes.resize(r1.genes.size());
  for (std::size_t i = 0; i < r1.genes.size(); ++i) {
    const double v = r1.genes[i] + scale * (static_cast<double>(r2.genes[i]) - static_cast<double>(r3.genes[i]));
    child.genes[i] = clamp_gene(std::round(v));
  }
  return child;
}

Gene mutate_gene(Gene gene, Gene pivot, MutationDirection direction) {
  int step = 0;
  if (gene > pivot) step = 1;
  if (gene < pivot) step = -1;
  if (direction == MutationDirection::toward) step = -step;
  return clamp_gene(static_cast<double>(gene) + step);
}

void mutate(Chromosome& c, double rate, Rng& rng, MutationDirection direction) {
  if (c.genes.empty() || rate <= 0.0) return;
  std::uniform_int_distribution<int> pivot(0, kMaxGene - 1);
  for (std::size_t i = 0; i < c.genes.size(); ++i) {
    if (!chance(rng, rate)) continue;
    const Gene x = static_cast<Gene>(pivot(rng));
    const std::size_t y = uniform_index(rng, c.genes.size());
    c.genes[y] = mutate_gene(c.genes[y], x, direction);
  }
}

void evaluate(Population& population, const FitnessModel& model) {
  for (Chromosome& c : population) c.fitness = model.fitness(c.genes);
}

std::size_t best_index(const Population& population) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].fitness < population[best].fitness) best = i;
  }
  return best;
}

std::size_t worst_index(const Population& population) {
  std::size_t worst = 0;
  for (std::size_t i = 1; i < population.size(); ++i) {
    if (population[i].fitness > population[worst].fitness) worst = i;
  }
  return worst;
}

Population evolve(const Population& pop, const FitnessModel& model, const OptimizerConfig& cfg, Rng& rng) {
  const std::size_t np = pop.size();
  const std::size_t q = pop.front().genes.size();
  Population next;
  next.reserve(np);
  next.push_back(pop[best_index(pop)]);

  const std::size_t offspring = np - 1;
  const auto ga_count = static_cast<std::size_t>(std::lround(cfg.ga_fraction * static_cast<double>(offspring)));
  for (std::size_t n = 0; n < offspring; ++n) {
    Chromosome child;
    if (n < ga_count) {
      const std::size_t j = tournament(pop, rng);
      std::size_t k = tournament(pop, rng);
      while (k == j) k = uniform_index(rng, np);
      if (chance(rng, cfg.crossover_rate)) {
        const std::size_t x = std::uniform_int_distribution<std::size_t>(0, q)(rng);
        child = ga_offspring(pop[j], pop[k], x);
      } else {
        child.genes = pop[j].genes;
      }
    } else {
      const std::size_t r1 = uniform_index(rng, np);
      std::size_t r2 = uniform_index(rng, np);
      while (r2 == r1) r2 = uniform_index(rng, np);
      std::size_t r3 = uniform_index(rng, np);
      while (r3 == r1 || r3 == r2) r3 = uniform_index(rng, np);
      child = dde_offspring(pop[r1], pop[r2], pop[r3], cfg.dde_scale);
    }
    mutate(child, cfg.mutation_rate, rng, cfg.mutation_direction);
    child.fitness = model.fitness(child.genes);
    next.push_back(std::move(child));
  }
  return next;
}

Optimizer::Optimizer(const FitnessModel& model, OptimizerConfig cfg)
    : model_(&model), cfg_(cfg), rng_(cfg.rng_seed) {
  cfg_.validate();
  population_ = init_population(model.gene_count(), cfg_, rng_);
  evaluate(population_, *model_);
  best_ = population_[best_index(population_)];
  trace_.initial_best = best_.fitness;
  trace_.best_per_generation.reserve(cfg_.iterations);
}

void Optimizer::record() {
  const std::size_t b = best_index(population_);
  if (population_[b].fitness < best_.fitness) {
    best_ = population_[b];
    trace_.last_improvement = generation_;
  }
  trace_.best_per_generation.push_back(best_.fitness);
}

void Optimizer::step() {
  ++generation_;
  if (model_->gene_count() > 0) population_ = evolve(population_, *model_, cfg_, rng_);
  record();
}

void Optimizer::inject(const Chromosome& c) {
  population_[worst_index(population_)] = c;
  if (c.fitness < best_.fitness) {
    best_ = c;
    trace_.last_improvement = generation_;
  }
  if (!trace_.best_per_generation.empty()) trace_.best_per_generation.back() = best_.fitness;
}

bool Optimizer::reached_threshold() const {
  return cfg_.early_stop_threshold && best_.fitness <= *cfg_.early_stop_threshold;
}

RunResult run(const FitnessModel& model, const OptimizerConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Optimizer opt(model, cfg);
  while (opt.generation() < cfg.iterations && !opt.reached_threshold()) opt.step();
  RunResult out{opt.best(), std::move(opt.trace())};
  out.trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace labelforge
