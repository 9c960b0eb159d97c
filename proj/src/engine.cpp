#include "dwsc/engine.hpp"

#include <algorithm>
#include <numeric>

#include "dwsc/errors.hpp"

namespace dwsc {

const char* crossover_name(CrossoverKind kind) {
  switch (kind) {
    case CrossoverKind::index: return "index";
    case CrossoverKind::dg_index: return "dg-index";
    case CrossoverKind::dg_two_point: return "dg-two-point";
    case CrossoverKind::dg_lcs: return "dg-lcs";
  }
  return "?";
}

CrossoverKind crossover_from_name(const std::string& name) {
  if (name == "index") return CrossoverKind::index;
  if (name == "dg-index") return CrossoverKind::dg_index;
  if (name == "dg-two-point") return CrossoverKind::dg_two_point;
  if (name == "dg-lcs") return CrossoverKind::dg_lcs;
  throw ConfigError("unknown crossover method '" + name +
                    "' (expected index|dg-index|dg-two-point|dg-lcs)");
}

void GaConfig::validate() const {
  if (population_size < 1) throw ConfigError("population_size must be >= 1");
  if (generations < 0) throw ConfigError("generations must be >= 0");
  for (double p : {p_crossover, p_mutation, p_local_search})
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("operator probabilities must be in [0,1]");
  if (tournament_size < 1) throw ConfigError("tournament_size must be >= 1");
  if (elitism < 0 || elitism >= population_size)
    throw ConfigError("elitism must be in [0, population_size)");
  if (neighborhood_size < 1) throw ConfigError("neighborhood_size must be >= 1");
}

namespace {

struct Evaluator {
  const Repository& repo;
  const Task& task;
  NormBounds bounds;

  // Decode, reduce, score. An undecodable chromosome (unreachable with the
  // stock operators) keeps its genes and gets the worst possible fitness.
  Individual evaluate(Chromosome chrom) const {
    DecodeOutcome outcome = try_backward_decode(repo, task, chrom);
    if (!outcome.result) return Individual{std::move(chrom), 1.0, DecodeResult{}};
    Individual ind;
    ind.chromosome = reduce(chrom, *outcome.result);
    ind.fitness = fitness(repo, task, outcome.result->dag, bounds).fitness;
    ind.decoded = std::move(*outcome.result);
    return ind;
  }
};

std::pair<Chromosome, Chromosome> apply_crossover(CrossoverKind kind, const Repository& repo,
                                                  const Chromosome& p1, const Chromosome& p2,
                                                  Rng& rng) {
  switch (kind) {
    case CrossoverKind::index: return index_crossover(p1, p2, rng);
    case CrossoverKind::dg_index: return dg_index_crossover(repo, p1, p2);
    case CrossoverKind::dg_two_point: return dg_two_point_crossover(repo, p1, p2);
    case CrossoverKind::dg_lcs: return dg_lcs_crossover(repo, p1, p2);
  }
  return {p1, p2};
}

std::vector<std::size_t> ranked_indices(const std::vector<Individual>& population) {
  std::vector<std::size_t> order(population.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return population[a].fitness < population[b].fitness;
  });
  return order;
}

}  // namespace

std::vector<Individual> init_population(const Repository& repo, const Task& task,
                                        const GaConfig& config, Rng& rng) {
  const int n = repo.n_services();
  if (n == 0) throw ConfigError("repository has no services");

  Chromosome all;
  all.genes.resize(static_cast<std::size_t>(n));
  std::iota(all.genes.begin(), all.genes.end(), 0);
  {
    DecodeOutcome probe = try_backward_decode(repo, task, all);
    if (!probe.result) {
      std::string msg = "task is not solvable with the full repository; missing:";
      for (int c : probe.uncovered) msg += " '" + repo.taxonomy().id_of(c) + "'";
      throw ConfigError(msg);
    }
  }

  Evaluator eval{repo, task, norm_bounds(repo, task)};
  std::vector<Individual> population;
  population.reserve(static_cast<std::size_t>(config.population_size));
  for (int i = 0; i < config.population_size; ++i) {
    Chromosome perm = all;
    rng.shuffle(perm.genes);
    population.push_back(eval.evaluate(std::move(perm)));
  }
  return population;
}

std::size_t tournament_select_index(const std::vector<Individual>& population,
                                    int tournament_size, Rng& rng) {
  std::size_t best = static_cast<std::size_t>(rng.below(population.size()));
  for (int t = 1; t < tournament_size; ++t) {
    std::size_t cand = static_cast<std::size_t>(rng.below(population.size()));
    if (population[cand].fitness < population[best].fitness) best = cand;
  }
  return best;
}

const Individual& tournament_select(const std::vector<Individual>& population,
                                    int tournament_size, Rng& rng) {
  return population[tournament_select_index(population, tournament_size, rng)];
}

RunResult evolve(const Repository& repo, const Task& task, const GaConfig& config,
                 const GenerationObserver& observer) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();

  Rng init_rng(derive_seed(config.seed, "init"));
  Rng selection_rng(derive_seed(config.seed, "selection"));
  Rng crossover_rng(derive_seed(config.seed, "crossover"));
  Rng mutation_rng(derive_seed(config.seed, "mutation"));
  Rng local_search_rng(derive_seed(config.seed, "local-search"));

  Evaluator eval{repo, task, norm_bounds(repo, task)};
  std::vector<Individual> population = init_population(repo, task, config, init_rng);

  auto best_of = [](const std::vector<Individual>& pop) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
      if (pop[i].fitness < pop[best].fitness) best = i;
    return best;
  };

  Individual global_best = population[best_of(population)];

  RunResult result;
  result.seed = config.seed;
  result.best_per_generation.reserve(static_cast<std::size_t>(config.generations));

  for (int gen = 0; gen < config.generations; ++gen) {
    std::vector<Individual> next;
    next.reserve(static_cast<std::size_t>(config.population_size));

    const auto ranked = ranked_indices(population);
    for (int e = 0; e < config.elitism; ++e)
      next.push_back(population[ranked[static_cast<std::size_t>(e)]]);

    while (static_cast<int>(next.size()) < config.population_size) {
      const Individual& p1 = tournament_select(population, config.tournament_size, selection_rng);
      const Individual& p2 = tournament_select(population, config.tournament_size, selection_rng);

      std::pair<Chromosome, Chromosome> children;
      if (crossover_rng.chance(config.p_crossover))
        children = apply_crossover(config.crossover_kind, repo, p1.chromosome, p2.chromosome,
                                   crossover_rng);
      else
        children = {p1.chromosome, p2.chromosome};

      for (Chromosome* child : {&children.first, &children.second}) {
        if (static_cast<int>(next.size()) >= config.population_size) break;
        if (mutation_rng.chance(config.p_mutation))
          *child = mutate(repo, *child, mutation_rng);
        next.push_back(eval.evaluate(std::move(*child)));
      }
    }

    // Local search: one lottery per newly created slot; each hit refines a
    // tournament-picked member of the new generation in place.
    const int new_slots = config.population_size - config.elitism;
    for (int s = 0; s < new_slots; ++s) {
      if (!local_search_rng.chance(config.p_local_search)) continue;
      const std::size_t who =
          tournament_select_index(next, config.tournament_size, local_search_rng);
      Chromosome refined = local_search(repo, task, eval.bounds, next[who].chromosome,
                                        config.neighborhood_size, local_search_rng);
      if (!(refined == next[who].chromosome)) next[who] = eval.evaluate(std::move(refined));
    }

    population = std::move(next);

    const std::size_t best = best_of(population);
    result.best_per_generation.push_back(population[best].fitness);
    if (population[best].fitness < global_best.fitness) global_best = population[best];
    if (observer) observer(gen, population);
  }

  result.final_best = std::move(global_best);
  result.wall_time = std::chrono::steady_clock::now() - t0;
  return result;
}

}  // namespace dwsc
