#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dwsc/decode.hpp"
#include "dwsc/model.hpp"
#include "dwsc/operators.hpp"
#include "dwsc/qos.hpp"
#include "dwsc/rng.hpp"

namespace dwsc {

enum class CrossoverKind { index, dg_index, dg_two_point, dg_lcs };

const char* crossover_name(CrossoverKind kind);
CrossoverKind crossover_from_name(const std::string& name);  // throws ConfigError

struct GaConfig {
  int population_size = 100;
  int generations = 100;
  double p_crossover = 0.95;
  double p_mutation = 0.05;
  double p_local_search = 0.05;
  int tournament_size = 2;
  int elitism = 2;
  int neighborhood_size = 10;
  CrossoverKind crossover_kind = CrossoverKind::dg_lcs;
  std::uint64_t seed = 0;

  void validate() const;  // throws ConfigError
};

struct Individual {
  Chromosome chromosome;
  double fitness = 1.0;
  DecodeResult decoded;
};

struct RunResult {
  std::vector<double> best_per_generation;  // one entry per generation, non-increasing
  Individual final_best;
  std::chrono::duration<double> wall_time{0.0};
  std::uint64_t seed = 0;
};

// Each individual is a uniform random permutation of the whole repository,
// decoded, reduced and scored. Throws ConfigError when the task is not
// solvable with the full repository.
std::vector<Individual> init_population(const Repository& repo, const Task& task,
                                        const GaConfig& config, Rng& rng);

// Samples `tournament_size` individuals with replacement and returns the one
// with the lowest fitness; the first sampled wins ties.
std::size_t tournament_select_index(const std::vector<Individual>& population,
                                    int tournament_size, Rng& rng);
const Individual& tournament_select(const std::vector<Individual>& population,
                                    int tournament_size, Rng& rng);

using GenerationObserver =
    std::function<void(int generation, const std::vector<Individual>& population)>;

// The GA main loop: elitism, tournament selection, the configured crossover,
// mutation, and distance-guided local search on tournament-picked members of
// the new generation. Fully reproducible from config.seed.
RunResult evolve(const Repository& repo, const Task& task, const GaConfig& config,
                 const GenerationObserver& observer = nullptr);

}  // namespace dwsc
