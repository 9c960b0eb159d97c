#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dwsc/engine.hpp"

namespace dwsc {

// Paired two-sided Wilcoxon signed-rank test. Zero differences are dropped;
// ties share mean ranks. Exact sign-assignment distribution up to
// kWilcoxonExactLimit pairs, normal approximation with continuity and tie
// correction beyond.
inline constexpr int kWilcoxonExactLimit = 25;

struct WilcoxonResult {
  double statistic = 0.0;  // min(W+, W-)
  double p_value = 1.0;
  int n_used = 0;          // pairs left after dropping zero differences
  bool exact = true;
};

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y);

// Optional per-field GA overrides carried by a plan file.
struct GaOverrides {
  std::optional<int> population_size;
  std::optional<int> generations;
  std::optional<double> p_crossover;
  std::optional<double> p_mutation;
  std::optional<double> p_local_search;
  std::optional<int> tournament_size;
  std::optional<int> elitism;
  std::optional<int> neighborhood_size;

  void apply(GaConfig& config) const;
};

struct ExperimentPlan {
  std::vector<std::string> datasets;  // dataset file paths
  std::vector<CrossoverKind> methods;
  int runs_per_cell = 30;
  std::uint64_t base_seed = 1;
  GaOverrides ga_overrides;

  void validate() const;  // throws ConfigError
};

ExperimentPlan load_plan(const std::string& path);

struct CellResult {
  std::string dataset;  // dataset id (file stem)
  CrossoverKind method = CrossoverKind::index;
  std::vector<double> fitness_samples;   // one per run
  double mean = 0.0;
  double stddev = 0.0;                   // sample standard deviation (n-1)
  std::vector<double> mean_convergence;  // per-generation mean of best fitness
  std::optional<std::string> error;      // set when any run of the cell failed
};

struct PairwiseVerdict {
  std::string dataset;
  CrossoverKind method_a = CrossoverKind::index;
  CrossoverKind method_b = CrossoverKind::index;
  double statistic = 0.0;
  double p_value = 1.0;
  bool exact = true;
  bool significant = false;                // p < 0.05
  std::optional<CrossoverKind> winner;     // lower mean, only when significant
};

struct PlanResult {
  ExperimentPlan plan;
  std::vector<CellResult> cells;        // ordered by (dataset, method)
  std::vector<PairwiseVerdict> verdicts;
  // Per dataset: the methods no other method beats with significance.
  std::vector<std::pair<std::string, std::vector<CrossoverKind>>> top_performers;
};

// Per-run seed: distinct and reproducible per (dataset, method, run).
std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset_id,
                        CrossoverKind method, int run_index);

// Runs every (dataset, method, run) cell of the plan, in parallel across
// `threads` workers (0 = hardware concurrency). Failures are recorded in the
// affected cell and the plan continues.
PlanResult run_plan(const ExperimentPlan& plan, int threads = 0);

enum class ReportFormat { csv, markdown };

// Mean and deviation per (dataset, method) with top performers marked. The
// csv and markdown forms carry identical numbers.
std::string render_report(const PlanResult& result, ReportFormat format);
void emit_report(const PlanResult& result, ReportFormat format, const std::string& path);

// Per-generation mean best fitness per (dataset, method): plottable
// convergence curves.
std::string render_convergence_csv(const PlanResult& result);
void emit_convergence_csv(const PlanResult& result, const std::string& path);

// File stem used as the dataset id in reports and seeds.
std::string dataset_id_from_path(const std::string& path);

}  // namespace dwsc
