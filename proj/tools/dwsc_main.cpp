// Command line front end: dataset generation, single GA runs, and the
// multi-run benchmark harness.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"

#include "dwsc/bench.hpp"
#include "dwsc/data.hpp"
#include "dwsc/decode.hpp"
#include "dwsc/engine.hpp"

namespace {

int cmd_gen(const dwsc::GenSpec& spec_in, const std::string& distances_path,
            const std::string& out_path) {
  dwsc::GenSpec spec = spec_in;
  if (!distances_path.empty()) spec.distances = dwsc::load_distance_matrix(distances_path);
  dwsc::Dataset ds = dwsc::generate(spec);
  dwsc::save_dataset(ds.repo, ds.task_record, out_path);
  std::cout << "wrote " << out_path << " (" << ds.repo.n_services() << " services, "
            << ds.repo.n_concepts() << " concepts, " << ds.repo.n_locations()
            << " locations)\n";
  return 0;
}

int cmd_run(const std::string& dataset_path, const std::string& method, std::uint64_t seed,
            dwsc::GaConfig config, const std::string& dag_out) {
  config.crossover_kind = dwsc::crossover_from_name(method);
  config.seed = seed;

  dwsc::Dataset ds = dwsc::load_dataset(dataset_path);
  dwsc::RunResult result = dwsc::evolve(ds.repo, ds.task, config);

  std::ofstream out(dag_out, std::ios::binary | std::ios::trunc);
  if (!out) throw dwsc::Error("cannot write '" + dag_out + "'");
  out << dwsc::export_text(ds.repo, result.final_best.decoded.dag);

  std::printf("fitness: %.6f\n", result.final_best.fitness);
  std::printf("services used: %zu\n", result.final_best.chromosome.genes.size());
  std::printf("dag: %s\n", dag_out.c_str());
  std::printf("wall time: %.2fs\n", result.wall_time.count());
  return 0;
}

int cmd_bench(const std::string& plan_path, const std::string& out_dir, int threads) {
  dwsc::ExperimentPlan plan = dwsc::load_plan(plan_path);
  std::filesystem::create_directories(out_dir);

  dwsc::PlanResult result = dwsc::run_plan(plan, threads);
  const std::string csv = out_dir + "/results.csv";
  const std::string md = out_dir + "/results.md";
  const std::string conv = out_dir + "/convergence.csv";
  dwsc::emit_report(result, dwsc::ReportFormat::csv, csv);
  dwsc::emit_report(result, dwsc::ReportFormat::markdown, md);
  dwsc::emit_convergence_csv(result, conv);

  std::cout << "wrote " << csv << ", " << md << ", " << conv << "\n";
  bool incomplete = false;
  for (const auto& cell : result.cells)
    if (cell.error) {
      incomplete = true;
      std::cerr << "incomplete cell " << cell.dataset << "/"
                << dwsc::crossover_name(cell.method) << ": " << *cell.error << "\n";
    }
  return incomplete ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"distributed data-intensive web service composition solver"};
  app.require_subcommand(1);

  // gen
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  dwsc::GenSpec spec;
  std::string distances_path;
  std::string gen_out;
  int locations = 0;
  gen->add_option("--services", spec.n_services, "number of services")->required();
  gen->add_option("--concepts", spec.n_concepts, "number of taxonomy concepts")->required();
  gen->add_option("--clusters", spec.n_clusters, "number of location clusters")->required();
  gen->add_option("--chain", spec.chain_length, "planted solution chain length")->required();
  gen->add_option("--chains", spec.n_chains, "number of independent planted pipelines");
  gen->add_option("--seed", spec.seed, "generator seed")->required();
  gen->add_option("--out", gen_out, "output dataset path")->required();
  gen->add_option("--locations", locations, "number of locations (default 2x clusters)");
  gen->add_option("--data-min", spec.data_items_min, "min data items per service");
  gen->add_option("--data-max", spec.data_items_max, "max data items per service");
  gen->add_option("--distances", distances_path,
                  "pairwise location distance matrix file (overrides coordinates)");

  // run
  auto* run = app.add_subcommand("run", "single GA run on a dataset");
  std::string run_dataset, run_method = "dg-lcs", dag_out = "dag.txt";
  std::uint64_t run_seed = 1;
  dwsc::GaConfig config;
  run->add_option("--dataset", run_dataset, "dataset path")->required();
  run->add_option("--method", run_method, "index|dg-index|dg-two-point|dg-lcs");
  run->add_option("--seed", run_seed, "run seed");
  run->add_option("--generations", config.generations, "generations");
  run->add_option("--pop", config.population_size, "population size");
  run->add_option("--p-crossover", config.p_crossover, "crossover probability");
  run->add_option("--p-mutation", config.p_mutation, "mutation probability");
  run->add_option("--p-local-search", config.p_local_search, "local search probability");
  run->add_option("--tournament", config.tournament_size, "tournament size");
  run->add_option("--elitism", config.elitism, "elitism size");
  run->add_option("--neighborhood", config.neighborhood_size, "local search neighborhood size");
  run->add_option("--dag-out", dag_out, "path for the decoded DAG export");

  // bench
  auto* bench = app.add_subcommand("bench", "run an experiment plan");
  std::string plan_path, bench_out;
  int threads = 0;
  bench->add_option("--plan", plan_path, "plan file path")->required();
  bench->add_option("--out", bench_out, "output directory")->required();
  bench->add_option("--threads", threads, "worker threads (default: all cores)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      spec.n_locations = locations > 0 ? locations : 2 * spec.n_clusters;
      return cmd_gen(spec, distances_path, gen_out);
    }
    if (run->parsed()) return cmd_run(run_dataset, run_method, run_seed, config, dag_out);
    if (bench->parsed()) return cmd_bench(plan_path, bench_out, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
