#include "dwsc/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "dwsc/data.hpp"
#include "dwsc/errors.hpp"

namespace dwsc {

// ---------------------------------------------------------------------------
// Wilcoxon signed-rank
// ---------------------------------------------------------------------------

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ConfigError("wilcoxon: samples must be paired");
  if (x.size() < 2) throw ConfigError("wilcoxon: need at least two pairs");

  struct Diff {
    double abs;
    bool positive;
  };
  std::vector<Diff> diffs;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    if (d != 0.0) diffs.push_back({std::abs(d), d > 0.0});
  }

  WilcoxonResult res;
  res.n_used = static_cast<int>(diffs.size());
  if (diffs.empty()) return res;  // all differences zero: statistic 0, p 1

  std::sort(diffs.begin(), diffs.end(),
            [](const Diff& a, const Diff& b) { return a.abs < b.abs; });

  // Doubled mean ranks stay integral under ties: positions i..j (1-based)
  // share rank (i+j)/2, i.e. doubled rank i+j.
  const int n = res.n_used;
  std::vector<long long> rank2(static_cast<std::size_t>(n), 0);
  std::vector<int> tie_sizes;
  for (int i = 0; i < n;) {
    int j = i;
    while (j + 1 < n && diffs[static_cast<std::size_t>(j + 1)].abs == diffs[static_cast<std::size_t>(i)].abs) ++j;
    const long long doubled = (i + 1) + (j + 1);
    for (int k = i; k <= j; ++k) rank2[static_cast<std::size_t>(k)] = doubled;
    tie_sizes.push_back(j - i + 1);
    i = j + 1;
  }

  long long w2_plus = 0;
  long long w2_total = 0;
  for (int i = 0; i < n; ++i) {
    w2_total += rank2[static_cast<std::size_t>(i)];
    if (diffs[static_cast<std::size_t>(i)].positive) w2_plus += rank2[static_cast<std::size_t>(i)];
  }
  const long long w2_minus = w2_total - w2_plus;
  const long long w2_min = std::min(w2_plus, w2_minus);
  res.statistic = static_cast<double>(w2_min) / 2.0;

  if (n <= kWilcoxonExactLimit) {
    // Exact two-sided p: share of sign assignments whose min(W+, W-) is at
    // most the observed one, over the observed rank multiset.
    std::vector<double> ways(static_cast<std::size_t>(w2_total + 1), 0.0);
    ways[0] = 1.0;
    long long reach = 0;
    for (int i = 0; i < n; ++i) {
      const long long r = rank2[static_cast<std::size_t>(i)];
      reach += r;
      for (long long s = reach; s >= r; --s)
        ways[static_cast<std::size_t>(s)] += ways[static_cast<std::size_t>(s - r)];
    }
    double hits = 0.0;
    for (long long s = 0; s <= w2_total; ++s)
      if (std::min(s, w2_total - s) <= w2_min) hits += ways[static_cast<std::size_t>(s)];
    res.p_value = hits / std::ldexp(1.0, n);  // / 2^n
    res.exact = true;
  } else {
    // Normal approximation with continuity correction and tie correction.
    const double nn = static_cast<double>(n);
    const double w = res.statistic;
    const double mu = nn * (nn + 1.0) / 4.0;
    double tie_term = 0.0;
    for (int t : tie_sizes) {
      const double td = static_cast<double>(t);
      tie_term += td * td * td - td;
    }
    const double sigma2 = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
    const double sigma = std::sqrt(sigma2);
    if (sigma == 0.0) {
      res.p_value = 1.0;
    } else {
      const double z = (w - mu + 0.5) / sigma;
      res.p_value = std::min(1.0, std::erfc(-z / std::sqrt(2.0)));
    }
    res.exact = false;
  }
  return res;
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

void GaOverrides::apply(GaConfig& config) const {
  if (population_size) config.population_size = *population_size;
  if (generations) config.generations = *generations;
  if (p_crossover) config.p_crossover = *p_crossover;
  if (p_mutation) config.p_mutation = *p_mutation;
  if (p_local_search) config.p_local_search = *p_local_search;
  if (tournament_size) config.tournament_size = *tournament_size;
  if (elitism) config.elitism = *elitism;
  if (neighborhood_size) config.neighborhood_size = *neighborhood_size;
}

void ExperimentPlan::validate() const {
  if (datasets.empty()) throw ConfigError("plan: datasets must be non-empty");
  if (methods.empty()) throw ConfigError("plan: methods must be non-empty");
  if (runs_per_cell < 2) throw ConfigError("plan: runs_per_cell must be >= 2");
  std::set<std::string> ids;
  for (const auto& path : datasets)
    if (!ids.insert(dataset_id_from_path(path)).second)
      throw ConfigError("plan: duplicate dataset id '" + dataset_id_from_path(path) + "'");
}

std::string dataset_id_from_path(const std::string& path) {
  std::size_t slash = path.find_last_of("/\\");
  std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
  std::size_t dot = name.find_last_of('.');
  if (dot != std::string::npos && dot > 0) name.resize(dot);
  return name;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError(path + ": cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw LoadError(path + ": " + e.what());
  }
  if (!doc.is_object()) throw LoadError(path + ": expected an object");

  ExperimentPlan plan;
  if (!doc.contains("datasets") || !doc["datasets"].is_array())
    throw LoadError(path + ": missing 'datasets' array");
  for (const auto& d : doc["datasets"]) {
    if (!d.is_string()) throw LoadError(path + ": dataset entries must be strings");
    plan.datasets.push_back(d.get<std::string>());
  }
  if (!doc.contains("methods") || !doc["methods"].is_array())
    throw LoadError(path + ": missing 'methods' array");
  for (const auto& m : doc["methods"]) {
    if (!m.is_string()) throw LoadError(path + ": method entries must be strings");
    plan.methods.push_back(crossover_from_name(m.get<std::string>()));
  }
  if (doc.contains("runs_per_cell")) plan.runs_per_cell = doc["runs_per_cell"].get<int>();
  if (doc.contains("base_seed")) plan.base_seed = doc["base_seed"].get<std::uint64_t>();
  if (doc.contains("ga")) {
    const auto& ga = doc["ga"];
    if (!ga.is_object()) throw LoadError(path + ": 'ga' must be an object");
    auto opt_int = [&](const char* key) -> std::optional<int> {
      if (ga.contains(key)) return ga[key].get<int>();
      return std::nullopt;
    };
    auto opt_real = [&](const char* key) -> std::optional<double> {
      if (ga.contains(key)) return ga[key].get<double>();
      return std::nullopt;
    };
    plan.ga_overrides.population_size = opt_int("population_size");
    plan.ga_overrides.generations = opt_int("generations");
    plan.ga_overrides.p_crossover = opt_real("p_crossover");
    plan.ga_overrides.p_mutation = opt_real("p_mutation");
    plan.ga_overrides.p_local_search = opt_real("p_local_search");
    plan.ga_overrides.tournament_size = opt_int("tournament_size");
    plan.ga_overrides.elitism = opt_int("elitism");
    plan.ga_overrides.neighborhood_size = opt_int("neighborhood_size");
  }
  plan.validate();
  return plan;
}

std::uint64_t cell_seed(std::uint64_t base_seed, const std::string& dataset_id,
                        CrossoverKind method, int run_index) {
  std::string key = dataset_id;
  key += '\x1f';
  key += crossover_name(method);
  key += '\x1f';
  key += std::to_string(run_index);
  std::uint64_t s = base_seed ^ fnv1a64(key);
  return splitmix64(s);
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

namespace {

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
  if (v.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

PlanResult run_plan(const ExperimentPlan& plan, int threads) {
  plan.validate();

  PlanResult result;
  result.plan = plan;

  struct LoadedDataset {
    std::string id;
    std::optional<Dataset> data;
    std::string error;
  };
  std::vector<LoadedDataset> datasets;
  for (const auto& path : plan.datasets) {
    LoadedDataset ld;
    ld.id = dataset_id_from_path(path);
    try {
      ld.data = load_dataset(path);
    } catch (const std::exception& e) {
      ld.error = e.what();
    }
    datasets.push_back(std::move(ld));
  }

  struct RunTask {
    std::size_t dataset;
    std::size_t method;
    int run;
  };
  std::vector<RunTask> tasks;
  for (std::size_t d = 0; d < datasets.size(); ++d)
    for (std::size_t m = 0; m < plan.methods.size(); ++m)
      for (int r = 0; r < plan.runs_per_cell; ++r) tasks.push_back({d, m, r});

  struct RunOutput {
    double fitness = 1.0;
    std::vector<double> best_per_generation;
    std::string error;
  };
  std::vector<RunOutput> outputs(tasks.size());

  auto run_one = [&](const RunTask& t, RunOutput& out) {
    const LoadedDataset& ds = datasets[t.dataset];
    if (!ds.data) {
      out.error = ds.error;
      return;
    }
    try {
      GaConfig config;
      plan.ga_overrides.apply(config);
      config.crossover_kind = plan.methods[t.method];
      config.seed = cell_seed(plan.base_seed, ds.id, plan.methods[t.method], t.run);
      RunResult run = evolve(ds.data->repo, ds.data->task, config);
      out.fitness = run.final_best.fitness;
      out.best_per_generation = std::move(run.best_per_generation);
    } catch (const std::exception& e) {
      out.error = e.what();
    }
  };

  int n_threads = threads > 0 ? threads
                              : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min<int>(n_threads, static_cast<int>(tasks.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < tasks.size(); ++i) run_one(tasks[i], outputs[i]);
  } else {
    std::atomic<std::size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = cursor.fetch_add(1);
          if (i >= tasks.size()) return;
          run_one(tasks[i], outputs[i]);
        }
      });
    for (auto& th : pool) th.join();
  }

  // Aggregate in (dataset, method) order; runs are already ordered by index.
  std::size_t cursor_out = 0;
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      CellResult cell;
      cell.dataset = datasets[d].id;
      cell.method = plan.methods[m];
      std::string first_error;
      std::size_t generations = 0;
      for (int r = 0; r < plan.runs_per_cell; ++r, ++cursor_out) {
        const RunOutput& out = outputs[cursor_out];
        if (!out.error.empty() && first_error.empty()) first_error = out.error;
        cell.fitness_samples.push_back(out.fitness);
        generations = std::max(generations, out.best_per_generation.size());
      }
      if (!first_error.empty()) {
        cell.error = first_error;
      } else {
        cell.mean = mean_of(cell.fitness_samples);
        cell.stddev = stddev_of(cell.fitness_samples, cell.mean);
        cell.mean_convergence.assign(generations, 0.0);
        const std::size_t base = cursor_out - static_cast<std::size_t>(plan.runs_per_cell);
        for (std::size_t g = 0; g < generations; ++g) {
          double s = 0.0;
          for (int r = 0; r < plan.runs_per_cell; ++r)
            s += outputs[base + static_cast<std::size_t>(r)].best_per_generation[g];
          cell.mean_convergence[g] = s / static_cast<double>(plan.runs_per_cell);
        }
      }
      result.cells.push_back(std::move(cell));
    }
  }

  // Pairwise verdicts per dataset over complete cells.
  auto cell_at = [&](std::size_t d, std::size_t m) -> const CellResult& {
    return result.cells[d * plan.methods.size() + m];
  };
  for (std::size_t d = 0; d < datasets.size(); ++d) {
    for (std::size_t a = 0; a < plan.methods.size(); ++a) {
      for (std::size_t b = a + 1; b < plan.methods.size(); ++b) {
        const CellResult& ca = cell_at(d, a);
        const CellResult& cb = cell_at(d, b);
        if (ca.error || cb.error) continue;
        PairwiseVerdict v;
        v.dataset = datasets[d].id;
        v.method_a = ca.method;
        v.method_b = cb.method;
        const WilcoxonResult w = wilcoxon_signed_rank(ca.fitness_samples, cb.fitness_samples);
        v.statistic = w.statistic;
        v.p_value = w.p_value;
        v.exact = w.exact;
        v.significant = w.p_value < 0.05;
        if (v.significant) v.winner = ca.mean < cb.mean ? ca.method : cb.method;
        result.verdicts.push_back(std::move(v));
      }
    }
    // Top performers: methods with no significant loss on this dataset.
    std::vector<CrossoverKind> top;
    for (std::size_t m = 0; m < plan.methods.size(); ++m) {
      const CellResult& cm = cell_at(d, m);
      if (cm.error) continue;
      bool beaten = false;
      for (const auto& v : result.verdicts) {
        if (v.dataset != datasets[d].id || !v.significant || !v.winner) continue;
        if ((v.method_a == cm.method || v.method_b == cm.method) && *v.winner != cm.method)
          beaten = true;
      }
      if (!beaten) top.push_back(cm.method);
    }
    result.top_performers.push_back({datasets[d].id, std::move(top)});
  }

  return result;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

namespace {

std::string format_2dec(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

bool is_top(const PlanResult& result, const std::string& dataset, CrossoverKind method) {
  for (const auto& [id, methods] : result.top_performers)
    if (id == dataset)
      return std::find(methods.begin(), methods.end(), method) != methods.end();
  return false;
}

bool plan_used_approximation(const PlanResult& result) {
  for (const auto& v : result.verdicts)
    if (!v.exact) return true;
  return false;
}

}  // namespace

std::string render_report(const PlanResult& result, ReportFormat format) {
  const auto& methods = result.plan.methods;
  std::ostringstream os;

  if (format == ReportFormat::csv) {
    os << "dataset,method,runs,mean,std,mean_full,std_full,top_performer,error\n";
    for (const auto& cell : result.cells) {
      os << cell.dataset << ',' << crossover_name(cell.method) << ','
         << result.plan.runs_per_cell << ',';
      if (cell.error) {
        os << ",,,,," << '"' << *cell.error << '"' << "\n";
      } else {
        os << format_2dec(cell.mean) << ',' << format_2dec(cell.stddev) << ','
           << format_real(cell.mean) << ',' << format_real(cell.stddev) << ','
           << (is_top(result, cell.dataset, cell.method) ? "yes" : "no") << ",\n";
      }
    }
    return os.str();
  }

  os << "# Benchmark results\n\n";
  os << "Mean fitness and sample standard deviation per " << result.plan.runs_per_cell
     << " runs (lower is better). Top performers per dataset in bold: no other method is"
        " significantly better (two-sided Wilcoxon signed-rank, alpha = 0.05).\n\n";

  os << "| Dataset |";
  for (CrossoverKind m : methods) os << ' ' << crossover_name(m) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) os << "---|";
  os << "\n";
  std::size_t cursor = 0;
  for (std::size_t d = 0; d < result.plan.datasets.size(); ++d) {
    os << "| " << result.cells[cursor].dataset << " |";
    for (std::size_t m = 0; m < methods.size(); ++m, ++cursor) {
      const CellResult& cell = result.cells[cursor];
      if (cell.error) {
        os << " failed |";
        continue;
      }
      const bool top = is_top(result, cell.dataset, cell.method);
      os << ' ';
      if (top) os << "**";
      os << format_2dec(cell.mean) << "±" << format_2dec(cell.stddev);
      if (top) os << "**";
      os << " |";
    }
    os << "\n";
  }

  // Small fitness scales vanish at two decimals; repeat the means in full.
  os << "\n## Full-precision means\n\n";
  os << "| Dataset |";
  for (CrossoverKind m : methods) os << ' ' << crossover_name(m) << " |";
  os << "\n|---|";
  for (std::size_t i = 0; i < methods.size(); ++i) os << "---|";
  os << "\n";
  cursor = 0;
  for (std::size_t d = 0; d < result.plan.datasets.size(); ++d) {
    os << "| " << result.cells[cursor].dataset << " |";
    for (std::size_t m = 0; m < methods.size(); ++m, ++cursor) {
      const CellResult& cell = result.cells[cursor];
      if (cell.error) {
        os << " failed |";
        continue;
      }
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6g±%.2g", cell.mean, cell.stddev);
      os << ' ' << buf << " |";
    }
    os << "\n";
  }

  os << "\n## Pairwise Wilcoxon signed-rank tests\n\n";
  os << "| Dataset | Pair | W | p | Significant | Better |\n|---|---|---|---|---|---|\n";
  for (const auto& v : result.verdicts) {
    char pbuf[32];
    std::snprintf(pbuf, sizeof(pbuf), "%.4g", v.p_value);
    os << "| " << v.dataset << " | " << crossover_name(v.method_a) << " vs "
       << crossover_name(v.method_b) << " | " << format_2dec(v.statistic) << " | " << pbuf
       << " | " << (v.significant ? "yes" : "no") << " | "
       << (v.winner ? crossover_name(*v.winner) : "-") << " |\n";
  }

  os << "\nNotes: zero differences are dropped from each paired test (n shrinks accordingly).";
  if (plan_used_approximation(result))
    os << " Tests with more than " << kWilcoxonExactLimit
       << " non-zero pairs use the normal approximation with continuity and tie correction.";
  os << "\n";

  for (const auto& cell : result.cells)
    if (cell.error)
      os << "\nIncomplete cell " << cell.dataset << "/" << crossover_name(cell.method) << ": "
         << *cell.error << "\n";
  return os.str();
}

void emit_report(const PlanResult& result, ReportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << render_report(result, format);
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string render_convergence_csv(const PlanResult& result) {
  std::ostringstream os;
  os << "dataset,method,generation,mean_best_fitness\n";
  for (const auto& cell : result.cells) {
    if (cell.error) continue;
    for (std::size_t g = 0; g < cell.mean_convergence.size(); ++g)
      os << cell.dataset << ',' << crossover_name(cell.method) << ',' << g << ','
         << format_real(cell.mean_convergence[g]) << "\n";
  }
  return os.str();
}

void emit_convergence_csv(const PlanResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << render_convergence_csv(result);
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace dwsc
