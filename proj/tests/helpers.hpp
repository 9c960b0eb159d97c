#pragma once

// Shared fixtures and independent oracles for the test suites. Oracles are
// deliberately written against the public contracts only, not against the
// implementation's internals.

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "dwsc/data.hpp"
#include "dwsc/decode.hpp"
#include "dwsc/model.hpp"
#include "dwsc/qos.hpp"
#include "dwsc/rng.hpp"

namespace testutil {

// Three services on two locations with hand-written link attributes.
//   s1 @L0: c1 -> c4, one binding on d0
//   s2 @L1: c4 -> c2, bindings on d1 and d0
//   s3 @L0: c1 -> c5, one binding on d1 (unused by the planted task)
// Task: provided {c1}, wanted {c2}.
inline dwsc::RepositoryData chain_repo_data() {
  dwsc::RepositoryData d;
  d.taxonomy = {
      {"c0", std::nullopt}, {"c1", "c0"}, {"c2", "c0"},
      {"c3", "c1"},         {"c4", "c1"}, {"c5", "c2"},
  };
  d.locations = {
      {"L0", 0.0, 0.0, 0.2},
      {"L1", 3.0, 4.0, 0.4},
  };
  d.data_items = {
      {"d0", 0.25, 0.5, "L0"},
      {"d1", 0.5, 1.0, "L1"},
  };
  d.services = {
      {"s1", {"c1"}, {"c4"}, "L0", {{"d0", 0.3, 0.1, 0.2, 0.15}}},
      {"s2", {"c4"}, {"c2"}, "L1", {{"d1", 0.25, 0.2, 0.1, 0.05}, {"d0", 0.5, 0.4, 0.3, 0.2}}},
      {"s3", {"c1"}, {"c5"}, "L0", {{"d1", 0.6, 0.3, 0.4, 0.1}}},
  };
  d.link_attrs = {
      {"L0", "L0", 0.05, 0.05, 0.3},
      {"L0", "L1", 0.5, 0.6, 0.7},
      {"L1", "L0", 0.4, 0.3, 0.2},
      {"L1", "L1", 0.05, 0.08, 0.1},
  };
  return d;
}

inline dwsc::TaskRecord chain_task_record() { return {{"c1"}, {"c2"}}; }

struct ChainFixture {
  dwsc::Repository repo;
  dwsc::Task task;

  ChainFixture()
      : repo(dwsc::Repository::build(chain_repo_data())),
        task(dwsc::Task::resolve(repo, chain_task_record())) {}
};

inline dwsc::Dataset small_dataset(std::uint64_t seed, int services = 40, int concepts = 36,
                                   int clusters = 4, int chain = 5) {
  dwsc::GenSpec spec;
  spec.n_services = services;
  spec.n_concepts = concepts;
  spec.n_locations = 2 * clusters;
  spec.n_clusters = clusters;
  spec.chain_length = chain;
  spec.seed = seed;
  return dwsc::generate(spec);
}

// Uniform random feasible chromosome: a reduced random permutation of the
// whole repository.
inline dwsc::Chromosome random_feasible_chromosome(const dwsc::Dataset& ds, dwsc::Rng& rng) {
  dwsc::Chromosome all;
  all.genes.resize(static_cast<std::size_t>(ds.repo.n_services()));
  for (int s = 0; s < ds.repo.n_services(); ++s) all.genes[static_cast<std::size_t>(s)] = s;
  rng.shuffle(all.genes);
  dwsc::DecodeResult res = dwsc::backward_decode(ds.repo, ds.task, all);
  return dwsc::reduce(all, res);
}

// Random permutation of a random superset of the given gene set.
inline dwsc::Chromosome random_superset(const dwsc::Dataset& ds, const dwsc::Chromosome& base,
                                        dwsc::Rng& rng) {
  std::set<int> genes(base.genes.begin(), base.genes.end());
  for (int s = 0; s < ds.repo.n_services(); ++s)
    if (rng.chance(0.3)) genes.insert(s);
  dwsc::Chromosome out;
  out.genes.assign(genes.begin(), genes.end());
  rng.shuffle(out.genes);
  return out;
}

// Path-enumeration oracle for the critical path: walks every START->END path
// depth-first and accumulates node and edge weights in path order.
double enumerate_total_time(const dwsc::Repository& repo, const dwsc::CompositionDag& dag);

// Set-based feasibility oracle: available concepts grow from the task inputs
// through any executable service of the gene set until a fixpoint.
bool closure_feasible(const dwsc::Repository& repo, const dwsc::Task& task,
                      const std::vector<int>& genes);

// Independent coverage check of a composition graph (no reuse of validate()).
bool oracle_dag_ok(const dwsc::Repository& repo, const dwsc::Task& task,
                   const dwsc::CompositionDag& dag);

// True iff `seq` appears in `v` in order (not necessarily contiguous).
inline bool is_subsequence(const std::vector<int>& seq, const std::vector<int>& v) {
  std::size_t i = 0;
  for (int x : v)
    if (i < seq.size() && seq[i] == x) ++i;
  return i == seq.size();
}

// Exponential LCS oracle: tries every subsequence of a, longest first.
int lcs_length_bruteforce(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace testutil
