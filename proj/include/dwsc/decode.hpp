#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwsc/model.hpp"

namespace dwsc {

// Ordered, duplicate-free sequence of service indices: the GA genotype.
struct Chromosome {
  std::vector<int> genes;

  bool operator==(const Chromosome&) const = default;
};

// Virtual endpoint nodes of a composition DAG.
inline constexpr int kStartNode = -1;
inline constexpr int kEndNode = -2;

struct DagEdge {
  int from = 0;               // service index, or kStartNode
  int to = 0;                 // service index, or kEndNode
  std::vector<int> concepts;  // input concepts of `to` satisfied through this edge

  bool operator==(const DagEdge&) const = default;
};

// Start/end-bounded DAG of services with concept-annotated edges: the decoded
// phenotype. `nodes` excludes the virtual endpoints.
struct CompositionDag {
  std::vector<int> nodes;
  std::vector<DagEdge> edges;

  bool operator==(const CompositionDag&) const = default;
};

struct DecodeResult {
  CompositionDag dag;
  std::vector<int> used_order;  // topological order of dag nodes

  bool operator==(const DecodeResult&) const = default;
};

struct DecodeOutcome {
  std::optional<DecodeResult> result;
  std::vector<int> uncovered;  // concept indices that cannot be sourced
};

// Backward decoding: turns a service sequence into a feasible composition DAG
// and drops every service that contributes nothing. Throws
// InfeasibleSequenceError when the sequence plus the task inputs cannot cover
// all required concepts.
DecodeResult backward_decode(const Repository& repo, const Task& task, const Chromosome& chrom);

// Non-throwing form; infeasibility is reported through `uncovered`.
DecodeOutcome try_backward_decode(const Repository& repo, const Task& task,
                                  const Chromosome& chrom);

struct Violation {
  std::string where;
  std::string detail;
};

struct ValidationReport {
  bool ok = false;
  std::vector<Violation> violations;
};

// Checks every composition invariant independently of how the DAG was built:
// acyclicity, edge concept production/consumption, full input coverage, and
// start-to-end path membership of every node.
ValidationReport validate(const Repository& repo, const Task& task, const CompositionDag& dag);

// Drops unused services: the reduced chromosome is exactly the decode's used
// order.
Chromosome reduce(const Chromosome& chrom, const DecodeResult& decoded);

// Plain-text DAG description (node list plus concept-annotated edge list).
std::string export_text(const Repository& repo, const CompositionDag& dag);

}  // namespace dwsc
