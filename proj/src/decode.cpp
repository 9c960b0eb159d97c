#include "dwsc/decode.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

#include "dwsc/errors.hpp"

namespace dwsc {

namespace {

// Key for merging parallel concept claims into one edge per (from, to) pair.
std::int64_t edge_key(int from, int to) {
  return (static_cast<std::int64_t>(from) << 32) ^ (static_cast<std::int64_t>(to) & 0xffffffffll);
}

}  // namespace

// Decoding runs in two phases.
//
// Phase 1 walks the sequence repeatedly and admits every service whose inputs
// are satisfiable by the task inputs plus the outputs of services admitted so
// far, until a full pass admits nothing. This fixes an execution order and
// makes feasibility a function of the gene set alone: any sequence whose gene
// set contains a feasible one stays feasible, which is what lets crossover
// offspring inherit feasibility from their parents.
//
// Phase 2 resolves demands backwards. Starting from the end node (which
// demands the task outputs), executable services are visited in reverse
// execution order; a service is kept iff it can satisfy a pending demand at
// its turn. A kept service claims every demanded concept it can produce,
// sources its own inputs from the task inputs where possible, and queues the
// rest as demands for services earlier in the execution order. Every edge
// therefore points forward in execution order, so the result is acyclic, and
// re-decoding a reduced sequence replays the same visits and keeps the same
// services.
DecodeOutcome try_backward_decode(const Repository& repo, const Task& task,
                                  const Chromosome& chrom) {
  const int n_services = repo.n_services();
  const std::size_t n_concepts = static_cast<std::size_t>(repo.n_concepts());

  if (chrom.genes.empty()) throw ValidationError("chromosome: must be non-empty");
  std::vector<char> present(static_cast<std::size_t>(n_services), 0);
  for (int g : chrom.genes) {
    if (g < 0 || g >= n_services)
      throw LookupError("chromosome: unknown service index " + std::to_string(g));
    if (present[static_cast<std::size_t>(g)])
      throw ValidationError("chromosome: duplicate gene '" + repo.service_id(g) + "'");
    present[static_cast<std::size_t>(g)] = 1;
  }

  const Bitset provided_cover = task.provided_coverage(repo);

  // Phase 1: forward executability closure over the sequence.
  Bitset available = provided_cover;
  std::vector<int> exec_order;
  exec_order.reserve(chrom.genes.size());
  std::vector<char> executable(static_cast<std::size_t>(n_services), 0);
  bool progress = true;
  while (progress) {
    progress = false;
    for (int g : chrom.genes) {
      if (executable[static_cast<std::size_t>(g)]) continue;
      if (!repo.service_input_mask(g).is_subset_of(available)) continue;
      executable[static_cast<std::size_t>(g)] = 1;
      exec_order.push_back(g);
      available |= repo.service_coverage(g);
      progress = true;
    }
  }

  DecodeOutcome outcome;
  for (int w : task.wanted)
    if (!available.test(static_cast<std::size_t>(w))) outcome.uncovered.push_back(w);
  if (!outcome.uncovered.empty()) return outcome;

  // Phase 2: backward demand resolution in reverse execution order.
  Bitset demand_mask(n_concepts);
  std::vector<std::vector<int>> demanders(n_concepts);  // node ids awaiting a concept

  CompositionDag dag;
  std::vector<DagEdge>& edges = dag.edges;
  std::unordered_map<std::int64_t, std::size_t> edge_slot;

  auto add_edge_concept = [&](int from, int to, int concept_idx) {
    auto [it, inserted] = edge_slot.try_emplace(edge_key(from, to), edges.size());
    if (inserted) edges.push_back({from, to, {}});
    edges[it->second].concepts.push_back(concept_idx);
  };

  // The end node demands the task outputs; the task inputs satisfy what they
  // can straight away.
  for (int w : task.wanted) {
    if (provided_cover.test(static_cast<std::size_t>(w))) {
      add_edge_concept(kStartNode, kEndNode, w);
    } else {
      demanders[static_cast<std::size_t>(w)].push_back(kEndNode);
      demand_mask.set(static_cast<std::size_t>(w));
    }
  }

  std::vector<int> kept_reversed;
  for (auto it = exec_order.rbegin(); it != exec_order.rend(); ++it) {
    const int g = *it;
    if (!repo.service_coverage(g).intersects(demand_mask)) continue;

    kept_reversed.push_back(g);
    Bitset::for_each_and(repo.service_coverage(g), demand_mask, [&](std::size_t c) {
      for (int node : demanders[c]) add_edge_concept(g, node, static_cast<int>(c));
      demanders[c].clear();
      demand_mask.reset(c);
    });

    for (int c : repo.service(g).inputs) {
      if (provided_cover.test(static_cast<std::size_t>(c))) {
        add_edge_concept(kStartNode, g, c);
      } else {
        demanders[static_cast<std::size_t>(c)].push_back(g);
        demand_mask.set(static_cast<std::size_t>(c));
      }
    }
  }

  // Feasibility was established in phase 1: every queued demand belongs to an
  // executable service (or the end node) and so is met by a service earlier
  // in execution order before the loop ends.
  if (demand_mask.any())
    throw Error("internal: unresolved demands after feasible decode");

  dag.nodes.assign(kept_reversed.rbegin(), kept_reversed.rend());
  DecodeResult result;
  result.used_order = dag.nodes;
  result.dag = std::move(dag);
  outcome.result = std::move(result);
  return outcome;
}

DecodeResult backward_decode(const Repository& repo, const Task& task, const Chromosome& chrom) {
  DecodeOutcome outcome = try_backward_decode(repo, task, chrom);
  if (!outcome.result) {
    std::vector<std::string> ids;
    ids.reserve(outcome.uncovered.size());
    for (int c : outcome.uncovered) ids.push_back(repo.taxonomy().id_of(c));
    std::ostringstream msg;
    msg << "sequence cannot source required concepts:";
    for (const auto& id : ids) msg << " '" << id << "'";
    throw InfeasibleSequenceError(msg.str(), std::move(ids));
  }
  return std::move(*outcome.result);
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

namespace {

std::string node_name(const Repository& repo, int node) {
  if (node == kStartNode) return "START";
  if (node == kEndNode) return "END";
  return repo.service_id(node);
}

}  // namespace

ValidationReport validate(const Repository& repo, const Task& task, const CompositionDag& dag) {
  ValidationReport report;
  auto flag = [&](const std::string& where, const std::string& detail) {
    report.violations.push_back({where, detail});
  };

  // Node table; slot 0 = START, slot 1 = END.
  std::unordered_map<int, std::size_t> slot_of;
  slot_of.emplace(kStartNode, 0);
  slot_of.emplace(kEndNode, 1);
  for (int node : dag.nodes) {
    if (node < 0 || node >= repo.n_services()) {
      flag("nodes", "unknown service index " + std::to_string(node));
      continue;
    }
    if (!slot_of.emplace(node, slot_of.size()).second)
      flag(node_name(repo, node), "service listed twice");
  }
  const std::size_t n_slots = slot_of.size();

  std::vector<std::vector<std::size_t>> out_adj(n_slots);
  std::vector<std::size_t> in_degree(n_slots, 0);
  std::vector<Bitset> incoming(n_slots, Bitset(static_cast<std::size_t>(repo.n_concepts())));

  const Bitset provided_cover = task.provided_coverage(repo);
  Bitset wanted_mask(static_cast<std::size_t>(repo.n_concepts()));
  for (int w : task.wanted) wanted_mask.set(static_cast<std::size_t>(w));

  for (const auto& edge : dag.edges) {
    auto from_it = slot_of.find(edge.from);
    auto to_it = slot_of.find(edge.to);
    const std::string where =
        "edge " + node_name(repo, edge.from) + "->" + node_name(repo, edge.to);
    if (from_it == slot_of.end() || to_it == slot_of.end()) {
      flag(where, "endpoint is not a node of the graph");
      continue;
    }
    if (edge.from == kEndNode || edge.to == kStartNode) {
      flag(where, "edge leaves END or enters START");
      continue;
    }
    if (edge.concepts.empty()) flag(where, "edge carries no concepts");

    out_adj[from_it->second].push_back(to_it->second);
    ++in_degree[to_it->second];

    for (int c : edge.concepts) {
      if (c < 0 || c >= repo.n_concepts()) {
        flag(where, "unknown concept index " + std::to_string(c));
        continue;
      }
      const std::string cid = repo.taxonomy().id_of(c);
      // Consumption: the concept must be an input of `to`.
      if (edge.to == kEndNode) {
        if (!wanted_mask.test(static_cast<std::size_t>(c)))
          flag(where, "concept '" + cid + "' is not a task output");
      } else {
        const auto& inputs = repo.service(edge.to).inputs;
        if (!std::binary_search(inputs.begin(), inputs.end(), c))
          flag(where, "concept '" + cid + "' is not an input of the target");
      }
      // Production: `from` (or the task inputs) must subsume the concept.
      if (edge.from == kStartNode) {
        if (!provided_cover.test(static_cast<std::size_t>(c)))
          flag(where, "concept '" + cid + "' is not covered by the task inputs");
      } else {
        if (!repo.service_coverage(edge.from).test(static_cast<std::size_t>(c)))
          flag(where, "concept '" + cid + "' is not produced by the source");
      }
      incoming[to_it->second].set(static_cast<std::size_t>(c));
    }
  }

  // Full input coverage of every non-START node.
  for (int node : dag.nodes) {
    auto it = slot_of.find(node);
    if (it == slot_of.end() || node < 0) continue;
    for (int c : repo.service(node).inputs)
      if (!incoming[it->second].test(static_cast<std::size_t>(c)))
        flag(node_name(repo, node),
             "input concept '" + repo.taxonomy().id_of(c) + "' is not covered");
  }
  for (int w : task.wanted)
    if (!incoming[1].test(static_cast<std::size_t>(w)))
      flag("END", "task output '" + repo.taxonomy().id_of(w) + "' is not covered");

  // Acyclicity via Kahn's algorithm.
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < n_slots; ++s)
    if (in_degree[s] == 0) queue.push_back(s);
  std::size_t processed = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    ++processed;
    for (std::size_t next : out_adj[queue[q]])
      if (--in_degree[next] == 0) queue.push_back(next);
  }
  if (processed != n_slots) flag("graph", "composition contains a cycle");

  // Every node must lie on some START->END path.
  auto reach = [&](std::size_t origin, bool forward) {
    std::vector<char> seen(n_slots, 0);
    std::vector<std::vector<std::size_t>> rev_adj;
    if (!forward) {
      rev_adj.assign(n_slots, {});
      for (std::size_t s = 0; s < n_slots; ++s)
        for (std::size_t t : out_adj[s]) rev_adj[t].push_back(s);
    }
    const auto& adj = forward ? out_adj : rev_adj;
    std::vector<std::size_t> stack{origin};
    seen[origin] = 1;
    while (!stack.empty()) {
      std::size_t cur = stack.back();
      stack.pop_back();
      for (std::size_t next : adj[cur])
        if (!seen[next]) {
          seen[next] = 1;
          stack.push_back(next);
        }
    }
    return seen;
  };
  const auto from_start = reach(0, true);
  const auto to_end = reach(1, false);
  for (int node : dag.nodes) {
    auto it = slot_of.find(node);
    if (it == slot_of.end() || node < 0) continue;
    if (!from_start[it->second] || !to_end[it->second])
      flag(node_name(repo, node), "node lies on no START->END path");
  }

  report.ok = report.violations.empty();
  return report;
}

Chromosome reduce(const Chromosome& chrom, const DecodeResult& decoded) {
  (void)chrom;
  return Chromosome{decoded.used_order};
}

std::string export_text(const Repository& repo, const CompositionDag& dag) {
  std::ostringstream os;
  os << "# nodes\n";
  os << "START\n";
  for (int node : dag.nodes) os << repo.service_id(node) << "\n";
  os << "END\n";
  os << "# edges\n";
  for (const auto& edge : dag.edges) {
    os << node_name(repo, edge.from) << " -> " << node_name(repo, edge.to) << " [";
    for (std::size_t i = 0; i < edge.concepts.size(); ++i) {
      if (i) os << ", ";
      os << repo.taxonomy().id_of(edge.concepts[i]);
    }
    os << "]\n";
  }
  return os.str();
}

}  // namespace dwsc
