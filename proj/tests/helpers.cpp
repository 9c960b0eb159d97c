#include "helpers.hpp"

#include <functional>
#include <map>

namespace testutil {

double enumerate_total_time(const dwsc::Repository& repo, const dwsc::CompositionDag& dag) {
  const dwsc::WeightVector& w = repo.weights();
  std::map<int, std::vector<int>> adj;
  for (const auto& e : dag.edges) adj[e.from].push_back(e.to);

  double best = 0.0;
  bool reached_end = false;
  std::function<void(int, double)> walk = [&](int node, double acc) {
    if (node == dwsc::kEndNode) {
      best = std::max(best, acc);
      reached_end = true;
      return;
    }
    auto it = adj.find(node);
    if (it == adj.end()) return;
    for (int next : it->second) {
      double step = acc;
      if (node != dwsc::kStartNode && next != dwsc::kEndNode)
        step = step + w.w_t2 * repo.link(repo.service(node).location,
                                         repo.service(next).location).prop_delay_service;
      if (next != dwsc::kEndNode) step = step + w.w_t1 * dwsc::service_time(repo, next);
      walk(next, step);
    }
  };
  walk(dwsc::kStartNode, 0.0);
  return reached_end ? best : 0.0;
}

bool closure_feasible(const dwsc::Repository& repo, const dwsc::Task& task,
                      const std::vector<int>& genes) {
  const dwsc::Taxonomy& tax = repo.taxonomy();
  std::set<int> produced(task.provided.begin(), task.provided.end());
  auto covered = [&](int needed) {
    for (int p : produced)
      if (tax.subsumes(p, needed)) return true;
    return false;
  };

  std::set<int> admitted;
  bool progress = true;
  while (progress) {
    progress = false;
    for (int g : genes) {
      if (admitted.count(g)) continue;
      bool ok = true;
      for (int c : repo.service(g).inputs)
        if (!covered(c)) ok = false;
      if (!ok) continue;
      admitted.insert(g);
      for (int o : repo.service(g).outputs) produced.insert(o);
      progress = true;
    }
  }
  for (int wanted : task.wanted)
    if (!covered(wanted)) return false;
  return true;
}

bool oracle_dag_ok(const dwsc::Repository& repo, const dwsc::Task& task,
                   const dwsc::CompositionDag& dag) {
  const dwsc::Taxonomy& tax = repo.taxonomy();
  std::set<int> nodes(dag.nodes.begin(), dag.nodes.end());
  if (nodes.size() != dag.nodes.size()) return false;

  std::map<int, std::set<int>> incoming;  // node -> covered input concepts
  std::map<int, std::vector<int>> adj, radj;
  for (const auto& e : dag.edges) {
    if (e.from == dwsc::kEndNode || e.to == dwsc::kStartNode) return false;
    if (e.from != dwsc::kStartNode && !nodes.count(e.from)) return false;
    if (e.to != dwsc::kEndNode && !nodes.count(e.to)) return false;
    for (int c : e.concepts) {
      // Consumption side.
      if (e.to == dwsc::kEndNode) {
        if (std::find(task.wanted.begin(), task.wanted.end(), c) == task.wanted.end())
          return false;
      } else {
        const auto& in = repo.service(e.to).inputs;
        if (std::find(in.begin(), in.end(), c) == in.end()) return false;
      }
      // Production side.
      bool produced = false;
      if (e.from == dwsc::kStartNode) {
        for (int p : task.provided) produced = produced || tax.subsumes(p, c);
      } else {
        for (int o : repo.service(e.from).outputs) produced = produced || tax.subsumes(o, c);
      }
      if (!produced) return false;
      incoming[e.to].insert(c);
    }
    adj[e.from].push_back(e.to);
    radj[e.to].push_back(e.from);
  }

  for (int n : dag.nodes)
    for (int c : repo.service(n).inputs)
      if (!incoming[n].count(c)) return false;
  for (int w : task.wanted)
    if (!incoming[dwsc::kEndNode].count(w)) return false;

  // Cycle check by DFS colouring over service nodes.
  std::map<int, int> colour;
  bool cyclic = false;
  std::function<void(int)> dfs = [&](int n) {
    colour[n] = 1;
    for (int next : adj[n]) {
      if (next == dwsc::kEndNode) continue;
      if (colour[next] == 1) cyclic = true;
      else if (colour[next] == 0) dfs(next);
    }
    colour[n] = 2;
  };
  for (int n : dag.nodes)
    if (colour[n] == 0) dfs(n);
  if (cyclic) return false;

  // Path membership: forward reach from START, backward from END.
  auto bfs = [&](int origin, std::map<int, std::vector<int>>& edges) {
    std::set<int> seen{origin};
    std::vector<int> stack{origin};
    while (!stack.empty()) {
      int cur = stack.back();
      stack.pop_back();
      for (int next : edges[cur])
        if (!seen.count(next)) {
          seen.insert(next);
          stack.push_back(next);
        }
    }
    return seen;
  };
  auto fwd = bfs(dwsc::kStartNode, adj);
  auto bwd = bfs(dwsc::kEndNode, radj);
  for (int n : dag.nodes)
    if (!fwd.count(n) || !bwd.count(n)) return false;
  return true;
}

int lcs_length_bruteforce(const std::vector<int>& a, const std::vector<int>& b) {
  const int n = static_cast<int>(a.size());
  int best = 0;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    std::vector<int> sub;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) sub.push_back(a[static_cast<std::size_t>(i)]);
    if (static_cast<int>(sub.size()) <= best) continue;
    if (is_subsequence(sub, b)) best = static_cast<int>(sub.size());
  }
  return best;
}

}  // namespace testutil
