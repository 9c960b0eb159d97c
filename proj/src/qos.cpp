#include "dwsc/qos.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "dwsc/errors.hpp"

namespace dwsc {

double service_time(const Repository& repo, int service) {
  const CompiledService& svc = repo.service(service);
  double t = 0.0;
  for (const auto& b : svc.bindings) {
    const CompiledDataItem& d = repo.data_item(b.data);
    const double tpd = repo.link(d.location, svc.location).prop_delay_data;
    const double tsal = repo.location(d.location).server_access_latency;
    t += tpd + tsal + b.process_time + b.transfer_time;
  }
  return t;
}

double service_time(const Repository& repo, const std::string& service_id) {
  return service_time(repo, repo.service_index(service_id));
}

double service_cost(const Repository& repo, int service) {
  const CompiledService& svc = repo.service(service);
  double c = 0.0;
  for (const auto& b : svc.bindings) {
    const CompiledDataItem& d = repo.data_item(b.data);
    c += b.data_comm_cost + d.provision_cost + b.service_cost;
  }
  return c;
}

double service_cost(const Repository& repo, const std::string& service_id) {
  return service_cost(repo, repo.service_index(service_id));
}

double total_cost(const Repository& repo, const CompositionDag& dag) {
  const WeightVector& w = repo.weights();
  double node_cost = 0.0;
  for (int node : dag.nodes) node_cost += service_cost(repo, node);
  double edge_cost = 0.0;
  for (const auto& edge : dag.edges) {
    if (edge.from == kStartNode || edge.to == kEndNode) continue;
    edge_cost += repo.link(repo.service(edge.from).location,
                           repo.service(edge.to).location).edge_comm_cost;
  }
  return w.w_c1 * node_cost + w.w_c2 * edge_cost;
}

double total_time(const Repository& repo, const CompositionDag& dag) {
  const WeightVector& w = repo.weights();

  // Slot 0 = START, slot 1 = END.
  std::unordered_map<int, std::size_t> slot_of;
  slot_of.emplace(kStartNode, 0);
  slot_of.emplace(kEndNode, 1);
  for (int node : dag.nodes) slot_of.emplace(node, slot_of.size());
  const std::size_t n_slots = slot_of.size();

  struct Arc {
    std::size_t to;
    double weight;
  };
  std::vector<std::vector<Arc>> adj(n_slots);
  std::vector<std::size_t> in_degree(n_slots, 0);
  for (const auto& edge : dag.edges) {
    const std::size_t from = slot_of.at(edge.from);
    const std::size_t to = slot_of.at(edge.to);
    double weight = 0.0;
    if (edge.from != kStartNode && edge.to != kEndNode)
      weight = w.w_t2 * repo.link(repo.service(edge.from).location,
                                  repo.service(edge.to).location).prop_delay_service;
    adj[from].push_back({to, weight});
    ++in_degree[to];
  }

  std::vector<double> node_time(n_slots, 0.0);
  for (int node : dag.nodes) node_time[slot_of.at(node)] = w.w_t1 * service_time(repo, node);

  // score[v] = node_time[v] + max over incoming arcs of (score[u] + arc).
  const double unreached = -std::numeric_limits<double>::infinity();
  std::vector<double> best_in(n_slots, unreached);
  std::vector<double> score(n_slots, 0.0);
  std::vector<std::size_t> queue;
  for (std::size_t s = 0; s < n_slots; ++s)
    if (in_degree[s] == 0) {
      score[s] = node_time[s];
      queue.push_back(s);
    }

  std::size_t processed = 0;
  for (std::size_t q = 0; q < queue.size(); ++q) {
    const std::size_t cur = queue[q];
    ++processed;
    for (const Arc& arc : adj[cur]) {
      best_in[arc.to] = std::max(best_in[arc.to], score[cur] + arc.weight);
      if (--in_degree[arc.to] == 0) {
        score[arc.to] = best_in[arc.to] + node_time[arc.to];
        queue.push_back(arc.to);
      }
    }
  }
  if (processed != n_slots) throw ValidationError("total_time: composition contains a cycle");

  return best_in[1] == unreached ? 0.0 : score[1];
}

NormBounds norm_bounds(const Repository& repo, const Task& task) {
  (void)task;
  const WeightVector& w = repo.weights();
  const int n = repo.n_services();

  double time_sum = 0.0;
  double cost_sum = 0.0;
  for (int s = 0; s < n; ++s) {
    time_sum += service_time(repo, s);
    cost_sum += service_cost(repo, s);
  }
  double max_tps = 0.0;
  double max_ccs = 0.0;
  for (int a = 0; a < repo.n_locations(); ++a) {
    for (int b = 0; b < repo.n_locations(); ++b) {
      max_tps = std::max(max_tps, repo.link(a, b).prop_delay_service);
      max_ccs = std::max(max_ccs, repo.link(a, b).edge_comm_cost);
    }
  }

  NormBounds bounds;
  bounds.time_ub = w.w_t1 * time_sum + w.w_t2 * static_cast<double>(n) * max_tps;
  bounds.cost_ub = w.w_c1 * cost_sum +
                   w.w_c2 * static_cast<double>(n) * static_cast<double>(n) * max_ccs;
  // Degenerate repositories can zero out a bound; floor it so the division
  // stays defined.
  const double floor = std::numeric_limits<double>::min();
  bounds.time_ub = std::max(bounds.time_ub, floor);
  bounds.cost_ub = std::max(bounds.cost_ub, floor);
  return bounds;
}

QosBreakdown fitness(const Repository& repo, const Task& task, const CompositionDag& dag,
                     const NormBounds& bounds) {
  (void)task;
  QosBreakdown q;
  q.total_time = total_time(repo, dag);
  q.total_cost = total_cost(repo, dag);
  q.norm_time = std::min(1.0, q.total_time / bounds.time_ub);
  q.norm_cost = std::min(1.0, q.total_cost / bounds.cost_ub);
  q.fitness = std::min(1.0, q.norm_time + q.norm_cost);
  return q;
}

}  // namespace dwsc
