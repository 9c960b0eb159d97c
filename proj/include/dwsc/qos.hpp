#pragma once

#include "dwsc/decode.hpp"
#include "dwsc/model.hpp"

namespace dwsc {

struct QosBreakdown {
  double total_time = 0.0;
  double total_cost = 0.0;
  double norm_time = 0.0;  // in [0,1]
  double norm_cost = 0.0;  // in [0,1]
  double fitness = 0.0;    // in [0,1], lower is better
};

// Normalization upper bounds, fixed per repository and task.
struct NormBounds {
  double time_ub = 0.0;
  double cost_ub = 0.0;
};

// Execution time of one service: for every bound data item, the propagation
// delay from the data host to the service, the host's access latency, the
// processing time and the transfer time.
double service_time(const Repository& repo, int service);
double service_time(const Repository& repo, const std::string& service_id);

// Cost of one service: per data item, communication cost plus provision cost
// plus service cost.
double service_cost(const Repository& repo, int service);
double service_cost(const Repository& repo, const std::string& service_id);

// Weighted node costs plus weighted communication cost of the inter-service
// edges. Edges touching START or END are free: the endpoints are virtual.
double total_cost(const Repository& repo, const CompositionDag& dag);

// Weighted duration of the most time-consuming START->END path, by longest
// path dynamic programming in topological order. Throws ValidationError on a
// cyclic graph.
double total_time(const Repository& repo, const CompositionDag& dag);

// Pessimistic whole-repository aggregates; any decodable candidate scores at
// or below them, so the normalized terms stay in [0,1].
NormBounds norm_bounds(const Repository& repo, const Task& task);

// Objective value: normalized time plus normalized cost, clamped into [0,1].
QosBreakdown fitness(const Repository& repo, const Task& task, const CompositionDag& dag,
                     const NormBounds& bounds);

}  // namespace dwsc
