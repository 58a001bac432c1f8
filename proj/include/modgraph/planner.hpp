#pragma once

#include <map>
#include <vector>

#include "modgraph/nav_graph.hpp"
#include "modgraph/temporal_model.hpp"

namespace modgraph {

struct PlannerWeights {
  double w_entropy = 1.0;    // weight on directional entropy
  double w_flow = 1.0;       // weight on normalized flow magnitude
  double w_direction = 1.0;  // weight on counter-flow movement
};

// Per-node descriptor snapshot the planner prices edges against. Nodes
// without dynamics are simply absent and cost nothing.
struct NodeDynamics {
  std::map<NodeId, FlowDescriptor> descriptors;
  double flow_max = 1.0;  // normalization constant, > 0
};

// Descriptors of every node with owned dynamics, from raw history.
NodeDynamics node_dynamics_historical(const NavGraph& graph);

// Descriptors from model predictions at time t (per node: summed prediction
// over its bound keys).
NodeDynamics node_dynamics_predicted(const NavGraph& graph,
                                     const GlobalTemporalModel& temporal, double t);

// c_t = w_H * entropy + w_F * min(flow / flow_max, 1); 0 without dynamics.
double temporal_cost(const FlowDescriptor* descriptor, const PlannerWeights& weights,
                     double flow_max);

// c_d = w_D * resultant * (1 - cos(theta_edge - theta_dominant)) / 2 at the
// entered node; 0 when its dominant direction is absent.
double directional_penalty(double theta_edge, const FlowDescriptor* entered,
                           const PlannerWeights& weights);

// cost(i, j) = d + (mean(c_t(i), c_t(j)) + c_d(i, j)) * d; never below the
// Euclidean length d. Throws std::invalid_argument when the edge is missing.
double edge_cost(const NavGraph& graph, NodeId i, NodeId j,
                 const PlannerWeights& weights, const NodeDynamics& dynamics);

struct PlanStep {
  NodeId from = 0;
  NodeId to = 0;
  double distance = 0.0;       // Euclidean edge length
  double mean_temporal = 0.0;  // averaged c_t of the endpoints
  double directional = 0.0;    // c_d at the entered node
  double cost = 0.0;           // full edge cost
};

struct PlanResult {
  std::vector<NodeId> path;  // start..goal inclusive
  std::vector<PlanStep> steps;
  double total_cost = 0.0;
};

// A* under edge_cost with the Euclidean-distance heuristic (admissible since
// every edge costs at least its length). Deterministic tie-breaking. Throws
// NoPathError when the goal is unreachable.
PlanResult plan(const NavGraph& graph, NodeId start, NodeId goal,
                const PlannerWeights& weights, const NodeDynamics& dynamics);

}  // namespace modgraph
