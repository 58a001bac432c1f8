#include "modgraph/planner.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {

double finalize_flow_max(double flow_max) {
  return flow_max > 0.0 ? flow_max : 1.0;
}

const FlowDescriptor* descriptor_for(const NodeDynamics& dynamics, NodeId id) {
  auto it = dynamics.descriptors.find(id);
  return it == dynamics.descriptors.end() ? nullptr : &it->second;
}

}  // namespace

NodeDynamics node_dynamics_historical(const NavGraph& graph) {
  NodeDynamics out;
  double flow_max = 0.0;
  for (const auto& [id, node] : graph.nodes()) {
    if (!node.owned_dynamics) {
      continue;
    }
    FlowDescriptor d = descriptor_of(*node.owned_dynamics);
    flow_max = std::max(flow_max, d.magnitude);
    out.descriptors.emplace(id, std::move(d));
  }
  out.flow_max = finalize_flow_max(flow_max);
  return out;
}

NodeDynamics node_dynamics_predicted(const NavGraph& graph,
                                     const GlobalTemporalModel& temporal, double t) {
  NodeDynamics out;
  double flow_max = 0.0;
  for (const auto& [id, node] : graph.nodes()) {
    if (node.bound_keys.empty()) {
      continue;
    }
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(temporal.bins());
    bool any = false;
    for (const CellKey& key : node.bound_keys) {
      if (temporal.has_location(key)) {
        sum += temporal.predict_location(key, t);
        any = true;
      }
    }
    if (!any) {
      continue;
    }
    FlowDescriptor d = descriptor_of_values(sum);
    flow_max = std::max(flow_max, d.magnitude);
    out.descriptors.emplace(id, std::move(d));
  }
  out.flow_max = finalize_flow_max(flow_max);
  return out;
}

double temporal_cost(const FlowDescriptor* descriptor, const PlannerWeights& weights,
                     double flow_max) {
  if (descriptor == nullptr) {
    return 0.0;
  }
  if (!(flow_max > 0.0)) {
    throw std::invalid_argument("temporal_cost: flow_max must be positive");
  }
  return weights.w_entropy * descriptor->entropy +
         weights.w_flow * std::min(descriptor->magnitude / flow_max, 1.0);
}

double directional_penalty(double theta_edge, const FlowDescriptor* entered,
                           const PlannerWeights& weights) {
  if (entered == nullptr || !entered->dominant_direction) {
    return 0.0;
  }
  const double misalignment =
      (1.0 - std::cos(theta_edge - *entered->dominant_direction)) / 2.0;
  return weights.w_direction * entered->resultant_length * misalignment;
}

double edge_cost(const NavGraph& graph, NodeId i, NodeId j,
                 const PlannerWeights& weights, const NodeDynamics& dynamics) {
  if (!graph.has_edge(i, j)) {
    throw std::invalid_argument("edge_cost: no such edge");
  }
  const Position& pi = graph.node(i).position;
  const Position& pj = graph.node(j).position;
  const double d = (pj - pi).norm();
  const double ct_mean =
      0.5 * (temporal_cost(descriptor_for(dynamics, i), weights, dynamics.flow_max) +
             temporal_cost(descriptor_for(dynamics, j), weights, dynamics.flow_max));
  const double theta_edge = std::atan2(pj.y() - pi.y(), pj.x() - pi.x());
  const double cd = directional_penalty(theta_edge, descriptor_for(dynamics, j), weights);
  return d + (ct_mean + cd) * d;
}

PlanResult plan(const NavGraph& graph, NodeId start, NodeId goal,
                const PlannerWeights& weights, const NodeDynamics& dynamics) {
  if (!graph.has_node(start) || !graph.has_node(goal)) {
    throw NotFoundError("plan: start or goal does not exist");
  }
  PlanResult result;
  if (start == goal) {
    result.path = {start};
    return result;
  }

  const Position goal_pos = graph.node(goal).position;
  auto heuristic = [&](NodeId id) {
    return (graph.node(id).position - goal_pos).norm();
  };

  std::map<NodeId, double> g_score;
  std::map<NodeId, NodeId> parent;
  std::set<NodeId> settled;
  using QueueEntry = std::pair<double, NodeId>;  // (f, id): id breaks f ties
  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> open;

  g_score[start] = 0.0;
  open.emplace(heuristic(start), start);

  while (!open.empty()) {
    const auto [f, current] = open.top();
    open.pop();
    if (settled.count(current) != 0) {
      continue;  // stale queue entry
    }
    settled.insert(current);
    if (current == goal) {
      break;
    }
    const double g_cur = g_score.at(current);
    for (NodeId next : graph.neighbors(current)) {
      if (settled.count(next) != 0) {
        continue;
      }
      const double tentative = g_cur + edge_cost(graph, current, next, weights, dynamics);
      auto it = g_score.find(next);
      const bool improves = it == g_score.end() || tentative < it->second;
      // On exact cost ties prefer the smaller parent id, so the result does
      // not depend on expansion order.
      const bool tie_better =
          it != g_score.end() && tentative == it->second && current < parent.at(next);
      if (improves || tie_better) {
        g_score[next] = tentative;
        parent[next] = current;
        open.emplace(tentative + heuristic(next), next);
      }
    }
  }

  if (settled.count(goal) == 0) {
    throw NoPathError("plan: goal unreachable from start");
  }

  std::vector<NodeId> path{goal};
  while (path.back() != start) {
    path.push_back(parent.at(path.back()));
  }
  std::reverse(path.begin(), path.end());
  result.path = std::move(path);

  for (std::size_t i = 0; i + 1 < result.path.size(); ++i) {
    const NodeId a = result.path[i];
    const NodeId b = result.path[i + 1];
    PlanStep step;
    step.from = a;
    step.to = b;
    const Position& pa = graph.node(a).position;
    const Position& pb = graph.node(b).position;
    step.distance = (pb - pa).norm();
    step.mean_temporal =
        0.5 * (temporal_cost(descriptor_for(dynamics, a), weights, dynamics.flow_max) +
               temporal_cost(descriptor_for(dynamics, b), weights, dynamics.flow_max));
    step.directional = directional_penalty(
        std::atan2(pb.y() - pa.y(), pb.x() - pa.x()), descriptor_for(dynamics, b),
        weights);
    step.cost = edge_cost(graph, a, b, weights, dynamics);
    result.total_cost += step.cost;
    result.steps.push_back(step);
  }
  return result;
}

}  // namespace modgraph
