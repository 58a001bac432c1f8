#include "modgraph/nav_graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "modgraph/errors.hpp"
#include "modgraph/rng.hpp"

namespace modgraph {

namespace {
std::pair<NodeId, NodeId> ordered_pair(NodeId a, NodeId b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}
}  // namespace

void NavGraph::insert_node(NodeId id, const Position& position) {
  if (nodes_.count(id) != 0) {
    throw std::invalid_argument("NavGraph::insert_node: duplicate node id");
  }
  if (!position.allFinite()) {
    throw std::invalid_argument("NavGraph::insert_node: position must be finite");
  }
  NavNode node;
  node.id = id;
  node.position = position;
  nodes_.emplace(id, std::move(node));
}

void NavGraph::reposition_node(NodeId id, const Position& position) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw NotFoundError("NavGraph::reposition_node: unknown node id");
  }
  if (!position.allFinite()) {
    throw std::invalid_argument("NavGraph::reposition_node: position must be finite");
  }
  // Owned dynamics travel with the node untouched; edge lengths are derived
  // from positions, so they follow automatically.
  it->second.position = position;
}

void NavGraph::remove_node(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw NotFoundError("NavGraph::remove_node: unknown node id");
  }
  nodes_.erase(it);
  for (auto e = edges_.begin(); e != edges_.end();) {
    if (e->first == id || e->second == id) {
      e = edges_.erase(e);
    } else {
      ++e;
    }
  }
}

void NavGraph::add_edge(NodeId a, NodeId b) {
  if (a == b) {
    throw std::invalid_argument("NavGraph::add_edge: self-edges not allowed");
  }
  if (nodes_.count(a) == 0 || nodes_.count(b) == 0) {
    throw std::invalid_argument("NavGraph::add_edge: endpoint does not exist");
  }
  edges_.insert(ordered_pair(a, b));
}

bool NavGraph::has_edge(NodeId a, NodeId b) const {
  return edges_.count(ordered_pair(a, b)) != 0;
}

double NavGraph::edge_length(NodeId a, NodeId b) const {
  if (!has_edge(a, b)) {
    throw NotFoundError("NavGraph::edge_length: no such edge");
  }
  return (node(a).position - node(b).position).norm();
}

const NavNode& NavGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw NotFoundError("NavGraph::node: unknown node id");
  }
  return it->second;
}

NavNode& NavGraph::node_mut(NodeId id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) {
    throw NotFoundError("NavGraph::node_mut: unknown node id");
  }
  return it->second;
}

std::optional<NodeId> NavGraph::nearest_node(const Position& p, double d_max) const {
  if (!(d_max > 0.0)) {
    throw std::invalid_argument("NavGraph::nearest_node: d_max must be positive");
  }
  std::optional<NodeId> best;
  double best_dist = d_max;
  // Map iteration is id-ascending, so strict improvement keeps the smallest
  // id on exact ties.
  for (const auto& [id, node] : nodes_) {
    const double dist = (node.position - p).norm();
    if (dist <= best_dist && (!best || dist < best_dist)) {
      best = id;
      best_dist = dist;
    }
  }
  return best;
}

std::vector<std::pair<NodeId, NodeId>> NavGraph::edges_ordered() const {
  return {edges_.begin(), edges_.end()};
}

std::vector<NodeId> NavGraph::neighbors(NodeId id) const {
  if (nodes_.count(id) == 0) {
    throw NotFoundError("NavGraph::neighbors: unknown node id");
  }
  std::vector<NodeId> out;
  for (const auto& [a, b] : edges_) {
    if (a == id) {
      out.push_back(b);
    } else if (b == id) {
      out.push_back(a);
    }
  }
  return out;
}

NavGraph build_nav_graph(const Eigen::AlignedBox2d& area,
                         const std::vector<WallSegment>& walls, std::uint64_t seed,
                         const NodePlacementParams& params) {
  if (!(params.spacing > 0.0) || params.k_neighbors < 1 || params.max_attempts < 1) {
    throw std::invalid_argument("build_nav_graph: invalid placement parameters");
  }
  if (area.isEmpty()) {
    throw std::invalid_argument("build_nav_graph: empty sampling area");
  }
  NavGraph graph;
  std::vector<Position> placed;
  Rng rng(seed);
  for (int attempt = 0; attempt < params.max_attempts; ++attempt) {
    const Position candidate{rng.uniform(area.min().x(), area.max().x()),
                             rng.uniform(area.min().y(), area.max().y()), 0.0};
    bool clear = true;
    for (const Position& p : placed) {
      if ((p - candidate).norm() < params.spacing) {
        clear = false;
        break;
      }
    }
    if (clear) {
      graph.insert_node(static_cast<NodeId>(placed.size()), candidate);
      placed.push_back(candidate);
    }
  }
  // k-nearest connectivity, keeping only wall-free sightlines.
  for (const auto& [id, node] : graph.nodes()) {
    std::vector<std::pair<double, NodeId>> ranked;
    for (const auto& [other_id, other] : graph.nodes()) {
      if (other_id != id) {
        ranked.emplace_back((other.position - node.position).norm(), other_id);
      }
    }
    std::sort(ranked.begin(), ranked.end());
    int added = 0;
    for (const auto& [dist, other_id] : ranked) {
      if (added >= params.k_neighbors) {
        break;
      }
      if (line_of_sight(node.position, graph.node(other_id).position, walls)) {
        graph.add_edge(id, other_id);
        ++added;
      }
    }
  }
  return graph;
}

}  // namespace modgraph
