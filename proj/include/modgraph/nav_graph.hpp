#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include <Eigen/Geometry>

#include "modgraph/flow_histogram.hpp"
#include "modgraph/geometry.hpp"

namespace modgraph {

struct NavNode {
  NodeId id = 0;
  Position position = Position::Zero();
  // Dynamics this node owns after binding; present exactly when bound_keys is
  // non-empty.
  std::optional<DirectionalHistogram> owned_dynamics;
  std::set<CellKey> bound_keys;

  double owned_total() const {
    return owned_dynamics ? owned_dynamics->total() : 0.0;
  }
};

struct TopologyEvent {
  enum class Kind { insert, reposition, remove };
  Kind kind = Kind::insert;
  NodeId id = 0;
  Position position = Position::Zero();  // insert / reposition only
  double t = 0.0;
};

// Navigational abstraction layer: nodes with world positions plus undirected
// traversability edges whose lengths always reflect current node positions.
class NavGraph {
 public:
  void insert_node(NodeId id, const Position& position);
  void reposition_node(NodeId id, const Position& position);
  // Removes the node and its incident edges. Owned dynamics must be released
  // first (see ownership).
  void remove_node(NodeId id);

  void add_edge(NodeId a, NodeId b);
  bool has_edge(NodeId a, NodeId b) const;
  double edge_length(NodeId a, NodeId b) const;

  bool has_node(NodeId id) const { return nodes_.count(id) != 0; }
  const NavNode& node(NodeId id) const;
  NavNode& node_mut(NodeId id);

  // Nearest node no farther than d_max; ties broken by smallest id.
  std::optional<NodeId> nearest_node(const Position& p, double d_max) const;

  const std::map<NodeId, NavNode>& nodes() const { return nodes_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  std::vector<std::pair<NodeId, NodeId>> edges_ordered() const;
  std::vector<NodeId> neighbors(NodeId id) const;

 private:
  std::map<NodeId, NavNode> nodes_;
  std::set<std::pair<NodeId, NodeId>> edges_;  // normalized: first < second
};

struct NodePlacementParams {
  double spacing = 1.0;     // minimum node separation, meters
  int k_neighbors = 4;      // nearest-neighbor edges attempted per node
  int max_attempts = 4000;  // dart throws for Poisson-disk sampling
};

// Stand-in for a places layer: Poisson-disk node samples (dart throwing with
// minimum spacing) over `area`, connected by k-nearest edges that do not
// cross a wall. Deterministic in the seed; node ids are 0..n-1.
NavGraph build_nav_graph(const Eigen::AlignedBox2d& area,
                         const std::vector<WallSegment>& walls, std::uint64_t seed,
                         const NodePlacementParams& params = {});

}  // namespace modgraph
