#pragma once

#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "modgraph/nav_graph.hpp"
#include "modgraph/sparse_hash_map.hpp"

namespace modgraph {

inline constexpr double kDefaultTau = 60.0;         // stability window, seconds
inline constexpr double kDefaultBindRadius = 1.0;   // meters

// Binding function and redirect table: which node, if any, owns the history
// of a given hash cell.
struct OwnershipState {
  std::unordered_map<CellKey, NodeId, CellKeyHash> redirect;
  double tau = kDefaultTau;
  double bind_radius = kDefaultBindRadius;
};

// Where one routed observation landed.
struct RouteResult {
  CellKey key;                  // hash key of the observation position
  int bin = 0;                  // orientation bin the weight went into
  std::optional<NodeId> owner;  // set when the key was bound to a node
};

// Outcome of releasing a removed node's dynamics back into hash space.
struct ReleaseResult {
  std::vector<CellKey> released_keys;        // keys that were bound to the node
  std::optional<CellKey> destination_key;    // hash key of the node's final pose
  std::optional<NodeId> destination_node;    // set when that key belongs to another node
};

// Transfers every stable cell (created at or before now - tau) with a node
// within bind_radius of its center: the histogram merges into the node, the
// cell leaves the hash map, and the redirect table routes the key to the node.
std::vector<std::pair<CellKey, NodeId>> bind_stable_cells(OwnershipState& state,
                                                          NavGraph& graph,
                                                          SparseHashMap& map,
                                                          double now);

// Accumulates one observation either into the owning node (bound key) or into
// the hash map (unbound key).
RouteResult route_observation(OwnershipState& state, NavGraph& graph,
                              SparseHashMap& map, const Position& p, double theta,
                              double t, double weight = 1.0);

// Releases a node's owned dynamics at its final pose: the merged histogram
// rematerializes in the cell covering that pose (merging with any occupant),
// or joins the owning node if that key is itself bound elsewhere. All redirect
// entries for the node disappear. The node itself is not deleted here.
ReleaseResult release_on_removal(OwnershipState& state, NavGraph& graph,
                                 SparseHashMap& map, NodeId id, double now);

std::optional<NodeId> owner_of(const OwnershipState& state, const CellKey& key);

// Applies one topology event; removal performs the release protocol and then
// deletes the node, returning the release outcome.
std::optional<ReleaseResult> apply_event(OwnershipState& state, NavGraph& graph,
                                         SparseHashMap& map, const TopologyEvent& ev);

}  // namespace modgraph
