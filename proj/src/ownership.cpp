#include "modgraph/ownership.hpp"

#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

std::vector<std::pair<CellKey, NodeId>> bind_stable_cells(OwnershipState& state,
                                                          NavGraph& graph,
                                                          SparseHashMap& map,
                                                          double now) {
  std::vector<std::pair<CellKey, NodeId>> bound;
  // Deterministic sweep order so repeated runs bind identically.
  for (const CellKey& key : map.keys_ordered()) {
    const HashCell* cell = map.lookup(key);
    if (cell->created_t > now - state.tau) {
      continue;  // not yet stable
    }
    const auto node_id =
        graph.nearest_node(cell_center(key, map.delta()), state.bind_radius);
    if (!node_id) {
      continue;  // stays in hash space as unbound dynamics
    }
    NavNode& node = graph.node_mut(*node_id);
    if (!node.owned_dynamics) {
      node.owned_dynamics.emplace(map.bins());
    }
    auto extracted = map.remove_cell(key);
    node.owned_dynamics->merge(extracted->histogram);
    node.bound_keys.insert(key);
    state.redirect[key] = *node_id;
    bound.emplace_back(key, *node_id);
  }
  return bound;
}

RouteResult route_observation(OwnershipState& state, NavGraph& graph,
                              SparseHashMap& map, const Position& p, double theta,
                              double t, double weight) {
  RouteResult res;
  res.key = hash_key(p, map.delta());
  res.bin = orientation_bin(theta, map.bins());
  auto it = state.redirect.find(res.key);
  if (it != state.redirect.end()) {
    if (!graph.has_node(it->second)) {
      throw ProtocolViolationError(
          "route_observation: redirect entry points at a deleted node");
    }
    NavNode& node = graph.node_mut(it->second);
    if (!node.owned_dynamics) {
      node.owned_dynamics.emplace(map.bins());
    }
    node.owned_dynamics->accumulate(res.bin, t, weight);
    res.owner = it->second;
    return res;
  }
  map.upsert_observation(p, theta, t, weight);
  return res;
}

ReleaseResult release_on_removal(OwnershipState& state, NavGraph& graph,
                                 SparseHashMap& map, NodeId id, double now) {
  if (!graph.has_node(id)) {
    throw std::invalid_argument("release_on_removal: unknown node id");
  }
  NavNode& node = graph.node_mut(id);

  ReleaseResult res;
  res.released_keys.assign(node.bound_keys.begin(), node.bound_keys.end());
  for (const CellKey& key : res.released_keys) {
    state.redirect.erase(key);
  }
  node.bound_keys.clear();

  if (!node.owned_dynamics) {
    return res;
  }
  DirectionalHistogram history = std::move(*node.owned_dynamics);
  node.owned_dynamics.reset();

  const CellKey dest = hash_key(node.position, map.delta());
  res.destination_key = dest;

  if (auto other = state.redirect.find(dest); other != state.redirect.end()) {
    // The final pose lands in a cell another node already owns; the redirect
    // table routes data at that key to its owner, so the history follows.
    NavNode& owner = graph.node_mut(other->second);
    if (!owner.owned_dynamics) {
      owner.owned_dynamics.emplace(map.bins());
    }
    owner.owned_dynamics->merge(history);
    res.destination_node = other->second;
    return res;
  }

  HashCell cell;
  cell.key = dest;
  cell.histogram = std::move(history);
  cell.created_t = now;
  map.insert_cell(std::move(cell));
  return res;
}

std::optional<NodeId> owner_of(const OwnershipState& state, const CellKey& key) {
  auto it = state.redirect.find(key);
  if (it == state.redirect.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<ReleaseResult> apply_event(OwnershipState& state, NavGraph& graph,
                                         SparseHashMap& map, const TopologyEvent& ev) {
  switch (ev.kind) {
    case TopologyEvent::Kind::insert:
      graph.insert_node(ev.id, ev.position);
      return std::nullopt;
    case TopologyEvent::Kind::reposition:
      graph.reposition_node(ev.id, ev.position);
      return std::nullopt;
    case TopologyEvent::Kind::remove: {
      ReleaseResult res = release_on_removal(state, graph, map, ev.id, ev.t);
      graph.remove_node(ev.id);
      return res;
    }
  }
  throw std::invalid_argument("apply_event: unknown event kind");
}

}  // namespace modgraph
