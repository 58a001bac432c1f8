#include <doctest.h>

#include <set>
#include <stdexcept>

#include "modgraph/errors.hpp"
#include "modgraph/ownership.hpp"
#include "modgraph/rng.hpp"

using namespace modgraph;

namespace {

struct World {
  OwnershipState state;
  NavGraph graph;
  SparseHashMap map{0.5, 8};
};

double owned_sum(const NavGraph& g) {
  double sum = 0.0;
  for (const auto& [id, node] : g.nodes()) {
    sum += node.owned_total();
  }
  return sum;
}

double cell_sum(const SparseHashMap& m) {
  double sum = 0.0;
  for (const auto& [key, cell] : m.cells()) {
    sum += cell.histogram.total();
  }
  return sum;
}

// The two global guarantees: mass conservation and single ownership.
void check_invariants(const World& w, double expected_total) {
  CHECK(owned_sum(w.graph) + cell_sum(w.map) == expected_total);

  std::set<CellKey> seen;
  for (const auto& [id, node] : w.graph.nodes()) {
    CHECK(node.owned_dynamics.has_value() == !node.bound_keys.empty());
    for (const CellKey& key : node.bound_keys) {
      CHECK(seen.insert(key).second);  // bound in exactly one node
      CHECK(w.map.lookup(key) == nullptr);  // and absent from hash space
      REQUIRE(owner_of(w.state, key).has_value());
      CHECK(*owner_of(w.state, key) == id);
    }
  }
  CHECK(w.state.redirect.size() == seen.size());
  for (const auto& [key, id] : w.state.redirect) {
    CHECK(w.graph.has_node(id));  // never dangles
  }
}

}  // namespace

TEST_SUITE("ownership") {

TEST_CASE("stable cell binds to the nearest node") {
  World w;
  w.graph.insert_node(1, {0.3, 0.3, 0.25});
  w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, 0.0);  // created_t = 0

  const auto bound = bind_stable_cells(w.state, w.graph, w.map, 60.0);
  REQUIRE(bound.size() == 1);
  CHECK(bound[0].first == CellKey{0, 0, 0});
  CHECK(bound[0].second == 1);

  CHECK(w.map.lookup(CellKey{0, 0, 0}) == nullptr);
  CHECK(w.graph.node(1).owned_total() == 1.0);
  CHECK(w.graph.node(1).bound_keys.count(CellKey{0, 0, 0}) == 1);
  CHECK(owner_of(w.state, CellKey{0, 0, 0}) == NodeId{1});
  check_invariants(w, 1.0);
}

TEST_CASE("young cells and isolated cells stay in hash space") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, 30.0);  // younger than tau
  CHECK(bind_stable_cells(w.state, w.graph, w.map, 60.0).empty());
  CHECK(w.map.occupied_count() == 1);

  // Stable but no node within bind_radius: unbound dynamics persist.
  w.map.upsert_observation({20, 20, 0}, 0.0, 0.0);
  const auto bound = bind_stable_cells(w.state, w.graph, w.map, 90.1);
  CHECK(bound.size() == 1);  // only the (now stable) near cell binds
  CHECK(w.map.occupied_count() == 1);
  CHECK(w.map.lookup(hash_key({20, 20, 0}, 0.5)) != nullptr);
  check_invariants(w, 2.0);
}

TEST_CASE("route_observation follows the redirect table") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, 0.0);
  bind_stable_cells(w.state, w.graph, w.map, 60.0);

  // Bound key: data goes to the node, hash map stays empty.
  const RouteResult to_node =
      route_observation(w.state, w.graph, w.map, {0.3, 0.2, 0.25}, kPi / 4, 61.0);
  CHECK(to_node.key == CellKey{0, 0, 0});
  CHECK(to_node.bin == 5);
  CHECK(to_node.owner == NodeId{1});
  CHECK(w.graph.node(1).owned_total() == 2.0);
  CHECK(w.map.occupied_count() == 0);

  // Unbound key: a hash cell grows instead.
  const RouteResult to_cell =
      route_observation(w.state, w.graph, w.map, {5, 5, 0}, 0.0, 62.0);
  CHECK_FALSE(to_cell.owner.has_value());
  CHECK(w.map.lookup(to_cell.key)->histogram.total() == 1.0);
  check_invariants(w, 3.0);
}

TEST_CASE("redirect to a deleted node is a protocol violation") {
  World w;
  w.state.redirect[CellKey{5, 5, 5}] = 42;  // corrupt state on purpose
  CHECK_THROWS_AS(
      route_observation(w.state, w.graph, w.map, {2.7, 2.7, 2.7}, 0.0, 0.0),
      ProtocolViolationError);
}

TEST_CASE("release rematerializes history at the final pose") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  for (int i = 0; i < 9; ++i) {
    w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, static_cast<double>(i));
  }
  bind_stable_cells(w.state, w.graph, w.map, 100.0);
  REQUIRE(w.graph.node(1).owned_total() == 9.0);

  // Loop closure moved the node; release lands at the *final* pose.
  w.graph.reposition_node(1, {3.1, 3.1, 0.1});
  const ReleaseResult res = release_on_removal(w.state, w.graph, w.map, 1, 200.0);

  CHECK(res.released_keys == std::vector<CellKey>{CellKey{0, 0, 0}});
  CHECK(res.destination_key == CellKey{6, 6, 0});
  CHECK_FALSE(res.destination_node.has_value());

  const HashCell* cell = w.map.lookup(CellKey{6, 6, 0});
  REQUIRE(cell != nullptr);
  CHECK(cell->histogram.total() == 9.0);
  CHECK(cell->created_t == 200.0);
  CHECK_FALSE(owner_of(w.state, CellKey{0, 0, 0}).has_value());
  CHECK(w.graph.node(1).bound_keys.empty());
  CHECK_FALSE(w.graph.node(1).owned_dynamics.has_value());
  check_invariants(w, 9.0);
}

TEST_CASE("release into an occupied cell merges") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, 0.0);
  bind_stable_cells(w.state, w.graph, w.map, 60.0);

  // The node drifts; meanwhile ordinary traffic occupies its eventual
  // destination cell.
  w.graph.reposition_node(1, {5.2, 5.2, 0.2});
  route_observation(w.state, w.graph, w.map, {5.1, 5.1, 0.1}, 0.0, 62.0);

  const ReleaseResult res = release_on_removal(w.state, w.graph, w.map, 1, 70.0);
  CHECK(res.destination_key == CellKey{10, 10, 0});
  const HashCell* cell = w.map.lookup(CellKey{10, 10, 0});
  REQUIRE(cell != nullptr);
  CHECK(cell->histogram.total() == 2.0);  // merged, mass conserved
  CHECK(cell->created_t == 62.0);         // earliest occupant's creation time
}

TEST_CASE("release into a cell bound to another node joins that owner") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  w.graph.insert_node(2, {10.25, 10.25, 0.25});
  w.map.upsert_observation({0.25, 0.25, 0.25}, 0.0, 0.0);
  w.map.upsert_observation({10.25, 10.25, 0.25}, 0.0, 0.0);
  bind_stable_cells(w.state, w.graph, w.map, 60.0);
  REQUIRE(w.state.redirect.size() == 2);

  // Node 2 drifts into node 1's bound cell, then disappears.
  w.graph.reposition_node(2, {0.3, 0.2, 0.25});
  const ReleaseResult res = release_on_removal(w.state, w.graph, w.map, 2, 70.0);
  w.graph.remove_node(2);

  CHECK(res.destination_key == CellKey{0, 0, 0});
  CHECK(res.destination_node == NodeId{1});
  CHECK(w.map.occupied_count() == 0);  // nothing rematerialized
  CHECK(w.graph.node(1).owned_total() == 2.0);
  check_invariants(w, 2.0);
}

TEST_CASE("removing a node without dynamics changes nothing in hash space") {
  World w;
  w.graph.insert_node(1, {0, 0, 0});
  const ReleaseResult res = release_on_removal(w.state, w.graph, w.map, 1, 10.0);
  CHECK(res.released_keys.empty());
  CHECK_FALSE(res.destination_key.has_value());
  CHECK(w.map.occupied_count() == 0);
  CHECK_THROWS_AS(release_on_removal(w.state, w.graph, w.map, 9, 0.0),
                  std::invalid_argument);
}

TEST_CASE("apply_event dispatches and preserves dynamics") {
  World w;
  apply_event(w.state, w.graph, w.map, {TopologyEvent::Kind::insert, 1, {0.25, 0.25, 0.25}, 0.0});
  for (int i = 0; i < 7; ++i) {
    route_observation(w.state, w.graph, w.map, {0.25, 0.25, 0.25}, 0.0,
                      static_cast<double>(i));
  }
  bind_stable_cells(w.state, w.graph, w.map, 100.0);
  REQUIRE(w.graph.node(1).owned_total() == 7.0);

  // Reposition: dynamics travel with the node, totals untouched.
  apply_event(w.state, w.graph, w.map,
              {TopologyEvent::Kind::reposition, 1, {4.6, 4.6, 0.0}, 150.0});
  CHECK(w.graph.node(1).position.isApprox(Position{4.6, 4.6, 0.0}));
  CHECK(w.graph.node(1).owned_total() == 7.0);
  check_invariants(w, 7.0);

  // Remove: history restored into hash space, node gone.
  const auto res = apply_event(w.state, w.graph, w.map,
                               {TopologyEvent::Kind::remove, 1, {}, 160.0});
  REQUIRE(res.has_value());
  CHECK(res->destination_key == CellKey{9, 9, 0});
  CHECK_FALSE(w.graph.has_node(1));
  CHECK(w.map.lookup(CellKey{9, 9, 0})->histogram.total() == 7.0);
  check_invariants(w, 7.0);
}

TEST_CASE("bind then release at an unchanged pose restores the cell") {
  World w;
  w.graph.insert_node(1, {0.25, 0.25, 0.25});
  w.map.upsert_observation({0.3, 0.3, 0.3}, kPi / 4, 1.0);
  w.map.upsert_observation({0.2, 0.2, 0.2}, -kPi / 2, 2.0);
  const Eigen::ArrayXd before = w.map.lookup(CellKey{0, 0, 0})->histogram.counts();

  bind_stable_cells(w.state, w.graph, w.map, 70.0);
  release_on_removal(w.state, w.graph, w.map, 1, 80.0);

  const HashCell* cell = w.map.lookup(CellKey{0, 0, 0});
  REQUIRE(cell != nullptr);
  CHECK((cell->histogram.counts() == before).all());
  CHECK(cell->histogram.first_t() == 1.0);
  CHECK(cell->histogram.last_t() == 2.0);
  check_invariants(w, 2.0);
}

TEST_CASE("randomized interleavings conserve mass and ownership") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    World w;
    NodeId next_id = 0;
    double total = 0.0;
    double now = 0.0;
    for (int step = 0; step < 120; ++step) {
      now += rng.uniform(0.0, 20.0);
      const int op = static_cast<int>(rng.uniform_int(10));
      if (op < 5) {  // observe somewhere in a small arena
        route_observation(w.state, w.graph, w.map,
                          {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), 0.0},
                          rng.uniform(-kPi, kPi), now);
        total += 1.0;
      } else if (op < 7) {
        if (rng.uniform_int(3) == 0 || w.graph.node_count() == 0) {
          apply_event(w.state, w.graph, w.map,
                      {TopologyEvent::Kind::insert, next_id++,
                       {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), 0.0}, now});
        } else {
          bind_stable_cells(w.state, w.graph, w.map, now);
        }
      } else if (op < 9 && w.graph.node_count() > 0) {
        const auto idx = rng.uniform_int(static_cast<std::int64_t>(w.graph.node_count()));
        auto it = w.graph.nodes().begin();
        std::advance(it, idx);
        apply_event(w.state, w.graph, w.map,
                    {TopologyEvent::Kind::reposition, it->first,
                     {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), 0.0}, now});
      } else if (w.graph.node_count() > 0) {
        const auto idx = rng.uniform_int(static_cast<std::int64_t>(w.graph.node_count()));
        auto it = w.graph.nodes().begin();
        std::advance(it, idx);
        apply_event(w.state, w.graph, w.map,
                    {TopologyEvent::Kind::remove, it->first, {}, now});
      }
      check_invariants(w, total);
    }
  }
}

}  // TEST_SUITE
