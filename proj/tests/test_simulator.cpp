#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "modgraph/simulator.hpp"

using namespace modgraph;

namespace {

AgentRoute straight_route(Position a, Position b, double speed = 1.0,
                          double period = 100.0, double duty = 0.5,
                          double phase = 0.0) {
  AgentRoute r;
  r.waypoints = {a, b};
  r.speed = speed;
  r.period = period;
  r.duty = duty;
  r.phase = phase;
  r.noise_sigma = 0.0;
  return r;
}

SceneConfig single_route_scene(AgentRoute route, double duration = 400.0) {
  SceneConfig cfg;
  cfg.scene_id = 0;
  cfg.duration = duration;
  cfg.dt = 0.5;
  cfg.seed = 17;
  cfg.routes = {std::move(route)};
  return cfg;
}

}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("same config produces a bit-identical stream") {
  const SceneConfig cfg = default_scene_config();
  const ObservationStream a = generate_scene(cfg);
  const ObservationStream b = generate_scene(cfg);
  REQUIRE_FALSE(a.empty());
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].t == b[i].t);
    CHECK(a[i].agent_id == b[i].agent_id);
    CHECK(a[i].position == b[i].position);
    CHECK(a[i].heading == b[i].heading);
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    CHECK(a[i].t >= a[i - 1].t);  // stream stays time-ordered
  }
}

TEST_CASE("duty cycle gates detections into alternating windows") {
  // Long enough route that the polyline never runs out inside a window.
  const SceneConfig cfg = single_route_scene(
      straight_route({0, 0, 0}, {100, 0, 0}, 1.0, 100.0, 0.5, 0.0));
  const ObservationStream s = generate_scene(cfg);
  // 4 periods of 200 ticks each, half of them active.
  CHECK(s.size() == 400);
  std::map<int, int> per_window;
  for (const Observation& o : s) {
    const double local = std::fmod(o.t, 100.0);
    CHECK(local < 50.0);
    ++per_window[static_cast<int>(o.t / 100.0)];
  }
  REQUIRE(per_window.size() == 4);
  for (const auto& [w, n] : per_window) {
    CHECK(n == 100);
  }
}

TEST_CASE("agents vanish once the polyline is exhausted") {
  // 10 m route at 1 m/s with a 100 s full-duty window: only the first 10 s
  // of each activation can emit.
  const SceneConfig cfg = single_route_scene(
      straight_route({0, 0, 0}, {10, 0, 0}, 1.0, 100.0, 1.0, 0.0));
  const ObservationStream s = generate_scene(cfg);
  REQUIRE_FALSE(s.empty());
  for (const Observation& o : s) {
    CHECK(std::fmod(o.t, 100.0) < 10.0);
  }
  CHECK(s.size() == 80);  // 20 ticks per period, 4 periods
}

TEST_CASE("phase shifts the activation window") {
  const SceneConfig cfg = single_route_scene(
      straight_route({0, 0, 0}, {100, 0, 0}, 1.0, 100.0, 0.3, 30.0), 100.0);
  const ObservationStream s = generate_scene(cfg);
  REQUIRE_FALSE(s.empty());
  CHECK(s.front().t == 70.0);  // first tick with fmod(t + 30, 100) < 30
  for (const Observation& o : s) {
    CHECK(std::fmod(o.t + 30.0, 100.0) < 30.0);
  }
}

TEST_CASE("noiseless straight route reports the segment heading exactly") {
  const SceneConfig cfg = single_route_scene(
      straight_route({0, 0, 0}, {10, 10, 0}, 1.0, 100.0, 0.5, 0.0), 100.0);
  const ObservationStream s = generate_scene(cfg);
  REQUIRE_FALSE(s.empty());
  const double expected = std::atan2(10.0, 10.0);
  for (const Observation& o : s) {
    CHECK(o.heading == expected);
    CHECK(o.position.x() == o.position.y());  // on the diagonal, no noise
    CHECK(o.position.z() == 0.0);
  }
}

TEST_CASE("activity at a fixed tick is periodic with the route period") {
  const SceneConfig cfg = single_route_scene(
      straight_route({0, 0, 0}, {100, 0, 0}, 1.0, 100.0, 0.5, 0.0), 300.0);
  const ObservationStream s = generate_scene(cfg);
  std::map<double, Position> at;
  for (const Observation& o : s) {
    at.emplace(o.t, o.position);
  }
  std::size_t compared = 0;
  for (const auto& [t, p] : at) {
    auto later = at.find(t + 100.0);
    if (later != at.end()) {
      CHECK(p == later->second);
      ++compared;
    }
  }
  CHECK(compared >= 100);
}

TEST_CASE("invalid configurations are refused") {
  const AgentRoute good = straight_route({0, 0, 0}, {10, 0, 0});
  SceneConfig cfg = single_route_scene(good);

  SceneConfig bad = cfg;
  bad.duration = 0.0;
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
  bad = cfg;
  bad.dt = -0.5;
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);

  auto with_route = [&](auto mutate) {
    SceneConfig c = cfg;
    mutate(c.routes[0]);
    return c;
  };
  CHECK_THROWS_AS(
      generate_scene(with_route([](AgentRoute& r) { r.waypoints.resize(1); })),
      std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(with_route([](AgentRoute& r) { r.speed = 0.0; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(with_route([](AgentRoute& r) { r.duty = 0.0; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(with_route([](AgentRoute& r) { r.duty = 1.5; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(with_route([](AgentRoute& r) { r.period = 0.0; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(generate_scene(with_route([](AgentRoute& r) { r.phase = -1.0; })),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      generate_scene(with_route([](AgentRoute& r) { r.noise_sigma = -0.1; })),
      std::invalid_argument);
}

TEST_CASE("dataset derivation yields distinct, reproducible scenes") {
  const SceneConfig base = default_scene_config();
  REQUIRE(base.routes.size() == 6);  // six agents per scene

  const std::vector<SceneConfig> scenes = generate_dataset(20, base, 42);
  REQUIRE(scenes.size() == 20);
  std::set<std::uint64_t> seeds;
  for (int i = 0; i < 20; ++i) {
    CHECK(scenes[i].scene_id == i);
    CHECK(scenes[i].routes.size() == 6);
    seeds.insert(scenes[i].seed);
    for (std::size_t r = 0; r < scenes[i].routes.size(); ++r) {
      const AgentRoute& route = scenes[i].routes[r];
      CHECK(route.phase >= 0.0);
      CHECK(route.phase <= route.period);
      CHECK(route.speed > 0.0);
    }
  }
  CHECK(seeds.size() == 20);

  // Same master seed reproduces the same derivation.
  const std::vector<SceneConfig> again = generate_dataset(20, base, 42);
  for (int i = 0; i < 20; ++i) {
    CHECK(scenes[i].seed == again[i].seed);
    CHECK(scenes[i].routes[0].phase == again[i].routes[0].phase);
    CHECK(scenes[i].routes[0].speed == again[i].routes[0].speed);
  }

  // Different scenes actually produce different data.
  const ObservationStream s0 = generate_scene(scenes[0]);
  const ObservationStream s1 = generate_scene(scenes[1]);
  bool differs = s0.size() != s1.size();
  for (std::size_t i = 0; !differs && i < s0.size(); ++i) {
    differs = s0[i].t != s1[i].t || s0[i].position != s1[i].position;
  }
  CHECK(differs);

  const std::vector<SceneConfig> one = generate_dataset(1, base, 7);
  CHECK(one.size() == 1);
  CHECK_THROWS_AS(generate_dataset(0, base, 7), std::invalid_argument);
}

TEST_CASE("topology event injection") {
  NavGraph graph;
  for (int i = 0; i < 20; ++i) {
    graph.insert_node(i, {static_cast<double>(i), 0.0, 0.0});
  }

  SUBCASE("density zero schedules nothing") {
    CHECK(inject_topology_events(5, graph, 0.0, 1200.0).empty());
  }

  SUBCASE("reposition-only schedules bounded offsets over distinct nodes") {
    const auto events = inject_topology_events(5, graph, 1.0, 1200.0, 0.0);
    REQUIRE(events.size() == 20);
    std::set<NodeId> touched;
    for (const TopologyEvent& ev : events) {
      CHECK(ev.kind == TopologyEvent::Kind::reposition);
      touched.insert(ev.id);
      const double offset = (ev.position - graph.node(ev.id).position).norm();
      CHECK(offset <= 0.5 + 1e-9);
      CHECK(ev.t >= 0.3 * 1200.0);
      CHECK(ev.t <= 0.9 * 1200.0);
    }
    CHECK(touched.size() == 20);
    for (std::size_t i = 1; i < events.size(); ++i) {
      CHECK(events[i].t >= events[i - 1].t);
    }
  }

  SUBCASE("remove fraction one schedules removals only") {
    const auto events = inject_topology_events(5, graph, 0.5, 1200.0, 1.0);
    CHECK(events.size() == 10);  // half the nodes at density 0.5
    for (const TopologyEvent& ev : events) {
      CHECK(ev.kind == TopologyEvent::Kind::remove);
    }
  }

  SUBCASE("deterministic in the seed") {
    const auto a = inject_topology_events(9, graph, 0.4, 600.0);
    const auto b = inject_topology_events(9, graph, 0.4, 600.0);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].id == b[i].id);
      CHECK(a[i].t == b[i].t);
      CHECK(a[i].kind == b[i].kind);
      CHECK(a[i].position == b[i].position);
    }
  }

  SUBCASE("bad inputs are refused") {
    CHECK_THROWS_AS(inject_topology_events(5, NavGraph{}, 0.5, 1200.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(inject_topology_events(5, graph, 1.5, 1200.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(inject_topology_events(5, graph, 0.5, 1200.0, -0.1),
                    std::invalid_argument);
  }
}

TEST_CASE("route bounding box covers all waypoints plus margin") {
  std::vector<AgentRoute> routes = {straight_route({0, 0, 0}, {2, 4, 0}),
                                    straight_route({-1, 1, 0}, {3, 0, 0})};
  const Eigen::AlignedBox2d box = route_bounding_box(routes, 1.0);
  CHECK(box.min().x() == -2.0);
  CHECK(box.min().y() == -1.0);
  CHECK(box.max().x() == 4.0);
  CHECK(box.max().y() == 5.0);
  CHECK_THROWS_AS(route_bounding_box({}, 1.0), std::invalid_argument);
}

TEST_CASE("default scene is a valid two-region layout") {
  const SceneConfig cfg = default_scene_config();
  CHECK(cfg.duration == 1200.0);
  CHECK(cfg.routes.size() == 6);
  CHECK(cfg.walls.size() == 8);
  const Eigen::AlignedBox2d box = route_bounding_box(cfg.routes);
  CHECK(box.max().x() > 19.0);  // the hallway extends well past the room
  const ObservationStream s = generate_scene(cfg);
  CHECK(s.size() > 1000);
}

}  // TEST_SUITE
