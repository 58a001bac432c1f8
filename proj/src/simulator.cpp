#include "modgraph/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "modgraph/rng.hpp"

namespace modgraph {

namespace {

struct PolylineSample {
  Position point;
  double heading;
};

// Point and heading at arc distance `arc` along the waypoints; nullopt once
// the polyline is exhausted (the agent has finished this activation).
std::optional<PolylineSample> sample_polyline(const std::vector<Position>& wp,
                                              double arc) {
  if (arc < 0.0) {
    return std::nullopt;
  }
  double walked = 0.0;
  for (std::size_t i = 0; i + 1 < wp.size(); ++i) {
    const Position seg = wp[i + 1] - wp[i];
    const double len = seg.norm();
    if (len == 0.0) {
      continue;
    }
    if (arc < walked + len) {
      PolylineSample s;
      s.point = wp[i] + (arc - walked) / len * seg;
      s.heading = std::atan2(seg.y(), seg.x());
      return s;
    }
    walked += len;
  }
  return std::nullopt;
}

void check_route(const AgentRoute& r) {
  if (r.waypoints.size() < 2) {
    throw std::invalid_argument("generate_scene: route needs at least 2 waypoints");
  }
  if (!(r.speed > 0.0)) {
    throw std::invalid_argument("generate_scene: route speed must be positive");
  }
  if (!(r.period > 0.0)) {
    throw std::invalid_argument("generate_scene: route period must be positive");
  }
  if (!(r.duty > 0.0 && r.duty <= 1.0)) {
    throw std::invalid_argument("generate_scene: duty must lie in (0, 1]");
  }
  if (!(r.phase >= 0.0)) {
    throw std::invalid_argument("generate_scene: phase must be non-negative");
  }
  if (!(r.noise_sigma >= 0.0)) {
    throw std::invalid_argument("generate_scene: noise sigma must be non-negative");
  }
}

}  // namespace

SceneConfig default_scene_config() {
  SceneConfig cfg;
  cfg.duration = 1200.0;
  cfg.dt = 0.5;
  cfg.seed = 1;

  // Workspace room [0,12]x[0,8] joined to a hallway [12,20]x[3,5] through a
  // doorway in the shared wall.
  auto wall = [](double ax, double ay, double bx, double by) {
    return WallSegment{{ax, ay}, {bx, by}};
  };
  cfg.walls = {
      wall(0, 0, 12, 0),   wall(0, 0, 0, 8),    wall(0, 8, 12, 8),
      wall(12, 0, 12, 3),  wall(12, 5, 12, 8),  // doorway between y=3 and y=5
      wall(12, 3, 20, 3),  wall(12, 5, 20, 5),  wall(20, 3, 20, 5),
  };

  auto route = [](std::vector<Position> wp, double speed, double period,
                  double duty, double phase) {
    AgentRoute r;
    r.waypoints = std::move(wp);
    r.speed = speed;
    r.period = period;
    r.duty = duty;
    r.phase = phase;
    return r;
  };
  const auto P = [](double x, double y) { return Position{x, y, 0.0}; };
  cfg.routes = {
      route({P(2, 2), P(10, 2), P(10, 6), P(2, 6), P(2, 2)}, 1.0, 300.0, 0.5, 0.0),
      route({P(6, 4), P(11, 4), P(19, 4), P(11, 4), P(6, 4)}, 1.2, 150.0, 0.6, 10.0),
      route({P(1, 1), P(11, 7), P(1, 1)}, 1.0, 75.0, 0.4, 5.0),
      route({P(4, 1), P(4, 7), P(4, 1)}, 1.0, 150.0, 0.5, 40.0),
      route({P(13, 4), P(19.5, 4), P(13, 4)}, 0.9, 75.0, 0.8, 0.0),
      route({P(2, 7), P(10, 1)}, 1.1, 300.0, 0.3, 100.0),
  };
  return cfg;
}

ObservationStream generate_scene(const SceneConfig& cfg) {
  if (!(cfg.duration > 0.0) || !(cfg.dt > 0.0)) {
    throw std::invalid_argument("generate_scene: duration and dt must be positive");
  }
  for (const AgentRoute& r : cfg.routes) {
    check_route(r);
  }
  ObservationStream out;
  Rng rng(cfg.seed);
  for (std::int64_t k = 0; static_cast<double>(k) * cfg.dt < cfg.duration; ++k) {
    const double t = static_cast<double>(k) * cfg.dt;
    for (std::size_t i = 0; i < cfg.routes.size(); ++i) {
      const AgentRoute& r = cfg.routes[i];
      const double local = std::fmod(t + r.phase, r.period);
      if (local >= r.duty * r.period) {
        continue;
      }
      const auto sample = sample_polyline(r.waypoints, local * r.speed);
      if (!sample) {
        continue;  // finished this activation
      }
      Observation obs;
      obs.t = t;
      obs.agent_id = static_cast<int>(i);
      obs.position = sample->point;
      obs.heading = sample->heading;
      if (r.noise_sigma > 0.0) {
        obs.position.x() += r.noise_sigma * rng.normal();
        obs.position.y() += r.noise_sigma * rng.normal();
        obs.position.z() += r.noise_sigma * rng.normal();
      }
      out.push_back(obs);
    }
  }
  return out;
}

std::vector<SceneConfig> generate_dataset(int n_scenes, const SceneConfig& base,
                                          std::uint64_t master_seed) {
  if (n_scenes < 1) {
    throw std::invalid_argument("generate_dataset: need at least one scene");
  }
  std::vector<SceneConfig> out;
  out.reserve(static_cast<std::size_t>(n_scenes));
  Rng master(master_seed);
  for (int s = 0; s < n_scenes; ++s) {
    SceneConfig cfg = base;
    cfg.scene_id = s;
    cfg.seed = master.next_seed();
    Rng perturb(master.next_seed());
    for (AgentRoute& r : cfg.routes) {
      r.phase = perturb.uniform(0.0, r.period);
      r.speed *= perturb.uniform(0.85, 1.2);
    }
    out.push_back(std::move(cfg));
  }
  return out;
}

std::vector<TopologyEvent> inject_topology_events(std::uint64_t seed,
                                                  const NavGraph& graph,
                                                  double density, double duration,
                                                  double remove_fraction) {
  if (graph.node_count() == 0) {
    throw std::invalid_argument("inject_topology_events: graph is empty");
  }
  if (!(density >= 0.0 && density <= 1.0) ||
      !(remove_fraction >= 0.0 && remove_fraction <= 1.0)) {
    throw std::invalid_argument("inject_topology_events: fractions must lie in [0, 1]");
  }
  std::vector<NodeId> ids;
  ids.reserve(graph.node_count());
  for (const auto& [id, node] : graph.nodes()) {
    ids.push_back(id);
  }
  Rng rng(seed);
  // Fisher-Yates prefix: the first `count` entries are the disturbed subset.
  const auto count = static_cast<std::size_t>(
      std::llround(density * static_cast<double>(ids.size())));
  for (std::size_t i = 0; i + 1 < ids.size(); ++i) {
    const auto j = i + static_cast<std::size_t>(
                           rng.uniform_int(static_cast<std::int64_t>(ids.size() - i)));
    std::swap(ids[i], ids[j]);
  }
  std::vector<TopologyEvent> events;
  for (std::size_t i = 0; i < count && i < ids.size(); ++i) {
    TopologyEvent ev;
    ev.id = ids[i];
    ev.t = rng.uniform(0.3 * duration, 0.9 * duration);
    if (rng.uniform() < remove_fraction) {
      ev.kind = TopologyEvent::Kind::remove;
    } else {
      ev.kind = TopologyEvent::Kind::reposition;
      const double angle = rng.uniform(0.0, kTwoPi);
      const double radius = rng.uniform(0.0, 0.5);
      ev.position = graph.node(ev.id).position +
                    Position{radius * std::cos(angle), radius * std::sin(angle), 0.0};
    }
    events.push_back(ev);
  }
  std::sort(events.begin(), events.end(), [](const auto& a, const auto& b) {
    return a.t != b.t ? a.t < b.t : a.id < b.id;
  });
  return events;
}

Eigen::AlignedBox2d route_bounding_box(const std::vector<AgentRoute>& routes,
                                       double margin) {
  Eigen::AlignedBox2d box;
  for (const AgentRoute& r : routes) {
    for (const Position& p : r.waypoints) {
      box.extend(Eigen::Vector2d{p.x(), p.y()});
    }
  }
  if (box.isEmpty()) {
    throw std::invalid_argument("route_bounding_box: no waypoints");
  }
  box.min() -= Eigen::Vector2d::Constant(margin);
  box.max() += Eigen::Vector2d::Constant(margin);
  return box;
}

}  // namespace modgraph
