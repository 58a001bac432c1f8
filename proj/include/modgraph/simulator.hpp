#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Geometry>

#include "modgraph/geometry.hpp"
#include "modgraph/nav_graph.hpp"

namespace modgraph {

// One periodic agent: every `period` seconds (offset by `phase`) it restarts
// its polyline and walks it at `speed` while inside the duty window, then
// disappears until the next activation.
struct AgentRoute {
  std::vector<Position> waypoints;  // at least two
  double speed = 1.0;               // m/s
  double period = 300.0;            // activation period, seconds
  double duty = 0.5;                // active fraction of each period, (0, 1]
  double phase = 0.0;               // activation offset, seconds
  double noise_sigma = 0.05;        // isotropic position noise, meters
};

struct SceneConfig {
  int scene_id = 0;
  double duration = 1200.0;  // seconds
  double dt = 0.5;           // tick, seconds
  std::uint64_t seed = 1;
  std::vector<WallSegment> walls;
  std::vector<AgentRoute> routes;
};

struct Observation {
  double t = 0.0;
  int agent_id = 0;
  Position position = Position::Zero();
  double heading = 0.0;  // radians, from noiseless velocity
};

using ObservationStream = std::vector<Observation>;

// Two-region default layout (a workspace room joined to a hallway through a
// doorway) with six periodic routes whose periods sit on the default
// candidate ladder for a 1200 s scene.
SceneConfig default_scene_config();

// Deterministic detection stream: per tick, each active agent emits
// (t, id, position + noise, heading). Same config -> bit-identical stream.
ObservationStream generate_scene(const SceneConfig& cfg);

// Scene variations of a base config: fresh seed per scene plus perturbed
// route phases and speeds, all derived from master_seed.
std::vector<SceneConfig> generate_dataset(int n_scenes, const SceneConfig& base,
                                          std::uint64_t master_seed);

// Deterministic loop-closure-style disturbance schedule: a density-controlled
// subset of nodes is repositioned by bounded planar offsets (at most 0.5 m)
// or removed, at times spread over the run. Sorted by time.
std::vector<TopologyEvent> inject_topology_events(std::uint64_t seed,
                                                  const NavGraph& graph,
                                                  double density, double duration,
                                                  double remove_fraction = 0.3);

// Axis-aligned region the routes cover, expanded by margin: the traversable
// space that node placement samples.
Eigen::AlignedBox2d route_bounding_box(const std::vector<AgentRoute>& routes,
                                       double margin = 1.0);

}  // namespace modgraph
