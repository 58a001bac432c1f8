#pragma once

#include <map>
#include <set>
#include <vector>

#include "modgraph/grid_model.hpp"
#include "modgraph/nav_graph.hpp"
#include "modgraph/ownership.hpp"
#include "modgraph/simulator.hpp"
#include "modgraph/sparse_hash_map.hpp"
#include "modgraph/temporal_model.hpp"

namespace modgraph {

struct ModelParams {
  double delta = kDefaultDelta;
  int bins = kDefaultBins;
  double d_max = 1.0;  // association radius for position-based node queries
  double tau = kDefaultTau;
  double bind_radius = kDefaultBindRadius;
  int order = kDefaultSpectralOrder;
  double update_interval = kDefaultUpdateInterval;
  std::vector<double> candidate_periods;  // empty: derive the default ladder
};

// Fills in the candidate ladder from the scene duration when none was given.
ModelParams resolve_params(ModelParams params, double duration);

struct BuiltModel {
  ModelParams params;
  NavGraph graph;
  SparseHashMap map;
  OwnershipState ownership;
  GlobalTemporalModel temporal;
};

// Shared windowing engine: counts per-channel events inside the current
// update window, and at each boundary ingests range-normalized values for
// every known location (all-zero windows ingest explicit zeros, which is what
// lets the spectral model see inactivity as part of the cycle).
class WindowAccumulator {
 public:
  WindowAccumulator(double interval, int bins);

  double interval() const { return interval_; }
  double window_start() const { return window_start_; }

  void note(const CellKey& key, int bin, double weight);

  // Ingests the window [window_start, boundary) at its midpoint and starts
  // the next window there.
  void flush_one(double boundary, GlobalTemporalModel& model);

  // Flushes every complete window ending at or before t.
  void advance(double t, GlobalTemporalModel& model);

  // Flushes complete windows, then the final partial window if any.
  void finish(double end_time, GlobalTemporalModel& model);

  // Carries scratch counts and known-location status from one cell to
  // another (ownership release into a different cell).
  void remap(const CellKey& from, const CellKey& to);

  const std::set<CellKey>& known_locations() const { return known_; }

 private:
  double interval_;
  int bins_;
  double window_start_ = 0.0;
  std::map<ChannelKey, double> counts_;
  std::set<CellKey> known_;
};

// Time-ordered replay of observations and topology events into one model:
// routes observations through the redirect table, counts them into update
// windows, binds stable cells at every window boundary, and keeps the
// temporal channels keyed by where data was observed.
class ModelBuilder {
 public:
  ModelBuilder(ModelParams params, NavGraph graph);

  void observe(const Observation& obs);
  void apply_topology(const TopologyEvent& ev);

  // Flushes the tail window, runs a final bind, publishes the spectrum, and
  // hands the model over.
  BuiltModel finish(double end_time);

  const NavGraph& graph() const { return graph_; }
  const SparseHashMap& map() const { return map_; }
  const OwnershipState& ownership() const { return ownership_; }
  const GlobalTemporalModel& temporal() const { return temporal_; }

 private:
  void advance_to(double t);
  void handle_release(const ReleaseResult& res);

  ModelParams params_;
  NavGraph graph_;
  SparseHashMap map_;
  OwnershipState ownership_;
  GlobalTemporalModel temporal_;
  WindowAccumulator window_;
  double now_ = 0.0;
};

// Same replay context for the dense baseline (no topology, no ownership).
class GridBuilder {
 public:
  GridBuilder(const GridSpec& spec, const ModelParams& params);

  void observe(const Observation& obs);
  GridModel finish(double end_time);

 private:
  GridModel grid_;
  WindowAccumulator window_;
  double now_ = 0.0;
};

// Grid bounds covering the scene's routes plus a margin, with the origin
// snapped onto the hash lattice so grid cells and hash cells can line up.
GridSpec grid_spec_for_scene(const SceneConfig& cfg, double resolution,
                             double margin = 2.0);

// Convenience drivers: merge the streams by time (events first on ties) and
// replay. Observations and events must each be time-sorted.
BuiltModel build_model(const ObservationStream& stream,
                       const std::vector<TopologyEvent>& events, ModelParams params,
                       NavGraph graph, double end_time);

GridModel build_grid_model(const ObservationStream& stream, const GridSpec& spec,
                           const ModelParams& params, double end_time);

}  // namespace modgraph
