#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "modgraph/evaluation.hpp"
#include "modgraph/grid_model.hpp"
#include "modgraph/nav_graph.hpp"
#include "modgraph/pipeline.hpp"
#include "modgraph/planner.hpp"
#include "modgraph/simulator.hpp"

namespace modgraph {

// Shortest decimal form that parses back to the identical double (so every
// writer below round-trips losslessly and snapshots are byte-stable).
std::string format_double(double v);

// Observation stream: one record per line, "t agent x y z theta".
// '#' lines are comments. Parse failures carry the 1-based line number.
void write_stream(std::ostream& os, const ObservationStream& stream);
ObservationStream read_stream(std::istream& is);

// Topology events: "t kind id x y z" per line (zeros where unused).
void write_events(std::ostream& os, const std::vector<TopologyEvent>& events);
std::vector<TopologyEvent> read_events(std::istream& is);

// Scene config: scene/wall/route records.
void write_scene_config(std::ostream& os, const SceneConfig& cfg);
SceneConfig read_scene_config(std::istream& is);

// Graph: "node id x y z" and "edge a b" records (positions and topology only;
// owned dynamics live in the model snapshot).
void write_graph(std::ostream& os, const NavGraph& graph);
NavGraph read_graph(std::istream& is);

// Full model snapshot: parameters, graph with owned dynamics and bound keys,
// hash cells, and every spectral channel. Deterministic order, lossless.
void write_model_snapshot(std::ostream& os, const BuiltModel& model);
BuiltModel read_model_snapshot(std::istream& is);

// Descriptor field dump: "cx cy total flow direction entropy" per cell
// ("na" for an absent direction).
void write_field(std::ostream& os, const DescriptorField& field);

// Per-scene machine-readable metric records (CSV with header).
void write_scene_reports_csv(std::ostream& os, const std::vector<SceneReport>& reports);

// Plan record: the node path, per-edge cost breakdown, total.
void write_plan(std::ostream& os, const PlanResult& plan);

// File helpers (open + delegate; throw std::runtime_error on IO failure).
void save_text_file(const std::string& path, const std::string& content);
std::string load_text_file(const std::string& path);

}  // namespace modgraph
