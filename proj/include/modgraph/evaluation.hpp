#pragma once

#include <optional>
#include <string>
#include <vector>

#include "modgraph/grid_model.hpp"
#include "modgraph/metrics.hpp"

namespace modgraph {

inline constexpr int kScalarHistogramBins = 20;

// Divergences between two per-cell scalar fields (entropy or flow values).
struct MetricSet {
  double js = 0.0;
  double bhattacharyya = 0.0;  // may be +infinity for disjoint histograms
  double wasserstein = 0.0;    // on raw values, units of the field
};

struct DirectionMetrics {
  // Mean per-cell angular transport in degrees; NaN when no cell qualified.
  double wasserstein_deg = 0.0;
  std::optional<double> correlation;  // absent when degenerate or too few cells
  std::size_t compared_cells = 0;     // cells entering the Wasserstein mean
  std::size_t correlated_cells = 0;   // cells entering the correlation
};

// One mode's comparison between the rasterized graph field and the grid field,
// over cells populated in both.
struct FieldComparison {
  std::size_t overlap_cells = 0;
  MetricSet entropy;
  MetricSet flow;
  DirectionMetrics direction;
};

struct SceneReport {
  int scene_id = 0;
  FieldComparison historical;
  FieldComparison predicted;
};

struct AggregateStat {
  double mean = 0.0;
  double std_dev = 0.0;      // sample (n-1); 0 for a single value
  std::size_t count = 0;     // scenes included
  std::size_t excluded = 0;  // non-finite / absent values dropped
};

struct AggregateRow {
  std::string source;     // "historical" | "predicted"
  std::string data_type;  // "entropy" | "flow" | "direction"
  std::optional<AggregateStat> js;
  std::optional<AggregateStat> bhattacharyya;
  std::optional<AggregateStat> wasserstein;
  std::optional<AggregateStat> correlation;
};

struct AggregateReport {
  std::size_t scene_count = 0;
  std::vector<AggregateRow> rows;  // 2 sources x 3 data types
};

// Shared-range histograms (kScalarHistogramBins uniform bins over the joint
// min/max) turning two scalar samples into comparable distributions.
std::pair<Eigen::ArrayXd, Eigen::ArrayXd> scalar_histograms(
    const std::vector<double>& a, const std::vector<double>& b,
    int bins = kScalarHistogramBins);

// Compares two descriptor fields over their common cells; throws
// EmptyOverlapError when they share none.
FieldComparison evaluate_fields(const DescriptorField& a, const DescriptorField& b);

// Rasterizes the graph model onto the grid's spec and compares against the
// grid's own field in the given mode.
FieldComparison evaluate_scene_mode(const NavGraph& graph, const SparseHashMap& map,
                                    const GlobalTemporalModel& temporal,
                                    const GridModel& grid, FieldMode mode,
                                    double t_eval);

SceneReport evaluate_scene(const NavGraph& graph, const SparseHashMap& map,
                           const GlobalTemporalModel& temporal, const GridModel& grid,
                           int scene_id, double t_eval);

// Per-metric mean and sample standard deviation across scenes; non-finite
// values are excluded and counted.
AggregateReport aggregate(const std::vector<SceneReport>& reports);

// Fixed-width text table: one row per source x data type.
std::string render_table(const AggregateReport& report);

}  // namespace modgraph
