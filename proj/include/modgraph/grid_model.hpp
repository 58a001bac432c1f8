#pragma once

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "modgraph/flow_histogram.hpp"
#include "modgraph/geometry.hpp"
#include "modgraph/nav_graph.hpp"
#include "modgraph/sparse_hash_map.hpp"
#include "modgraph/temporal_model.hpp"

namespace modgraph {

inline constexpr double kDefaultGridResolution = 0.5;
// Dense grids allocate every cell up front; beyond this we refuse instead of
// exhausting memory. The sparse store has no such limit by construction.
inline constexpr std::size_t kMaxGridCells = 2'000'000;

struct GridSpec {
  Position origin = Position::Zero();  // lower corner in x/y; z is ignored
  double resolution = kDefaultGridResolution;
  int nx = 0;
  int ny = 0;

  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny);
  }
  bool contains(const Position& p) const;
  // Cell indices covering p; throws OutOfBoundsError outside the bounds.
  std::pair<int, int> cell_of(const Position& p) const;
  Position center_of(int cx, int cy) const;
};

// Reference dense-grid model: fixed 2D bounds, one histogram row per cell
// allocated up front, and the same spectral machinery as the graph model
// (channels keyed by CellKey{cx, cy, 0}).
class GridModel {
 public:
  GridModel(const GridSpec& spec, int bins, std::vector<double> candidate_periods,
            int order = kDefaultSpectralOrder);

  const GridSpec& spec() const { return spec_; }
  int bins() const { return static_cast<int>(counts_.cols()); }

  void accumulate(const Position& p, double theta, double t, double weight = 1.0);

  Eigen::ArrayXd cell_counts(int cx, int cy) const;
  DirectionalHistogram cell_histogram(int cx, int cy) const;
  double cell_total(int cx, int cy) const;
  double total() const { return counts_.sum(); }
  std::size_t allocated_cells() const { return spec_.cell_count(); }

  // Per-bin predicted activity for one grid cell; not-found when the cell has
  // never produced a temporal measurement.
  Eigen::ArrayXd predict_cell(int cx, int cy, double t) const;

  GlobalTemporalModel& temporal() { return temporal_; }
  const GlobalTemporalModel& temporal() const { return temporal_; }

 private:
  std::size_t row_of(int cx, int cy) const;

  GridSpec spec_;
  Eigen::MatrixXd counts_;   // (nx*ny) x B, dense by design
  Eigen::VectorXd first_t_;  // per cell, +inf when untouched
  Eigen::VectorXd last_t_;   // per cell, -inf when untouched
  GlobalTemporalModel temporal_;
};

// One rasterized cell of either model: the raw per-bin vector (historical
// counts or predicted activity) plus descriptors derived from it.
struct CellDescriptor {
  Eigen::ArrayXd bins;
  FlowDescriptor descriptor;
};

using GridIndex = std::pair<int, int>;
using DescriptorField = std::map<GridIndex, CellDescriptor>;

enum class FieldMode { historical, predicted };

// Field of every non-empty grid cell.
DescriptorField grid_descriptor_field(const GridModel& gm, FieldMode mode, double t);

// Projects the graph model onto a grid: node-owned dynamics deposit at node
// positions, unbound cells at their centers; sources sharing a grid cell
// merge; sources outside the bounds are dropped.
DescriptorField rasterize_graph_model(const NavGraph& graph, const SparseHashMap& map,
                                      const GlobalTemporalModel& temporal,
                                      const GridSpec& spec, FieldMode mode, double t);

}  // namespace modgraph
