#include "modgraph/grid_model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

bool GridSpec::contains(const Position& p) const {
  const double rx = p.x() - origin.x();
  const double ry = p.y() - origin.y();
  const int cx = static_cast<int>(std::floor(rx / resolution));
  const int cy = static_cast<int>(std::floor(ry / resolution));
  return cx >= 0 && cx < nx && cy >= 0 && cy < ny;
}

std::pair<int, int> GridSpec::cell_of(const Position& p) const {
  if (!contains(p)) {
    throw OutOfBoundsError("GridSpec: position outside grid bounds");
  }
  const int cx = static_cast<int>(std::floor((p.x() - origin.x()) / resolution));
  const int cy = static_cast<int>(std::floor((p.y() - origin.y()) / resolution));
  return {cx, cy};
}

Position GridSpec::center_of(int cx, int cy) const {
  return Position{origin.x() + (cx + 0.5) * resolution,
                  origin.y() + (cy + 0.5) * resolution, 0.0};
}

GridModel::GridModel(const GridSpec& spec, int bins,
                     std::vector<double> candidate_periods, int order)
    : spec_(spec), temporal_(std::move(candidate_periods), order, bins) {
  if (spec.nx <= 0 || spec.ny <= 0) {
    throw std::invalid_argument("GridModel: grid dimensions must be positive");
  }
  if (!(spec.resolution > 0.0)) {
    throw std::invalid_argument("GridModel: resolution must be positive");
  }
  if (spec.cell_count() > kMaxGridCells) {
    throw std::invalid_argument(
        "GridModel: dense grid would exceed the allocation cap; "
        "bounds this large need the sparse representation");
  }
  const auto cells = static_cast<Eigen::Index>(spec.cell_count());
  counts_ = Eigen::MatrixXd::Zero(cells, bins);
  first_t_ = Eigen::VectorXd::Constant(cells, kInf);
  last_t_ = Eigen::VectorXd::Constant(cells, -kInf);
}

std::size_t GridModel::row_of(int cx, int cy) const {
  if (cx < 0 || cx >= spec_.nx || cy < 0 || cy >= spec_.ny) {
    throw OutOfBoundsError("GridModel: cell index outside grid");
  }
  return static_cast<std::size_t>(cy) * static_cast<std::size_t>(spec_.nx) +
         static_cast<std::size_t>(cx);
}

void GridModel::accumulate(const Position& p, double theta, double t, double weight) {
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("GridModel::accumulate: weight must be non-negative");
  }
  const auto [cx, cy] = spec_.cell_of(p);  // throws OutOfBoundsError
  const int bin = orientation_bin(theta, bins());
  const auto row = static_cast<Eigen::Index>(row_of(cx, cy));
  counts_(row, bin) += weight;
  first_t_[row] = std::min(first_t_[row], t);
  last_t_[row] = std::max(last_t_[row], t);
}

Eigen::ArrayXd GridModel::cell_counts(int cx, int cy) const {
  return counts_.row(static_cast<Eigen::Index>(row_of(cx, cy))).array().transpose();
}

DirectionalHistogram GridModel::cell_histogram(int cx, int cy) const {
  const auto row = static_cast<Eigen::Index>(row_of(cx, cy));
  return DirectionalHistogram::from_parts(cell_counts(cx, cy), first_t_[row],
                                          last_t_[row]);
}

double GridModel::cell_total(int cx, int cy) const {
  return counts_.row(static_cast<Eigen::Index>(row_of(cx, cy))).sum();
}

Eigen::ArrayXd GridModel::predict_cell(int cx, int cy, double t) const {
  row_of(cx, cy);  // bounds check
  return temporal_.predict_location(CellKey{cx, cy, 0}, t);
}

DescriptorField grid_descriptor_field(const GridModel& gm, FieldMode mode, double t) {
  DescriptorField field;
  const GridSpec& spec = gm.spec();
  for (int cy = 0; cy < spec.ny; ++cy) {
    for (int cx = 0; cx < spec.nx; ++cx) {
      if (mode == FieldMode::historical) {
        if (gm.cell_total(cx, cy) <= 0.0) {
          continue;
        }
        CellDescriptor cd;
        const DirectionalHistogram hist = gm.cell_histogram(cx, cy);
        cd.bins = hist.counts();
        cd.descriptor = descriptor_of(hist);
        field.emplace(GridIndex{cx, cy}, std::move(cd));
      } else {
        if (!gm.temporal().has_location(CellKey{cx, cy, 0})) {
          continue;
        }
        CellDescriptor cd;
        cd.bins = gm.predict_cell(cx, cy, t);
        cd.descriptor = descriptor_of_values(cd.bins);
        field.emplace(GridIndex{cx, cy}, std::move(cd));
      }
    }
  }
  return field;
}

namespace {

// Accumulates one source vector into the field cell covering p, summing with
// whatever is already there.
void deposit(DescriptorField& field, const GridSpec& spec, const Position& p,
             const Eigen::ArrayXd& bins) {
  if (!spec.contains(p)) {
    return;
  }
  const auto idx = spec.cell_of(p);
  auto it = field.find(idx);
  if (it == field.end()) {
    CellDescriptor cd;
    cd.bins = bins;
    field.emplace(idx, std::move(cd));
  } else {
    it->second.bins += bins;
  }
}

}  // namespace

DescriptorField rasterize_graph_model(const NavGraph& graph, const SparseHashMap& map,
                                      const GlobalTemporalModel& temporal,
                                      const GridSpec& spec, FieldMode mode, double t) {
  DescriptorField field;
  // Time bounds per field cell so historical flow rates survive the merge.
  std::map<GridIndex, std::pair<double, double>> spans;

  auto merge_span = [&](const GridIndex& idx, double first, double last) {
    auto [it, fresh] = spans.emplace(idx, std::pair{first, last});
    if (!fresh) {
      it->second.first = std::min(it->second.first, first);
      it->second.second = std::max(it->second.second, last);
    }
  };

  if (mode == FieldMode::historical) {
    for (const auto& [id, node] : graph.nodes()) {
      if (!node.owned_dynamics) {
        continue;
      }
      deposit(field, spec, node.position, node.owned_dynamics->counts());
      if (spec.contains(node.position)) {
        merge_span(spec.cell_of(node.position), node.owned_dynamics->first_t(),
                   node.owned_dynamics->last_t());
      }
    }
    for (const CellKey& key : map.keys_ordered()) {
      const HashCell* cell = map.lookup(key);
      const Position center = cell_center(key, map.delta());
      deposit(field, spec, center, cell->histogram.counts());
      if (spec.contains(center)) {
        merge_span(spec.cell_of(center), cell->histogram.first_t(),
                   cell->histogram.last_t());
      }
    }
    for (auto& [idx, cd] : field) {
      const auto& [first, last] = spans.at(idx);
      cd.descriptor =
          descriptor_of(DirectionalHistogram::from_parts(cd.bins, first, last));
    }
    return field;
  }

  // Predicted mode: a node's vector is the summed prediction over its bound
  // keys (channels keep the keys they were observed under).
  for (const auto& [id, node] : graph.nodes()) {
    if (node.bound_keys.empty()) {
      continue;
    }
    Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(temporal.bins());
    bool any = false;
    for (const CellKey& key : node.bound_keys) {
      if (temporal.has_location(key)) {
        sum += temporal.predict_location(key, t);
        any = true;
      }
    }
    if (any) {
      deposit(field, spec, node.position, sum);
    }
  }
  for (const CellKey& key : map.keys_ordered()) {
    if (!temporal.has_location(key)) {
      continue;
    }
    deposit(field, spec, cell_center(key, map.delta()), temporal.predict_location(key, t));
  }
  for (auto& [idx, cd] : field) {
    cd.descriptor = descriptor_of_values(cd.bins);
  }
  return field;
}

}  // namespace modgraph
