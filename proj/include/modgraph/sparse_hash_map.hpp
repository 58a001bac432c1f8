#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "modgraph/flow_histogram.hpp"
#include "modgraph/geometry.hpp"

namespace modgraph {

inline constexpr double kDefaultDelta = 0.5;

struct HashCell {
  CellKey key;
  DirectionalHistogram histogram;
  double created_t = 0.0;  // time of the first observation stored here
};

// Sparse allocation-on-write store of directional histograms. Cells exist
// only for keys that have received data; storage scales with visited
// locations, never with the coordinate span.
class SparseHashMap {
 public:
  explicit SparseHashMap(double delta = kDefaultDelta, int bins = kDefaultBins);

  double delta() const { return delta_; }
  int bins() const { return bins_; }

  // Accumulates one observation into the cell covering p, allocating the cell
  // on first write. Returns the key touched.
  CellKey upsert_observation(const Position& p, double theta, double t,
                             double weight = 1.0);

  // Inserts or merges an already-built cell (used by ownership release).
  // Returns the key it now lives under.
  CellKey insert_cell(HashCell cell);

  const HashCell* lookup(const CellKey& key) const;
  std::optional<HashCell> remove_cell(const CellKey& key);

  std::vector<CellKey> keys_ordered() const;
  std::size_t occupied_count() const { return cells_.size(); }

  const std::unordered_map<CellKey, HashCell, CellKeyHash>& cells() const {
    return cells_;
  }

 private:
  double delta_;
  int bins_;
  std::unordered_map<CellKey, HashCell, CellKeyHash> cells_;
};

}  // namespace modgraph
