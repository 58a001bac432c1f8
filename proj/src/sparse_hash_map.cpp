#include "modgraph/sparse_hash_map.hpp"

#include <algorithm>
#include <stdexcept>

namespace modgraph {

SparseHashMap::SparseHashMap(double delta, int bins) : delta_(delta), bins_(bins) {
  if (!(delta > 0.0)) {
    throw std::invalid_argument("SparseHashMap: resolution must be positive");
  }
  if (bins < 2) {
    throw std::invalid_argument("SparseHashMap: need at least 2 bins");
  }
}

CellKey SparseHashMap::upsert_observation(const Position& p, double theta, double t,
                                          double weight) {
  const CellKey key = hash_key(p, delta_);
  const int bin = orientation_bin(theta, bins_);
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    if (!(weight >= 0.0)) {
      throw std::invalid_argument("SparseHashMap: weight must be non-negative");
    }
    if (weight == 0.0) {
      return key;  // zero-weight data never allocates a cell
    }
    it = cells_.emplace(key, HashCell{key, DirectionalHistogram(bins_), t}).first;
  }
  it->second.histogram.accumulate(bin, t, weight);
  return key;
}

CellKey SparseHashMap::insert_cell(HashCell cell) {
  if (cell.histogram.bins() != bins_) {
    throw std::invalid_argument("SparseHashMap::insert_cell: bin counts differ");
  }
  const CellKey key = cell.key;
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    cells_.emplace(key, std::move(cell));
  } else {
    it->second.histogram.merge(cell.histogram);
    it->second.created_t = std::min(it->second.created_t, cell.created_t);
  }
  return key;
}

const HashCell* SparseHashMap::lookup(const CellKey& key) const {
  auto it = cells_.find(key);
  return it == cells_.end() ? nullptr : &it->second;
}

std::optional<HashCell> SparseHashMap::remove_cell(const CellKey& key) {
  auto it = cells_.find(key);
  if (it == cells_.end()) {
    return std::nullopt;
  }
  std::optional<HashCell> out = std::move(it->second);
  cells_.erase(it);
  return out;
}

std::vector<CellKey> SparseHashMap::keys_ordered() const {
  std::vector<CellKey> keys;
  keys.reserve(cells_.size());
  for (const auto& [key, cell] : cells_) {
    keys.push_back(key);
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

}  // namespace modgraph
