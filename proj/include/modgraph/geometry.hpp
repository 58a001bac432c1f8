#pragma once

#include <Eigen/Core>

#include <compare>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <vector>

namespace modgraph {

// World-frame position in meters. All pipeline inputs are expected to be
// expressed in one global frame; no transforms happen inside the library.
using Position = Eigen::Vector3d;

// Stable identifier of a navigational node.
using NodeId = std::int64_t;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Integer lattice coordinate triple identifying one sparse hash cell.
// Equality means "same cell"; ordering is lexicographic on (ix, iy, iz),
// which is what gives the global state vector its deterministic layout.
struct CellKey {
  std::int64_t ix = 0;
  std::int64_t iy = 0;
  std::int64_t iz = 0;

  friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& key) const noexcept;
};

// Wraps an angle into [-pi, pi). Throws std::invalid_argument on
// non-finite input.
double canonical_angle(double theta);

// Lattice cell containing `p` at resolution `delta`: component-wise
// floor(p/delta) with floor toward negative infinity, so negative
// coordinates hash consistently. Pure and deterministic.
CellKey hash_key(const Position& p, double delta);

// Center of a lattice cell, the representative point used when a cell
// has to be treated as a location (binding distance, rasterization).
Position cell_center(const CellKey& key, double delta);

// Quantizes a heading into one of `bins` uniform angular bins over
// [-pi, pi). theta = pi wraps to bin 0. Requires bins >= 2.
int orientation_bin(double theta, int bins);

// Center angle of bin `bin`; inverse of orientation_bin in the sense
// that orientation_bin(bin_center(b, B), B) == b for all valid b.
double bin_center(int bin, int bins);

// An opaque obstacle in the plane; z is ignored everywhere walls matter.
struct WallSegment {
  Eigen::Vector2d a = Eigen::Vector2d::Zero();
  Eigen::Vector2d b = Eigen::Vector2d::Zero();
};

// Whether segments p1-p2 and q1-q2 intersect (touching counts).
bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2);

// Whether the straight segment a-b (projected to the plane) crosses any wall.
bool line_of_sight(const Position& a, const Position& b,
                   const std::vector<WallSegment>& walls);

}  // namespace modgraph
