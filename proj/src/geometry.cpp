#include "modgraph/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace modgraph {

std::size_t CellKeyHash::operator()(const CellKey& key) const noexcept {
  // splitmix64 finalizer, chained over the three indices.
  auto mix = [](std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  };
  std::uint64_t h = mix(static_cast<std::uint64_t>(key.ix));
  h = mix(h ^ static_cast<std::uint64_t>(key.iy));
  h = mix(h ^ static_cast<std::uint64_t>(key.iz));
  return static_cast<std::size_t>(h);
}

double canonical_angle(double theta) {
  if (!std::isfinite(theta)) {
    throw std::invalid_argument("canonical_angle: angle must be finite");
  }
  double t = std::fmod(theta + kPi, kTwoPi);
  if (t < 0.0) {
    t += kTwoPi;
  }
  double wrapped = t - kPi;
  // fmod can land exactly on 2*pi after the sign fix; keep the half-open range.
  if (wrapped >= kPi) {
    wrapped = -kPi;
  }
  return wrapped;
}

CellKey hash_key(const Position& p, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("hash_key: resolution must be positive and finite");
  }
  if (!p.allFinite()) {
    throw std::invalid_argument("hash_key: position must be finite");
  }
  auto index = [delta](double v) {
    return static_cast<std::int64_t>(std::floor(v / delta));
  };
  return CellKey{index(p.x()), index(p.y()), index(p.z())};
}

Position cell_center(const CellKey& key, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw std::invalid_argument("cell_center: resolution must be positive and finite");
  }
  return Position{(static_cast<double>(key.ix) + 0.5) * delta,
                  (static_cast<double>(key.iy) + 0.5) * delta,
                  (static_cast<double>(key.iz) + 0.5) * delta};
}

int orientation_bin(double theta, int bins) {
  if (bins < 2) {
    throw std::invalid_argument("orientation_bin: need at least 2 bins");
  }
  const double t = canonical_angle(theta);
  const double width = kTwoPi / static_cast<double>(bins);
  auto b = static_cast<std::int64_t>(std::floor((t + kPi) / width));
  // Rounding at the upper seam can produce b == bins; fold it back.
  b %= bins;
  if (b < 0) {
    b += bins;
  }
  return static_cast<int>(b);
}

double bin_center(int bin, int bins) {
  if (bins < 2) {
    throw std::invalid_argument("bin_center: need at least 2 bins");
  }
  if (bin < 0 || bin >= bins) {
    throw std::invalid_argument("bin_center: bin index out of range");
  }
  return -kPi + (static_cast<double>(bin) + 0.5) * (kTwoPi / static_cast<double>(bins));
}

namespace {

int orientation_sign(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                     const Eigen::Vector2d& c) {
  const double cross = (b.x() - a.x()) * (c.y() - a.y()) -
                       (b.y() - a.y()) * (c.x() - a.x());
  if (cross > 0.0) {
    return 1;
  }
  if (cross < 0.0) {
    return -1;
  }
  return 0;
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                const Eigen::Vector2d& p) {
  return p.x() >= std::min(a.x(), b.x()) && p.x() <= std::max(a.x(), b.x()) &&
         p.y() >= std::min(a.y(), b.y()) && p.y() <= std::max(a.y(), b.y());
}

}  // namespace

bool segments_intersect(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2,
                        const Eigen::Vector2d& q1, const Eigen::Vector2d& q2) {
  const int o1 = orientation_sign(p1, p2, q1);
  const int o2 = orientation_sign(p1, p2, q2);
  const int o3 = orientation_sign(q1, q2, p1);
  const int o4 = orientation_sign(q1, q2, p2);
  if (o1 != o2 && o3 != o4) {
    return true;
  }
  if (o1 == 0 && on_segment(p1, p2, q1)) {
    return true;
  }
  if (o2 == 0 && on_segment(p1, p2, q2)) {
    return true;
  }
  if (o3 == 0 && on_segment(q1, q2, p1)) {
    return true;
  }
  return o4 == 0 && on_segment(q1, q2, p2);
}

bool line_of_sight(const Position& a, const Position& b,
                   const std::vector<WallSegment>& walls) {
  const Eigen::Vector2d a2{a.x(), a.y()};
  const Eigen::Vector2d b2{b.x(), b.y()};
  for (const WallSegment& wall : walls) {
    if (segments_intersect(a2, b2, wall.a, wall.b)) {
      return false;
    }
  }
  return true;
}

}  // namespace modgraph
