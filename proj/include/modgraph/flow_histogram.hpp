#pragma once

#include <optional>

#include <Eigen/Dense>

#include "modgraph/geometry.hpp"

namespace modgraph {

// Minimum rate denominator: keeps single-instant histories from blowing up.
inline constexpr double kDefaultTFloor = 1.0;
// Resultant lengths below this report no dominant direction.
inline constexpr double kDefaultDirEps = 0.05;
inline constexpr int kDefaultBins = 8;

// Per-location directional activity: a non-negative event accumulator per
// orientation bin plus the time span the events cover.
class DirectionalHistogram {
 public:
  explicit DirectionalHistogram(int bins = kDefaultBins);

  int bins() const { return static_cast<int>(counts_.size()); }
  const Eigen::ArrayXd& counts() const { return counts_; }
  double count(int bin) const;
  double total() const { return counts_.sum(); }
  bool empty() const { return total() == 0.0; }

  // Time bounds of accumulated events; meaningful only when total() > 0 or at
  // least one (possibly zero-weight) event arrived.
  double first_t() const { return first_t_; }
  double last_t() const { return last_t_; }
  bool has_time_bounds() const { return first_t_ <= last_t_; }

  void accumulate(int bin, double t, double weight = 1.0);
  void merge(const DirectionalHistogram& other);

  static DirectionalHistogram from_parts(Eigen::ArrayXd counts, double first_t,
                                         double last_t);

 private:
  Eigen::ArrayXd counts_;
  double first_t_;
  double last_t_;
};

struct FlowDescriptor {
  double magnitude = 0.0;                    // events per second
  std::optional<double> dominant_direction;  // radians in [-pi, pi)
  double resultant_length = 0.0;             // in [0, 1]
  double entropy = 0.0;                      // normalized, in [0, 1]
};

struct CircularMean {
  std::optional<double> direction;
  double resultant_length = 0.0;
};

// counts / total; throws EmptyHistogramError when total is 0.
Eigen::ArrayXd normalize(const DirectionalHistogram& h);
Eigen::ArrayXd normalize_values(const Eigen::ArrayXd& values);

double flow_magnitude(const DirectionalHistogram& h, double t_floor = kDefaultTFloor);

CircularMean dominant_direction(const DirectionalHistogram& h,
                                double min_resultant = kDefaultDirEps);
CircularMean dominant_direction_values(const Eigen::ArrayXd& values,
                                       double min_resultant = kDefaultDirEps);

double directional_entropy(const DirectionalHistogram& h);
double directional_entropy_values(const Eigen::ArrayXd& values);

FlowDescriptor descriptor_of(const DirectionalHistogram& h,
                             double t_floor = kDefaultTFloor,
                             double min_resultant = kDefaultDirEps);

// Descriptor for a predicted per-bin activity vector: magnitude is the summed
// activity, direction and entropy come from the vector's shape.
FlowDescriptor descriptor_of_values(const Eigen::ArrayXd& values,
                                    double min_resultant = kDefaultDirEps);

DirectionalHistogram merge(const DirectionalHistogram& a, const DirectionalHistogram& b);

}  // namespace modgraph
