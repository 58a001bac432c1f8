#include "modgraph/flow_histogram.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

DirectionalHistogram::DirectionalHistogram(int bins)
    : counts_(Eigen::ArrayXd::Zero(bins)), first_t_(kInf), last_t_(-kInf) {
  if (bins < 2) {
    throw std::invalid_argument("DirectionalHistogram: need at least 2 bins");
  }
}

double DirectionalHistogram::count(int bin) const {
  if (bin < 0 || bin >= bins()) {
    throw std::out_of_range("DirectionalHistogram::count: bin out of range");
  }
  return counts_[bin];
}

void DirectionalHistogram::accumulate(int bin, double t, double weight) {
  if (bin < 0 || bin >= bins()) {
    throw std::out_of_range("DirectionalHistogram::accumulate: bin out of range");
  }
  if (!(weight >= 0.0) || !std::isfinite(weight)) {
    throw std::invalid_argument("DirectionalHistogram::accumulate: weight must be non-negative");
  }
  if (!std::isfinite(t)) {
    throw std::invalid_argument("DirectionalHistogram::accumulate: time must be finite");
  }
  counts_[bin] += weight;
  first_t_ = std::min(first_t_, t);
  last_t_ = std::max(last_t_, t);
}

void DirectionalHistogram::merge(const DirectionalHistogram& other) {
  if (other.bins() != bins()) {
    throw std::invalid_argument("DirectionalHistogram::merge: bin counts differ");
  }
  counts_ += other.counts_;
  first_t_ = std::min(first_t_, other.first_t_);
  last_t_ = std::max(last_t_, other.last_t_);
}

DirectionalHistogram DirectionalHistogram::from_parts(Eigen::ArrayXd counts,
                                                      double first_t, double last_t) {
  if (counts.size() < 2) {
    throw std::invalid_argument("DirectionalHistogram::from_parts: need at least 2 bins");
  }
  if ((counts < 0.0).any()) {
    throw std::invalid_argument("DirectionalHistogram::from_parts: counts must be non-negative");
  }
  DirectionalHistogram h(static_cast<int>(counts.size()));
  if (counts.sum() > 0.0 && !(first_t <= last_t)) {
    throw std::invalid_argument("DirectionalHistogram::from_parts: invalid time bounds");
  }
  h.counts_ = std::move(counts);
  h.first_t_ = first_t;
  h.last_t_ = last_t;
  return h;
}

Eigen::ArrayXd normalize(const DirectionalHistogram& h) {
  return normalize_values(h.counts());
}

Eigen::ArrayXd normalize_values(const Eigen::ArrayXd& values) {
  const double total = values.sum();
  if (!(total > 0.0)) {
    throw EmptyHistogramError("normalize: histogram has no mass");
  }
  return values / total;
}

double flow_magnitude(const DirectionalHistogram& h, double t_floor) {
  const double total = h.total();
  if (total <= 0.0) {
    return 0.0;
  }
  const double span = h.last_t() - h.first_t();
  return total / std::max(span, t_floor);
}

CircularMean dominant_direction_values(const Eigen::ArrayXd& values,
                                       double min_resultant) {
  const double total = values.sum();
  if (!(total > 0.0)) {
    return {};
  }
  const int bins = static_cast<int>(values.size());
  double rx = 0.0;
  double ry = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double c = bin_center(b, bins);
    rx += values[b] * std::cos(c);
    ry += values[b] * std::sin(c);
  }
  rx /= total;
  ry /= total;
  const double r = std::hypot(rx, ry);
  CircularMean out;
  out.resultant_length = r;
  if (r >= min_resultant) {
    out.direction = canonical_angle(std::atan2(ry, rx));
  }
  return out;
}

CircularMean dominant_direction(const DirectionalHistogram& h, double min_resultant) {
  return dominant_direction_values(h.counts(), min_resultant);
}

double directional_entropy_values(const Eigen::ArrayXd& values) {
  const double total = values.sum();
  if (!(total > 0.0)) {
    return 0.0;
  }
  const int bins = static_cast<int>(values.size());
  double h = 0.0;
  for (int b = 0; b < bins; ++b) {
    const double p = values[b] / total;
    if (p > 0.0) {
      h -= p * std::log(p);
    }
  }
  return h / std::log(static_cast<double>(bins));
}

double directional_entropy(const DirectionalHistogram& h) {
  return directional_entropy_values(h.counts());
}

FlowDescriptor descriptor_of(const DirectionalHistogram& h, double t_floor,
                             double min_resultant) {
  FlowDescriptor d;
  d.magnitude = flow_magnitude(h, t_floor);
  const CircularMean mean = dominant_direction(h, min_resultant);
  d.dominant_direction = mean.direction;
  d.resultant_length = mean.resultant_length;
  d.entropy = directional_entropy(h);
  return d;
}

FlowDescriptor descriptor_of_values(const Eigen::ArrayXd& values, double min_resultant) {
  FlowDescriptor d;
  d.magnitude = values.sum();
  const CircularMean mean = dominant_direction_values(values, min_resultant);
  d.dominant_direction = mean.direction;
  d.resultant_length = mean.resultant_length;
  d.entropy = directional_entropy_values(values);
  return d;
}

DirectionalHistogram merge(const DirectionalHistogram& a, const DirectionalHistogram& b) {
  DirectionalHistogram out = a;
  out.merge(b);
  return out;
}

}  // namespace modgraph
