#include "modgraph/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "modgraph/errors.hpp"

namespace modgraph {

namespace {

constexpr double kNormTolerance = 1e-9;

void check_distribution_pair(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q) {
  if (p.size() != q.size() || p.size() == 0) {
    throw std::invalid_argument("distribution metric: length mismatch");
  }
  for (const auto* d : {&p, &q}) {
    if ((*d < 0.0).any()) {
      throw std::invalid_argument("distribution metric: negative mass");
    }
    if (std::abs(d->sum() - 1.0) > kNormTolerance) {
      throw std::invalid_argument("distribution metric: input not normalized");
    }
  }
}

}  // namespace

double js_divergence(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q) {
  check_distribution_pair(p, q);
  double js = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double m = 0.5 * (p[i] + q[i]);
    if (p[i] > 0.0) {
      js += 0.5 * p[i] * std::log2(p[i] / m);
    }
    if (q[i] > 0.0) {
      js += 0.5 * q[i] * std::log2(q[i] / m);
    }
  }
  return std::clamp(js, 0.0, 1.0);
}

double bhattacharyya(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q) {
  check_distribution_pair(p, q);
  const double overlap = (p * q).sqrt().sum();
  if (overlap <= 0.0) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(0.0, -std::log(overlap));
}

double wasserstein_1d(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q,
                      const Eigen::ArrayXd& values) {
  check_distribution_pair(p, q);
  if (values.size() != p.size()) {
    throw std::invalid_argument("wasserstein_1d: support length mismatch");
  }
  for (Eigen::Index i = 0; i + 1 < values.size(); ++i) {
    if (!(values[i] < values[i + 1])) {
      throw std::invalid_argument("wasserstein_1d: support must be strictly increasing");
    }
  }
  double w = 0.0;
  double cdf_gap = 0.0;
  for (Eigen::Index i = 0; i + 1 < p.size(); ++i) {
    cdf_gap += p[i] - q[i];
    w += std::abs(cdf_gap) * (values[i + 1] - values[i]);
  }
  return w;
}

double wasserstein_empirical(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) {
    throw std::invalid_argument("wasserstein_empirical: empty sample");
  }
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double w = 0.0;
  double prev = 0.0;
  bool started = false;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i < a.size() && j < b.size()) {
      x = std::min(a[i], b[j]);
    } else if (i < a.size()) {
      x = a[i];
    } else {
      x = b[j];
    }
    if (started) {
      const double fa = static_cast<double>(i) / na;
      const double fb = static_cast<double>(j) / nb;
      w += std::abs(fa - fb) * (x - prev);
    }
    while (i < a.size() && a[i] == x) {
      ++i;
    }
    while (j < b.size() && b[j] == x) {
      ++j;
    }
    prev = x;
    started = true;
  }
  return w;
}

double circular_wasserstein(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q) {
  check_distribution_pair(p, q);
  const Eigen::Index bins = p.size();
  if (bins < 2) {
    throw std::invalid_argument("circular_wasserstein: need at least 2 bins");
  }
  const Eigen::ArrayXd diff = p - q;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index cut = 0; cut < bins; ++cut) {
    double cum = 0.0;
    double cost = 0.0;
    for (Eigen::Index i = 0; i + 1 < bins; ++i) {
      cum += diff[(cut + i) % bins];
      cost += std::abs(cum);
    }
    best = std::min(best, cost);
  }
  const double step_degrees = 360.0 / static_cast<double>(bins);
  return best * step_degrees;
}

double circular_correlation(const std::vector<double>& a,
                            const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2) {
    throw std::invalid_argument("circular_correlation: need paired sequences of length >= 2");
  }
  auto circular_mean = [](const std::vector<double>& angles) {
    double s = 0.0;
    double c = 0.0;
    for (double v : angles) {
      s += std::sin(v);
      c += std::cos(v);
    }
    return std::atan2(s, c);
  };
  const double mean_a = circular_mean(a);
  const double mean_b = circular_mean(b);
  double num = 0.0;
  double den_a = 0.0;
  double den_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double sa = std::sin(a[i] - mean_a);
    const double sb = std::sin(b[i] - mean_b);
    num += sa * sb;
    den_a += sa * sa;
    den_b += sb * sb;
  }
  if (den_a < 1e-12 || den_b < 1e-12) {
    throw UndefinedResultError("circular_correlation: a field is constant");
  }
  return std::clamp(num / std::sqrt(den_a * den_b), -1.0, 1.0);
}

}  // namespace modgraph
