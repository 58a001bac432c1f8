#pragma once

#include <vector>

#include <Eigen/Dense>

#include "modgraph/geometry.hpp"

namespace modgraph {

// Jensen-Shannon divergence with base-2 logs: 0 for identical distributions,
// 1 for disjoint ones. Inputs must be normalized to the same length.
double js_divergence(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q);

// Bhattacharyya distance -ln sum(sqrt(p*q)); +infinity for disjoint supports.
double bhattacharyya(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q);

// 1-Wasserstein between two distributions over the same ordered support
// coordinates, via integrated CDF difference. Units follow `values`.
double wasserstein_1d(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q,
                      const Eigen::ArrayXd& values);

// 1-Wasserstein between two empirical samples (equal per-point weights,
// lengths may differ).
double wasserstein_empirical(std::vector<double> a, std::vector<double> b);

// 1-Wasserstein on the circle of angular bins, reported in degrees: the
// minimum over the B cyclic cut points of the linear distance. At most 180.
double circular_wasserstein(const Eigen::ArrayXd& p, const Eigen::ArrayXd& q);

// Fisher-Lee circular correlation of two paired angle sequences, in [-1, 1].
// Throws UndefinedResultError when either field is (numerically) constant.
double circular_correlation(const std::vector<double>& a,
                            const std::vector<double>& b);

}  // namespace modgraph
