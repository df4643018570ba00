// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gpboot/cov_estimation.hpp"
#include "gpboot/gp_core.hpp"

namespace gpboot {

enum class NetKind { sphere, sphere_pair, grid, explicit_points };

/// Finite index net discretizing a function class. Rows of points() are the
/// index descriptors; for sphere nets they are unit vectors. delta() records
/// the measured covering resolution (0 for explicit nets).
class IndexNet {
 public:
  IndexNet(NetKind kind, Eigen::MatrixXd points, double delta);

  NetKind kind() const { return kind_; }
  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::Index size() const { return points_.rows(); }
  double delta() const { return delta_; }

 private:
  NetKind kind_;
  Eigen::MatrixXd points_;
  double delta_;
};

/// Monte Carlo draws of the supremum statistic, sorted nondecreasing,
/// together with the seed and truncation level that produced them.
struct SupSamples {
  std::vector<double> draws;
  std::uint64_t seed = 0;
  Eigen::Index m = 0;
  bool degenerate = false;  // covariance estimate was identically zero

  Eigen::Index B() const { return static_cast<Eigen::Index>(draws.size()); }
};

/// Net of `count` unit vectors in R^d: the 2d signed standard basis vectors
/// plus (count - 2d) normalized Gaussian directions drawn from rng. The
/// recorded delta is the covering radius measured against 1000 random
/// probes (drawn from the same stream after the points).
IndexNet build_sphere_net(Eigen::Index d, Eigen::Index count,
                          rng::NormalSource& rng);

/// Evaluates the linear function class f_u(x) = x'u on a net of directions:
/// entry (i, j) = data.row(i) . net.point(j).
EvaluatedSample evaluate_linear(const Eigen::MatrixXd& data,
                                const IndexNet& net);

/// B independent draws of sup_f |Z^m(f)| from the truncated KL sampler.
/// Draw b consumes its own counter stream, so results are independent of
/// evaluation order and thread count.
SupSamples sup_draws(const KLBasis& basis, Eigen::Index m, Eigen::Index b_count,
                     std::uint64_t seed, int threads = 1);

/// End-to-end Gaussian process bootstrap: sample covariance on the net,
/// spectral decomposition truncated at m (nullopt = full numerical rank),
/// then B Monte Carlo sup draws. Deterministic given the seed. An all-zero
/// covariance estimate yields all-zero draws flagged degenerate.
SupSamples gaussian_process_bootstrap(const EvaluatedSample& sample,
                                      std::optional<Eigen::Index> m,
                                      Eigen::Index b_count, std::uint64_t seed,
                                      int threads = 1);

/// Empirical alpha-quantile: the smallest draw whose empirical CDF is >= alpha
/// (the order statistic draws[ceil(alpha B)] in 1-based indexing).
double quantile(const SupSamples& samples, double alpha);

/// Kolmogorov distance between the empirical CDFs of the two draw sets.
double kolmogorov_distance(const SupSamples& a, const SupSamples& b);
double kolmogorov_distance(std::vector<double> a, std::vector<double> b);

/// Conservative level adjustment pi(delta) = K delta^{1/3} Var^{-1/3}
/// reported alongside bootstrap quantiles.
double quantile_shift(double delta, double var_hat, double k_const = 1.0);

}  // namespace gpboot
