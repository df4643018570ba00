// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/bootstrap_engine.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpboot/parallel.hpp"

namespace gpboot {

namespace {

constexpr Eigen::Index kCoveringProbes = 1000;

Eigen::VectorXd unit_gaussian_direction(Eigen::Index d,
                                        rng::NormalSource& rng) {
  Eigen::VectorXd v(d);
  double norm = 0.0;
  do {
    for (Eigen::Index i = 0; i < d; ++i) v[i] = rng.next();
    norm = v.norm();
  } while (norm == 0.0);
  return v / norm;
}

double covering_radius(const Eigen::MatrixXd& points, Eigen::Index probes,
                       rng::NormalSource& rng) {
  const Eigen::Index d = points.cols();
  double radius = 0.0;
  for (Eigen::Index p = 0; p < probes; ++p) {
    const Eigen::VectorXd probe = unit_gaussian_direction(d, rng);
    // |q - p|^2 = 2 - 2 q.p on the unit sphere
    const double best = (points * probe).maxCoeff();
    radius = std::max(radius, std::sqrt(std::max(0.0, 2.0 - 2.0 * best)));
  }
  return radius;
}

}  // namespace

IndexNet::IndexNet(NetKind kind, Eigen::MatrixXd points, double delta)
    : kind_(kind), points_(std::move(points)), delta_(delta) {
  if (points_.rows() == 0) throw EmptyNet("index net has no points");
  if (!points_.allFinite()) throw InvalidArgument("net points must be finite");
  if (delta_ < 0) throw InvalidArgument("net delta must be nonnegative");
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < points_.rows(); ++j) {
      if (points_.row(i) == points_.row(j)) {
        throw InvalidArgument("net points must be pairwise distinct");
      }
    }
    if (kind_ == NetKind::sphere &&
        std::abs(points_.row(i).norm() - 1.0) > 1e-12) {
      throw InvalidArgument("sphere net point " + std::to_string(i) +
                            " is not a unit vector");
    }
  }
}

IndexNet build_sphere_net(Eigen::Index d, Eigen::Index count,
                          rng::NormalSource& rng) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (count < 2 * d) {
    throw TooFewPoints("sphere net needs count >= 2d = " +
                       std::to_string(2 * d));
  }
  if (d == 1 && count > 2) {
    throw InvalidArgument("the sphere in 1D has exactly two points");
  }
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(count, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    points(i, i) = 1.0;
    points(d + i, i) = -1.0;
  }
  for (Eigen::Index r = 2 * d; r < count; ++r) {
    points.row(r) = unit_gaussian_direction(d, rng).transpose();
  }
  const double delta =
      d == 1 ? 0.0 : covering_radius(points, kCoveringProbes, rng);
  return IndexNet(NetKind::sphere, std::move(points), delta);
}

EvaluatedSample evaluate_linear(const Eigen::MatrixXd& data,
                                const IndexNet& net) {
  if (data.cols() != net.points().cols()) {
    throw DimensionMismatch("data dimension " + std::to_string(data.cols()) +
                            " != net dimension " +
                            std::to_string(net.points().cols()));
  }
  return EvaluatedSample(data * net.points().transpose());
}

SupSamples sup_draws(const KLBasis& basis, Eigen::Index m, Eigen::Index b_count,
                     std::uint64_t seed, int threads) {
  if (b_count < 1) throw InvalidArgument("Monte Carlo size must be positive");
  SupSamples samples;
  samples.seed = seed;
  samples.m = m;
  samples.draws.assign(static_cast<std::size_t>(b_count), 0.0);
  if (basis.rank() == 0) {
    samples.degenerate = true;
    return samples;
  }
  if (m < 1) throw InvalidArgument("truncation level must be >= 1");
  if (m > basis.rank()) {
    throw RankExceeded("m = " + std::to_string(m) + " exceeds rank " +
                       std::to_string(basis.rank()));
  }
  parallel_for(b_count, threads, [&](std::int64_t b) {
    rng::GaussianStream stream(
        seed, rng::stream_id(rng::tag::kKlDraw, static_cast<std::uint64_t>(b)));
    samples.draws[static_cast<std::size_t>(b)] =
        sup_abs(kl_sample(basis, m, stream));
  });
  std::sort(samples.draws.begin(), samples.draws.end());
  return samples;
}

SupSamples gaussian_process_bootstrap(const EvaluatedSample& sample,
                                      std::optional<Eigen::Index> m,
                                      Eigen::Index b_count, std::uint64_t seed,
                                      int threads) {
  if (b_count < 100) {
    throw InvalidArgument("Monte Carlo size must be >= 100, got " +
                          std::to_string(b_count));
  }
  const CovMatrix cov = sample_cov_function(sample);
  const KLBasis basis = eigendecompose_psd(cov);
  const Eigen::Index level = m.value_or(basis.rank());
  if (basis.rank() == 0) {
    SupSamples samples;
    samples.seed = seed;
    samples.m = 0;
    samples.degenerate = true;
    samples.draws.assign(static_cast<std::size_t>(b_count), 0.0);
    return samples;
  }
  return sup_draws(basis, level, b_count, seed, threads);
}

double quantile(const SupSamples& samples, double alpha) {
  if (samples.draws.empty()) throw InvalidArgument("no draws");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw AlphaOutOfRange("alpha must lie in (0,1), got " +
                          std::to_string(alpha));
  }
  const double b = static_cast<double>(samples.draws.size());
  auto cdf_at = [b](Eigen::Index k) { return static_cast<double>(k) / b; };
  Eigen::Index k = static_cast<Eigen::Index>(std::ceil(alpha * b));
  k = std::clamp<Eigen::Index>(k, 1, samples.B());
  // Smallest order statistic whose empirical CDF reaches alpha; the
  // adjustment absorbs floating point slop in ceil(alpha * B).
  while (k > 1 && cdf_at(k - 1) >= alpha) --k;
  while (k < samples.B() && cdf_at(k) < alpha) ++k;
  return samples.draws[static_cast<std::size_t>(k - 1)];
}

double kolmogorov_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("empty sample set");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double dist = 0.0;
  while (i < a.size() || j < b.size()) {
    double x;
    if (i == a.size()) {
      x = b[j];
    } else if (j == b.size()) {
      x = a[i];
    } else {
      x = std::min(a[i], b[j]);
    }
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    dist = std::max(dist, std::abs(static_cast<double>(i) / na -
                                   static_cast<double>(j) / nb));
  }
  return dist;
}

double kolmogorov_distance(const SupSamples& a, const SupSamples& b) {
  return kolmogorov_distance(a.draws, b.draws);
}

double quantile_shift(double delta, double var_hat, double k_const) {
  if (delta < 0) throw InvalidArgument("delta must be nonnegative");
  if (k_const <= 0) throw InvalidArgument("K must be positive");
  if (!(var_hat > 0)) {
    throw NonpositiveVariance("variance must be positive, got " +
                              std::to_string(var_hat));
  }
  return k_const * std::cbrt(delta) / std::cbrt(var_hat);
}

}  // namespace gpboot
