// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/ellipsoid.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "gpboot/parallel.hpp"

namespace gpboot {

InfluenceSample::InfluenceSample(Eigen::MatrixXd psi) : psi_(std::move(psi)) {
  if (psi_.rows() < 1 || psi_.cols() < 1) {
    throw InvalidArgument("influence sample must be nonempty");
  }
  if (!psi_.allFinite()) {
    throw InvalidArgument("influence entries must be finite");
  }
}

CovMatrix influence_cov(const InfluenceSample& sample) {
  if (sample.n() < 2) {
    throw TooFewSamples("influence covariance needs n >= 2");
  }
  return sample_cov_function(EvaluatedSample(sample.psi()));
}

SupSamples euclidean_norm_draws(const KLBasis& basis, Eigen::Index m,
                                Eigen::Index b_count, std::uint64_t seed,
                                int threads) {
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
  if (m > basis.rank()) throw RankExceeded("m exceeds basis rank");
  const Eigen::VectorXd lambda = basis.eigenvalues().head(m);
  parallel_for(b_count, threads, [&](std::int64_t b) {
    rng::GaussianStream stream(
        seed, rng::stream_id(rng::tag::kKlDraw, static_cast<std::uint64_t>(b)));
    double sum = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) {
      const double xi = stream.next();
      sum += lambda[k] * xi * xi;
    }
    samples.draws[static_cast<std::size_t>(b)] = std::sqrt(sum);
  });
  std::sort(samples.draws.begin(), samples.draws.end());
  return samples;
}

double ellipsoid_quantile(const CovMatrix& omega_hat, double alpha,
                          Eigen::Index b_count, std::uint64_t seed,
                          int threads) {
  const KLBasis basis = eigendecompose_psd(omega_hat);
  const SupSamples draws = euclidean_norm_draws(
      basis, std::max<Eigen::Index>(basis.rank(), 1), b_count, seed, threads);
  return quantile(draws, alpha);
}

EllipsoidResult ellipsoid(const Eigen::VectorXd& theta_hat,
                          const CovMatrix& omega_hat, double alpha,
                          Eigen::Index n, Eigen::Index b_count,
                          std::uint64_t seed, int threads) {
  if (theta_hat.size() != omega_hat.dim()) {
    throw DimensionMismatch("estimate and covariance dimensions differ");
  }
  if (n < 1) throw InvalidArgument("sample size must be positive");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw AlphaOutOfRange("alpha must lie in (0,1)");
  }
  const KLBasis basis = eigendecompose_psd(omega_hat);
  EllipsoidResult result;
  result.center = theta_hat;
  result.alpha = alpha;
  result.quantile_draws = euclidean_norm_draws(
      basis, std::max<Eigen::Index>(basis.rank(), 1), b_count, seed, threads);
  const double c = quantile(result.quantile_draws, 1.0 - alpha);
  result.radius = c / std::sqrt(static_cast<double>(n));
  return result;
}

double coverage_simulation(const EllipsoidCoverageModel& model, Eigen::Index n,
                           double alpha, int reps, Eigen::Index b_count,
                           std::uint64_t seed, int threads) {
  if (reps < 100) throw InvalidArgument("coverage simulation needs reps >= 100");
  if (n < 2) throw InvalidArgument("sample size must be >= 2");
  const Eigen::Index d = model.omega_eigenvalues.size();
  if (d < 1) throw InvalidArgument("model needs at least one eigenvalue");
  if (model.omega_eigenvalues.minCoeff() < 0) {
    throw InvalidArgument("population eigenvalues must be nonnegative");
  }
  const Eigen::VectorXd scale = model.omega_eigenvalues.cwiseSqrt();

  std::vector<char> covered(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, threads, [&](std::int64_t r) {
    const std::uint64_t rep_seed =
        rng::derive_seed(seed, rng::tag::kRep, static_cast<std::uint64_t>(r));
    rng::GaussianStream data(rep_seed, rng::stream_id(rng::tag::kData, 0));
    Eigen::MatrixXd psi(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) psi(i, j) = scale[j] * data.next();
    }
    Eigen::VectorXd theta_hat = psi.colwise().mean().transpose();
    if (model.remainder_scale > 0) {
      rng::GaussianStream noise(rep_seed, rng::stream_id(rng::tag::kNoise, 0));
      Eigen::VectorXd dir(d);
      for (Eigen::Index j = 0; j < d; ++j) dir[j] = noise.next();
      const double norm = dir.norm();
      if (norm > 0) {
        theta_hat += dir / norm *
                     (model.remainder_scale / std::sqrt(static_cast<double>(n)));
      }
    }
    const CovMatrix omega_hat = influence_cov(InfluenceSample(psi));
    const EllipsoidResult region =
        ellipsoid(theta_hat, omega_hat, alpha, n, b_count, rep_seed);
    covered[static_cast<std::size_t>(r)] =
        region.contains(Eigen::VectorXd::Zero(d)) ? 1 : 0;
  });
  double total = 0.0;
  for (char c : covered) total += c;
  return total / static_cast<double>(reps);
}

double effective_rank(const CovMatrix& sigma) {
  if (sigma.entries().cwiseAbs().maxCoeff() == 0.0) {
    throw ZeroMatrix("effective rank of the zero matrix is undefined");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma.entries());
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("symmetric eigensolver failed");
  }
  return sigma.trace() / solver.eigenvalues().maxCoeff();
}

}  // namespace gpboot
