// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gpboot/bootstrap_engine.hpp"

namespace gpboot {

/// Influence-function evaluations psi_1..psi_n, one row per observation.
class InfluenceSample {
 public:
  explicit InfluenceSample(Eigen::MatrixXd psi);

  Eigen::Index n() const { return psi_.rows(); }
  Eigen::Index d() const { return psi_.cols(); }
  const Eigen::MatrixXd& psi() const { return psi_; }

 private:
  Eigen::MatrixXd psi_;
};

/// Centered sample covariance of the influence rows.
CovMatrix influence_cov(const InfluenceSample& sample);

/// B draws of ||Z||_2 computed directly from the KL coefficients,
/// ||Z||_2 = sqrt(sum_k lambda_k xi_k^2). No sphere net: the Euclidean norm
/// of a finite-dimensional Gaussian is exact in the coefficient law.
SupSamples euclidean_norm_draws(const KLBasis& basis, Eigen::Index m,
                                Eigen::Index b_count, std::uint64_t seed,
                                int threads = 1);

/// alpha-quantile of ||Z||_2, Z ~ N(0, omega_hat).
double ellipsoid_quantile(const CovMatrix& omega_hat, double alpha,
                          Eigen::Index b_count, std::uint64_t seed,
                          int threads = 1);

/// Simultaneous confidence ellipsoid { theta : sqrt(n)||theta_hat - theta||_2
/// <= c } with c the bootstrap (1-alpha)-quantile.
struct EllipsoidResult {
  Eigen::VectorXd center;
  double radius = 0.0;  // c / sqrt(n)
  double alpha = 0.0;
  SupSamples quantile_draws;

  bool contains(const Eigen::VectorXd& theta) const {
    return (center - theta).norm() <= radius;
  }
};

EllipsoidResult ellipsoid(const Eigen::VectorXd& theta_hat,
                          const CovMatrix& omega_hat, double alpha,
                          Eigen::Index n, Eigen::Index b_count,
                          std::uint64_t seed, int threads = 1);

/// Simulation design for the coverage experiment: Gaussian influence
/// functions with diagonal population covariance (rotation is immaterial)
/// plus an optional injected remainder with sqrt(n)||R_n||_2 =
/// remainder_scale.
struct EllipsoidCoverageModel {
  Eigen::VectorXd omega_eigenvalues;
  double remainder_scale = 0.0;
};

/// Fraction of replications in which theta_0 lies in the constructed
/// ellipsoid.
double coverage_simulation(const EllipsoidCoverageModel& model, Eigen::Index n,
                           double alpha, int reps, Eigen::Index b_count,
                           std::uint64_t seed, int threads = 1);

/// Effective rank tr(A) / ||A||_op.
double effective_rank(const CovMatrix& sigma);

}  // namespace gpboot
