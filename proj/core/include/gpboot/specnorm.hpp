// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gpboot/bootstrap_engine.hpp"

namespace gpboot {

/// Half-vectorization of a symmetric d x d matrix: the lower triangle
/// including the diagonal, stacked column-major (columns outer, rows inner).
struct VechVector {
  Eigen::Index d = 0;
  Eigen::VectorXd entries;
};

VechVector vech(const Eigen::MatrixXd& a);

/// Inverse map vec^{-1}(H_d v): rebuilds the symmetric matrix whose
/// half-vectorization is v. Symmetric by construction.
Eigen::MatrixXd unvech(const VechVector& v);

/// The 0/1 duplication matrix H_d of shape d^2 x d(d+1)/2 with
/// H_d vech(A) = vec(A) for every symmetric A.
Eigen::MatrixXd duplication_matrix(Eigen::Index d);

/// Position of entry (i, j), i >= j, inside the vech stacking.
Eigen::Index vech_index(Eigen::Index i, Eigen::Index j, Eigen::Index d);

/// Largest absolute eigenvalue of a symmetric matrix. Full eigensolve for
/// d <= 64, power iteration above (tolerance 1e-9, at most 10^4 iterations).
double operator_norm(const Eigen::MatrixXd& a);

/// Power iteration on A^2 for the operator norm; exposed for cross-checks
/// against the dense eigensolver.
double power_iteration_norm(const Eigen::MatrixXd& a, double tol = 1e-9,
                            int max_iter = 10000);

/// T_n = sqrt(n) ||Sigma_hat - Sigma||_op with the uncentered second-moment
/// estimate Sigma_hat = n^{-1} sum X_i X_i'.
double specnorm_statistic(const Eigen::MatrixXd& data, const CovMatrix& sigma);

/// Omega_hat = n^{-1} sum vech(X_i X_i' - Sigma_hat) vech'(...), the
/// d(d+1)/2-dimensional covariance of the vectorized fluctuations.
/// `center` switches to the mean-centered variant (off the mean-zero model,
/// for practical data).
CovMatrix omega_hat_vech(const Eigen::MatrixXd& data, bool center = false);

/// B draws of ||S_hat||_op where S_hat = vec^{-1}(H_d Z), Z ~ N(0, Omega_hat)
/// sampled by KL decomposition. Full decomposition up to d(d+1)/2 <= 2080
/// (d <= 64); above that a truncation level m must be supplied.
SupSamples bootstrap_specnorm(const Eigen::MatrixXd& data, Eigen::Index b_count,
                              std::uint64_t seed, int threads = 1,
                              bool center = false,
                              std::optional<Eigen::Index> m = std::nullopt);

}  // namespace gpboot
