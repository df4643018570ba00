// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "gpboot/errors.hpp"
#include "gpboot/rng.hpp"

namespace gpboot {

/// Covariance function restricted to a finite index net: a symmetric,
/// positive semi-definite (up to floating point tolerance) matrix.
///
/// Symmetry is validated at construction. Positive semi-definiteness is
/// checked where it matters, in eigendecompose_psd, so that diagnostic code
/// can still hold indefinite candidates and report on them.
class CovMatrix {
 public:
  explicit CovMatrix(Eigen::MatrixXd entries);

  static CovMatrix Zero(Eigen::Index dim) {
    return CovMatrix(Eigen::MatrixXd::Zero(dim, dim));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  double trace() const { return entries_.trace(); }

  /// Relative symmetry tolerance: |C(i,j) - C(j,i)| <= tol * (1 + |C(i,j)|).
  static constexpr double kSymmetryTol = 1e-12;
  /// PSD tolerance: smallest eigenvalue >= -tol * (1 + largest eigenvalue).
  static constexpr double kPsdTol = 1e-10;

 private:
  Eigen::MatrixXd entries_;
};

/// Ordered eigenpairs of a CovMatrix; eigenvalues nonincreasing and
/// nonnegative, eigenvectors orthonormal columns.
class KLBasis {
 public:
  KLBasis(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors);

  Eigen::Index rank() const { return eigenvalues_.size(); }
  Eigen::Index dim() const { return eigenvectors_.rows(); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  /// dim x rank matrix, column k is the eigenvector of eigenvalues()[k].
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;
};

/// One realization of the truncated proxy process on the net, together with
/// the standard normal multipliers that produced it.
struct GaussianDraw {
  Eigen::VectorXd values;        // one process value per index point
  Eigen::VectorXd coefficients;  // the multipliers xi_1..xi_m used
};

/// Spectral decomposition of a covariance matrix. Keeps every eigenpair with
/// eigenvalue > rank_tol * lambda_1; eigenvalues that are negative within the
/// PSD tolerance are clamped to zero. A zero matrix yields an empty basis.
///
/// Throws NotSymmetric or NotPSD when the input violates the CovMatrix
/// contract beyond tolerance.
KLBasis eigendecompose_psd(const CovMatrix& cov, double rank_tol = 1e-12);

/// Best rank-m approximation sum_{k<=m} lambda_k v_k v_k'.
CovMatrix truncated_cov(const KLBasis& basis, Eigen::Index m);

/// Operator norm of (full reconstruction - rank-m reconstruction), which is
/// the (m+1)-th eigenvalue, or 0 once m reaches the rank.
double truncation_error(const KLBasis& basis, Eigen::Index m);

/// Draws xi_1..xi_m from rng and returns the truncated Karhunen-Loeve sample
///   Z(f) = sum_{k<=m} xi_k sqrt(lambda_k) v_k(f).
/// Conditional on the basis its covariance is truncated_cov(basis, m).
/// A rank-zero basis yields the zero draw for any m.
GaussianDraw kl_sample(const KLBasis& basis, Eigen::Index m,
                       rng::NormalSource& rng);

/// Supremum of |values| over the net.
double sup_abs(const GaussianDraw& draw);

}  // namespace gpboot
