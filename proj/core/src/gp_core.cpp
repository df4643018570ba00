// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/gp_core.hpp"

#include <cmath>
#include <string>

namespace gpboot {

namespace {

void check_symmetric(const Eigen::MatrixXd& m, double tol) {
  if (m.rows() != m.cols()) {
    throw NotSymmetric("matrix is not square: " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()));
  }
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
      const double gap = std::abs(m(i, j) - m(j, i));
      if (gap > tol * (1.0 + std::abs(m(i, j)))) {
        throw NotSymmetric("entry (" + std::to_string(i) + "," +
                           std::to_string(j) + ") asymmetric by " +
                           std::to_string(gap));
      }
    }
  }
}

}  // namespace

CovMatrix::CovMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() == 0) {
    throw InvalidArgument("CovMatrix must have positive dimension");
  }
  if (!entries_.allFinite()) {
    throw InvalidArgument("CovMatrix entries must be finite");
  }
  check_symmetric(entries_, kSymmetryTol);
}

KLBasis::KLBasis(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)) {
  if (eigenvectors_.cols() != eigenvalues_.size()) {
    throw DimensionMismatch("eigenvalue/eigenvector count mismatch");
  }
  for (Eigen::Index k = 0; k + 1 < eigenvalues_.size(); ++k) {
    if (eigenvalues_[k] < eigenvalues_[k + 1]) {
      throw InvalidArgument("eigenvalues must be nonincreasing");
    }
  }
  if (eigenvalues_.size() > 0 && eigenvalues_[eigenvalues_.size() - 1] < 0) {
    throw InvalidArgument("eigenvalues must be nonnegative");
  }
}

KLBasis eigendecompose_psd(const CovMatrix& cov, double rank_tol) {
  if (rank_tol < 0) throw InvalidArgument("rank_tol must be nonnegative");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov.entries());
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("symmetric eigensolver failed");
  }
  // Eigen returns eigenvalues in increasing order.
  const Eigen::VectorXd& ascending = solver.eigenvalues();
  const Eigen::Index d = cov.dim();
  const double lambda_max = ascending[d - 1];
  const double lambda_min = ascending[0];
  if (lambda_min < -CovMatrix::kPsdTol * (1.0 + lambda_max)) {
    throw NotPSD("smallest eigenvalue " + std::to_string(lambda_min) +
                 " below PSD tolerance");
  }

  const double cutoff = rank_tol * std::max(lambda_max, 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < d; ++k) {
    if (ascending[d - 1 - k] > cutoff) ++rank;
  }
  Eigen::VectorXd values(rank);
  Eigen::MatrixXd vectors(d, rank);
  for (Eigen::Index k = 0; k < rank; ++k) {
    values[k] = std::max(ascending[d - 1 - k], 0.0);
    vectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  return KLBasis(std::move(values), std::move(vectors));
}

CovMatrix truncated_cov(const KLBasis& basis, Eigen::Index m) {
  if (m < 1) throw InvalidArgument("truncation level must be >= 1");
  if (m > basis.rank()) {
    throw RankExceeded("m = " + std::to_string(m) + " exceeds rank " +
                       std::to_string(basis.rank()));
  }
  const auto vectors = basis.eigenvectors().leftCols(m);
  Eigen::MatrixXd rec =
      vectors * basis.eigenvalues().head(m).asDiagonal() * vectors.transpose();
  rec = ((rec + rec.transpose()) / 2.0).eval();
  return CovMatrix(std::move(rec));
}

double truncation_error(const KLBasis& basis, Eigen::Index m) {
  if (m < 1) throw InvalidArgument("truncation level must be >= 1");
  if (m > basis.rank()) {
    throw RankExceeded("m = " + std::to_string(m) + " exceeds rank " +
                       std::to_string(basis.rank()));
  }
  return m < basis.rank() ? basis.eigenvalues()[m] : 0.0;
}

GaussianDraw kl_sample(const KLBasis& basis, Eigen::Index m,
                       rng::NormalSource& rng) {
  if (basis.rank() == 0) {
    // Degenerate zero covariance: the proxy process is identically zero.
    return GaussianDraw{Eigen::VectorXd::Zero(basis.dim()), Eigen::VectorXd()};
  }
  if (m < 1) throw InvalidArgument("truncation level must be >= 1");
  if (m > basis.rank()) {
    throw RankExceeded("m = " + std::to_string(m) + " exceeds rank " +
                       std::to_string(basis.rank()));
  }
  Eigen::VectorXd xi(m);
  for (Eigen::Index k = 0; k < m; ++k) xi[k] = rng.next();
  const Eigen::VectorXd scaled =
      basis.eigenvalues().head(m).cwiseSqrt().cwiseProduct(xi);
  return GaussianDraw{basis.eigenvectors().leftCols(m) * scaled, std::move(xi)};
}

double sup_abs(const GaussianDraw& draw) {
  if (draw.values.size() == 0) throw EmptyNet("draw has no index points");
  return draw.values.cwiseAbs().maxCoeff();
}

}  // namespace gpboot
