// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/cov_estimation.hpp"

#include <cmath>
#include <string>

namespace gpboot {

EvaluatedSample::EvaluatedSample(Eigen::MatrixXd values)
    : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw InvalidArgument("evaluated sample must be nonempty");
  }
  if (!values_.allFinite()) {
    throw InvalidArgument("evaluated sample entries must be finite");
  }
}

CovMatrix psd_repair(const Eigen::MatrixXd& candidate) {
  if (candidate.rows() != candidate.cols()) {
    throw DimensionMismatch("covariance candidate must be square");
  }
  Eigen::MatrixXd sym = (candidate + candidate.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NoConvergence("symmetric eigensolver failed during PSD repair");
  }
  const Eigen::VectorXd clamped = solver.eigenvalues().cwiseMax(0.0);
  Eigen::MatrixXd repaired = solver.eigenvectors() * clamped.asDiagonal() *
                             solver.eigenvectors().transpose();
  repaired = ((repaired + repaired.transpose()) / 2.0).eval();
  return CovMatrix(std::move(repaired));
}

CovMatrix centered_second_moment(const EvaluatedSample& sample,
                                 const Eigen::VectorXd& center) {
  if (center.size() != sample.width()) {
    throw DimensionMismatch("center length " + std::to_string(center.size()) +
                            " != net size " + std::to_string(sample.width()));
  }
  const Eigen::MatrixXd centered =
      sample.values().rowwise() - center.transpose();
  const Eigen::MatrixXd raw =
      centered.transpose() * centered / static_cast<double>(sample.n());
  return psd_repair(raw);
}

CovMatrix sample_cov_function(const EvaluatedSample& sample) {
  if (sample.n() < 2) {
    throw TooFewSamples("covariance estimation needs n >= 2, got " +
                        std::to_string(sample.n()));
  }
  const Eigen::VectorXd mean =
      sample.values().colwise().mean().transpose();
  return centered_second_moment(sample, mean);
}

AdmissibilityReport admissibility_check(const Eigen::MatrixXd& candidate) {
  AdmissibilityReport report;
  if (candidate.rows() != candidate.cols() || candidate.rows() == 0) {
    return report;  // nothing passes on a non-square candidate
  }
  report.max_asymmetry =
      (candidate - candidate.transpose()).cwiseAbs().maxCoeff();
  report.symmetric = true;
  for (Eigen::Index j = 0; j < candidate.cols() && report.symmetric; ++j) {
    for (Eigen::Index i = 0; i < candidate.rows(); ++i) {
      if (std::abs(candidate(i, j) - candidate(j, i)) >
          CovMatrix::kSymmetryTol * (1.0 + std::abs(candidate(i, j)))) {
        report.symmetric = false;
        break;
      }
    }
  }
  report.trace = candidate.trace();
  report.finite_trace = std::isfinite(report.trace);

  const Eigen::MatrixXd sym = (candidate + candidate.transpose()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() == Eigen::Success) {
    const double lambda_max = solver.eigenvalues().maxCoeff();
    report.min_eigenvalue = solver.eigenvalues().minCoeff();
    report.psd_within_tol =
        report.min_eigenvalue >= -CovMatrix::kPsdTol * (1.0 + lambda_max);
  }
  return report;
}

double sup_cov_error(const CovMatrix& a, const CovMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("covariance dimensions differ: " +
                            std::to_string(a.dim()) + " vs " +
                            std::to_string(b.dim()));
  }
  return (a.entries() - b.entries()).cwiseAbs().maxCoeff();
}

}  // namespace gpboot
