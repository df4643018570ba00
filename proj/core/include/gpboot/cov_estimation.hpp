// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Dense>

#include "gpboot/gp_core.hpp"

namespace gpboot {

/// Function evaluations of a sample on a finite index net: entry (i, f) is
/// f(X_i).
class EvaluatedSample {
 public:
  explicit EvaluatedSample(Eigen::MatrixXd values);

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index width() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }

 private:
  Eigen::MatrixXd values_;
};

/// Admissibility diagnostic for a covariance candidate. Continuity is vacuous
/// on a finite net and only reported as not applicable.
struct AdmissibilityReport {
  bool symmetric = false;
  double max_asymmetry = 0.0;
  bool psd_within_tol = false;
  double min_eigenvalue = 0.0;
  bool finite_trace = false;
  double trace = 0.0;
  bool continuity_applicable = false;  // always false on a finite net

  bool admissible() const { return symmetric && psd_within_tol && finite_trace; }
};

/// Symmetrizes a covariance candidate and clamps negative eigenvalues to
/// zero. Every estimator in the library routes its output through this
/// repair, so downstream code always sees a valid CovMatrix.
CovMatrix psd_repair(const Eigen::MatrixXd& candidate);

/// Nonparametric sample covariance function on the net:
///   C(f, g) = P_n(fg) - (P_n f)(P_n g).
/// Computed in centered form, so it agrees with
/// centered_second_moment(s, column means) bit for bit.
CovMatrix sample_cov_function(const EvaluatedSample& sample);

/// (1/n) sum_i (row_i - center)(row_i - center)'.
CovMatrix centered_second_moment(const EvaluatedSample& sample,
                                 const Eigen::VectorXd& center);

/// Measures the CovMatrix invariants on an arbitrary candidate matrix.
AdmissibilityReport admissibility_check(const Eigen::MatrixXd& candidate);

/// Sup-entry discrepancy max_{f,g} |A(f,g) - B(f,g)|.
double sup_cov_error(const CovMatrix& a, const CovMatrix& b);

}  // namespace gpboot
