// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "gpboot/bootstrap_engine.hpp"

namespace gpboot {

/// Kernel identifier plus parameters. The listed kinds are symmetric and
/// positive semi-definite by construction.
struct KernelSpec {
  enum class Kind { gaussian, linear, polynomial };

  Kind kind = Kind::gaussian;
  double bandwidth = 1.0;  // gaussian
  int degree = 2;          // polynomial
  double offset = 0.0;     // polynomial

  static KernelSpec gaussian(double bandwidth);
  static KernelSpec linear();
  static KernelSpec polynomial(int degree, double offset);

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// sup_x sqrt(k(x,x)) where finite (gaussian: 1); nullopt when unbounded.
  std::optional<double> kappa_bound() const;
};

/// Cross-kernel matrix k(a_i, b_j) for row sets a (g x p) and b (n x p).
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel,
                              const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b);

/// Gram matrix k(X_i, X_j), PSD-clamped.
Eigen::MatrixXd gram_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& x);

/// Kernel ridge regression fit in representer form: f(x) = sum_i alpha_i
/// k(x, X_i) with alpha = (K + n lambda I)^{-1} y, and the training residual
/// variance sigma_hat_sq = (1/n) sum (y_i - f(X_i))^2.
struct KRRFit {
  Eigen::VectorXd coefficients;
  double lambda = 0.0;
  Eigen::MatrixXd inputs;  // training inputs, one row per observation
  double sigma_hat_sq = 0.0;
};

KRRFit krr_fit(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
               double lambda);
KRRFit krr_fit(const KernelSpec& kernel, const Eigen::MatrixXd& x,
               const Eigen::VectorXd& y, double lambda);

/// Predictions sum_i coeff_i k(x, X_i) at the rows of x_eval.
Eigen::VectorXd predict(const KernelSpec& kernel, const KRRFit& fit,
                        const Eigen::MatrixXd& x_eval,
                        const Eigen::VectorXd& coefficients);

/// Coefficients of the bias-corrected estimator f_bc = f + lambda
/// (T_hat + lambda)^{-1} f.
///
/// Derivation of the coefficient form: for g = sum_i c_i k_{X_i}, the sample
/// covariance operator acts as T_hat g = sum_i [(K c)/n]_i k_{X_i}, and for
/// lambda > 0 the resolvent maps the representer span into itself, so
/// (T_hat + lambda)^{-1} g carries coefficients (K/n + lambda I)^{-1} c.
/// Hence alpha_bc = alpha + lambda (K/n + lambda I)^{-1} alpha. This formula
/// is validated against a matrix-free conjugate-gradient oracle in the tests.
Eigen::VectorXd bias_correct(const KRRFit& fit, const Eigen::MatrixXd& gram);

/// Grid restriction of the plug-in covariance operator
///   Omega_hat = sigma_hat^2 T_hat (T_hat+lambda)^{-2} T_hat
///               (T_hat+lambda)^{-2} T_hat,
/// i.e. C(x, z) = <Omega_hat k_x, k_z>. In coefficient space (all factors are
/// polynomials in K and commute):
///   C = sigma_hat^2 Kg (K/n) M^{-2} (K/n) M^{-2} Kg' / n,  M = K/n + lambda I,
/// with Kg the grid-to-training kernel matrix. PSD-clamped.
CovMatrix omega_operator_matrix(const KRRFit& fit, const KernelSpec& kernel,
                                const Eigen::MatrixXd& grid);

/// alpha-quantile of sup over the grid of |Z^m| for the proxy process with
/// the given grid covariance. m = 0 selects the numerical rank (eigenvalues
/// above 1e-10 of the largest).
double band_quantile(const CovMatrix& omega_grid, Eigen::Index m, double alpha,
                     Eigen::Index b_count, std::uint64_t seed,
                     int threads = 1);

/// Simultaneous confidence band on the grid: center is the bias-corrected
/// fit, half_width = c_(1-alpha) / sqrt(n) with the sup norm taken over the
/// grid. Both the KL truncation and the ridge penalty leave a documented
/// bias; the band does not correct for it.
struct BandResult {
  Eigen::MatrixXd grid;
  Eigen::VectorXd center;
  double half_width = 0.0;
  double alpha = 0.0;
  Eigen::Index m = 0;            // truncation level actually used
  double grid_resolution = 0.0;  // largest nearest-neighbour gap in the grid
};

BandResult confidence_band(const KRRFit& fit, const KernelSpec& kernel,
                           const Eigen::MatrixXd& grid, double alpha,
                           Eigen::Index m, Eigen::Index b_count,
                           std::uint64_t seed, int threads = 1);

}  // namespace gpboot
