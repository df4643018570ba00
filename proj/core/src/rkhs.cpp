// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/rkhs.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gpboot {

KernelSpec KernelSpec::gaussian(double bandwidth) {
  if (!(bandwidth > 0)) throw InvalidArgument("bandwidth must be positive");
  KernelSpec spec;
  spec.kind = Kind::gaussian;
  spec.bandwidth = bandwidth;
  return spec;
}

KernelSpec KernelSpec::linear() {
  KernelSpec spec;
  spec.kind = Kind::linear;
  return spec;
}

KernelSpec KernelSpec::polynomial(int degree, double offset) {
  if (degree < 1) throw InvalidArgument("polynomial degree must be >= 1");
  if (offset < 0) throw InvalidArgument("polynomial offset must be >= 0");
  KernelSpec spec;
  spec.kind = Kind::polynomial;
  spec.degree = degree;
  spec.offset = offset;
  return spec;
}

double KernelSpec::operator()(const Eigen::VectorXd& x,
                              const Eigen::VectorXd& y) const {
  switch (kind) {
    case Kind::gaussian:
      return std::exp(-(x - y).squaredNorm() / (2.0 * bandwidth * bandwidth));
    case Kind::linear:
      return x.dot(y);
    case Kind::polynomial:
      return std::pow(x.dot(y) + offset, degree);
  }
  throw InvalidArgument("unknown kernel kind");
}

std::optional<double> KernelSpec::kappa_bound() const {
  if (kind == Kind::gaussian) return 1.0;
  return std::nullopt;  // linear and polynomial kernels are unbounded on R^p
}

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel,
                              const Eigen::MatrixXd& a,
                              const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw DimensionMismatch("input dimensions differ: " +
                            std::to_string(a.cols()) + " vs " +
                            std::to_string(b.cols()));
  }
  Eigen::MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = kernel(a.row(i).transpose(), b.row(j).transpose());
    }
  }
  return k;
}

Eigen::MatrixXd gram_matrix(const KernelSpec& kernel,
                            const Eigen::MatrixXd& x) {
  if (x.rows() < 1) throw InvalidArgument("need at least one input");
  if (!x.allFinite()) throw InvalidArgument("inputs must be finite");
  return psd_repair(kernel_matrix(kernel, x, x)).entries();
}

KRRFit krr_fit(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y,
               double lambda) {
  const Eigen::Index n = gram.rows();
  if (gram.cols() != n) throw DimensionMismatch("gram matrix must be square");
  if (y.size() != n) throw DimensionMismatch("response length mismatch");
  if (!(lambda > 0)) throw InvalidArgument("ridge penalty must be positive");

  Eigen::MatrixXd system = gram;
  system.diagonal().array() += static_cast<double>(n) * lambda;
  const Eigen::LDLT<Eigen::MatrixXd> solver(system);
  if (solver.info() != Eigen::Success || !solver.isPositive()) {
    throw SingularSystem("K + n lambda I is not positive definite");
  }
  KRRFit fit;
  fit.coefficients = solver.solve(y);
  fit.lambda = lambda;
  fit.sigma_hat_sq =
      (y - gram * fit.coefficients).squaredNorm() / static_cast<double>(n);
  return fit;
}

KRRFit krr_fit(const KernelSpec& kernel, const Eigen::MatrixXd& x,
               const Eigen::VectorXd& y, double lambda) {
  KRRFit fit = krr_fit(gram_matrix(kernel, x), y, lambda);
  fit.inputs = x;
  return fit;
}

Eigen::VectorXd predict(const KernelSpec& kernel, const KRRFit& fit,
                        const Eigen::MatrixXd& x_eval,
                        const Eigen::VectorXd& coefficients) {
  if (fit.inputs.rows() == 0) {
    throw InvalidArgument("fit has no stored training inputs");
  }
  if (coefficients.size() != fit.inputs.rows()) {
    throw DimensionMismatch("coefficient length mismatch");
  }
  return kernel_matrix(kernel, x_eval, fit.inputs) * coefficients;
}

Eigen::VectorXd bias_correct(const KRRFit& fit, const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  if (fit.coefficients.size() != n) {
    throw DimensionMismatch("fit does not match gram matrix");
  }
  Eigen::MatrixXd m = gram / static_cast<double>(n);
  m.diagonal().array() += fit.lambda;
  const Eigen::LLT<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw SingularSystem("K/n + lambda I is not positive definite");
  }
  return fit.coefficients + fit.lambda * solver.solve(fit.coefficients);
}

CovMatrix omega_operator_matrix(const KRRFit& fit, const KernelSpec& kernel,
                                const Eigen::MatrixXd& grid) {
  if (grid.rows() < 1) throw InvalidArgument("evaluation grid is empty");
  if (fit.inputs.rows() == 0) {
    throw InvalidArgument("fit has no stored training inputs");
  }
  const Eigen::Index n = fit.inputs.rows();
  const Eigen::MatrixXd gram = gram_matrix(kernel, fit.inputs);
  Eigen::MatrixXd m = gram / static_cast<double>(n);
  m.diagonal().array() += fit.lambda;
  const Eigen::LLT<Eigen::MatrixXd> solver(m);
  if (solver.info() != Eigen::Success) {
    throw SingularSystem("K/n + lambda I is not positive definite");
  }
  const Eigen::MatrixXd kg = kernel_matrix(kernel, grid, fit.inputs);
  // A = (K/n) M^{-2}; the grid covariance is sigma^2 Kg A A Kg' / n.
  const Eigen::MatrixXd a =
      solver.solve(solver.solve(gram / static_cast<double>(n)).eval());
  const Eigen::MatrixXd half = kg * a;
  Eigen::MatrixXd cov =
      fit.sigma_hat_sq * half * a * kg.transpose() / static_cast<double>(n);
  return psd_repair(cov);
}

namespace {

double nearest_neighbour_gap(const Eigen::MatrixXd& grid) {
  if (grid.rows() < 2) return 0.0;
  double resolution = 0.0;
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    double nearest = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < grid.rows(); ++j) {
      if (i == j) continue;
      nearest = std::min(nearest, (grid.row(i) - grid.row(j)).norm());
    }
    resolution = std::max(resolution, nearest);
  }
  return resolution;
}

Eigen::Index resolve_truncation(const KLBasis& basis, Eigen::Index m) {
  if (m > 0) {
    if (m > basis.rank()) throw RankExceeded("m exceeds basis rank");
    return m;
  }
  // default: numerical rank at 1e-10 of the top eigenvalue
  if (basis.rank() == 0) return 0;
  const double cutoff = 1e-10 * basis.eigenvalues()[0];
  Eigen::Index keep = 0;
  while (keep < basis.rank() && basis.eigenvalues()[keep] > cutoff) ++keep;
  return std::max<Eigen::Index>(keep, 1);
}

}  // namespace

double band_quantile(const CovMatrix& omega_grid, Eigen::Index m, double alpha,
                     Eigen::Index b_count, std::uint64_t seed, int threads) {
  const KLBasis basis = eigendecompose_psd(omega_grid);
  if (basis.rank() == 0) return 0.0;
  const SupSamples draws =
      sup_draws(basis, resolve_truncation(basis, m), b_count, seed, threads);
  return quantile(draws, alpha);
}

BandResult confidence_band(const KRRFit& fit, const KernelSpec& kernel,
                           const Eigen::MatrixXd& grid, double alpha,
                           Eigen::Index m, Eigen::Index b_count,
                           std::uint64_t seed, int threads) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw AlphaOutOfRange("alpha must lie in (0,1)");
  }
  const Eigen::MatrixXd gram = gram_matrix(kernel, fit.inputs);
  const Eigen::VectorXd corrected = bias_correct(fit, gram);

  BandResult band;
  band.grid = grid;
  band.alpha = alpha;
  band.grid_resolution = nearest_neighbour_gap(grid);
  band.center = predict(kernel, fit, grid, corrected);

  const CovMatrix omega_grid = omega_operator_matrix(fit, kernel, grid);
  const KLBasis basis = eigendecompose_psd(omega_grid);
  band.m = resolve_truncation(basis, m);
  if (basis.rank() == 0) {
    band.half_width = 0.0;
    return band;
  }
  const SupSamples draws = sup_draws(basis, band.m, b_count, seed, threads);
  band.half_width = quantile(draws, 1.0 - alpha) /
                    std::sqrt(static_cast<double>(fit.inputs.rows()));
  return band;
}

}  // namespace gpboot
