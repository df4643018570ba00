// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpboot/rkhs.hpp"
#include "test_helpers.hpp"

using namespace gpboot;

namespace {

Eigen::MatrixXd random_inputs(Eigen::Index n, Eigen::Index p,
                              rng::GaussianStream& g) {
  Eigen::MatrixXd x(n, p);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) x(i, j) = g.next();
  }
  return x;
}

// Matrix-free application of (T_hat + lambda) in evaluation space: functions
// are represented by their values at the training points and the covariance
// operator acts as g |-> (sum_i g(X_i) k(., X_i)) / n. The kernel sums are
// recomputed per step; no factorization of K is involved.
Eigen::VectorXd apply_t_plus_lambda(const KernelSpec& kernel,
                                    const Eigen::MatrixXd& x,
                                    const Eigen::VectorXd& values,
                                    double lambda) {
  const Eigen::Index n = x.rows();
  Eigen::VectorXd out = lambda * values;
  for (Eigen::Index j = 0; j < n; ++j) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += values[i] * kernel(x.row(j).transpose(), x.row(i).transpose());
    }
    out[j] += acc / static_cast<double>(n);
  }
  return out;
}

// Conjugate gradient for (T_hat + lambda) h = rhs in evaluation space.
Eigen::VectorXd cg_resolvent(const KernelSpec& kernel, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& rhs, double lambda) {
  Eigen::VectorXd h = Eigen::VectorXd::Zero(rhs.size());
  Eigen::VectorXd r = rhs;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  for (int it = 0; it < 500 && rs > 1e-26; ++it) {
    const Eigen::VectorXd ap = apply_t_plus_lambda(kernel, x, p, lambda);
    const double alpha = rs / p.dot(ap);
    h += alpha * p;
    r -= alpha * ap;
    const double rs_next = r.squaredNorm();
    p = r + (rs_next / rs) * p;
    rs = rs_next;
  }
  return h;
}

}  // namespace

TEST_CASE("kernel spec evaluation and kappa bounds") {
  Eigen::VectorXd x(2), y(2);
  x << 1.0, 0.0;
  y << 0.0, 1.0;
  const KernelSpec gauss = KernelSpec::gaussian(1.0);
  CHECK(gauss(x, x) == doctest::Approx(1.0));
  CHECK(gauss(x, y) == doctest::Approx(std::exp(-1.0)));
  CHECK(gauss.kappa_bound().value() == 1.0);

  const KernelSpec lin = KernelSpec::linear();
  CHECK(lin(x, y) == 0.0);
  CHECK(lin(x, x) == 1.0);
  CHECK_FALSE(lin.kappa_bound().has_value());

  const KernelSpec poly = KernelSpec::polynomial(2, 1.0);
  CHECK(poly(x, y) == doctest::Approx(1.0));
  CHECK(poly(x, x) == doctest::Approx(4.0));

  CHECK_THROWS_AS(KernelSpec::gaussian(0.0), InvalidArgument);
  CHECK_THROWS_AS(KernelSpec::polynomial(0, 1.0), InvalidArgument);
}

TEST_CASE("gram matrices are PSD") {
  rng::GaussianStream g(3, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 2 + trial % 29;
    const Eigen::MatrixXd x = random_inputs(n, 1 + trial % 3, g);
    const KernelSpec kernel = trial % 2 == 0
                                  ? KernelSpec::gaussian(0.7)
                                  : KernelSpec::polynomial(2, 0.5);
    const Eigen::MatrixXd k = gram_matrix(kernel, x);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(k);
    CHECK(solver.eigenvalues().minCoeff() >= -1e-9);
    if (kernel.kind == KernelSpec::Kind::gaussian) {
      CHECK(k.diagonal().maxCoeff() == doctest::Approx(1.0));
    }
  }

  // linear kernel gram is X X'
  const Eigen::MatrixXd x = random_inputs(6, 2, g);
  const Eigen::MatrixXd k = gram_matrix(KernelSpec::linear(), x);
  CHECK((k - x * x.transpose()).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("krr fit basics") {
  rng::GaussianStream g(5, 0);
  const Eigen::MatrixXd x = random_inputs(20, 1, g);
  Eigen::VectorXd y(20);
  for (int i = 0; i < 20; ++i) y[i] = std::sin(x(i, 0)) + 0.1 * g.next();
  const KernelSpec kernel = KernelSpec::gaussian(0.5);

  // huge penalty drives predictions to zero
  const KRRFit crushed = krr_fit(kernel, x, y, 1e8);
  const Eigen::VectorXd preds =
      predict(kernel, crushed, x, crushed.coefficients);
  CHECK(preds.cwiseAbs().maxCoeff() < 1e-6);

  // zero response gives zero coefficients and zero residual variance
  const KRRFit zero = krr_fit(kernel, x, Eigen::VectorXd::Zero(20), 1e-2);
  CHECK(zero.coefficients.cwiseAbs().maxCoeff() == 0.0);
  CHECK(zero.sigma_hat_sq == 0.0);

  // representer consistency: predictions at training points equal K alpha
  const KRRFit fit = krr_fit(kernel, x, y, 1e-3);
  const Eigen::MatrixXd k = gram_matrix(kernel, x);
  const Eigen::VectorXd direct = k * fit.coefficients;
  const Eigen::VectorXd via_predict = predict(kernel, fit, x, fit.coefficients);
  CHECK((direct - via_predict).cwiseAbs().maxCoeff() < 1e-10);

  CHECK_THROWS_AS(krr_fit(kernel, x, y, 0.0), InvalidArgument);
}

TEST_CASE("linear kernel krr equals direct ridge regression") {
  rng::GaussianStream g(7, 0);
  for (int trial = 0; trial < 8; ++trial) {
    const Eigen::Index n = 10 + 5 * trial;
    const Eigen::Index p = 1 + trial % 5;
    const Eigen::MatrixXd x = random_inputs(n, p, g);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = x.row(i).sum() + 0.2 * g.next();
    const double lambda = 1e-2;

    const KRRFit fit = krr_fit(KernelSpec::linear(), x, y, lambda);
    // ridge normal equations: (X'X + n lambda I) beta = X' y
    Eigen::MatrixXd system = x.transpose() * x;
    system.diagonal().array() += static_cast<double>(n) * lambda;
    const Eigen::VectorXd beta = system.ldlt().solve(x.transpose() * y);

    const Eigen::MatrixXd grid = random_inputs(15, p, g);
    const Eigen::VectorXd krr_pred =
        predict(KernelSpec::linear(), fit, grid, fit.coefficients);
    const Eigen::VectorXd ridge_pred = grid * beta;
    CHECK((krr_pred - ridge_pred).cwiseAbs().maxCoeff() <= 1e-8);
  }

  // 1D slope identity: slope = sum(x y) / (sum(x^2) + n lambda)
  Eigen::MatrixXd x1(3, 1);
  x1 << 1.0, 2.0, -1.0;
  Eigen::VectorXd y1(3);
  y1 << 2.0, 3.9, -2.1;
  const double lambda = 0.05;
  const KRRFit fit = krr_fit(KernelSpec::linear(), x1, y1, lambda);
  const double slope =
      (x1.col(0).dot(y1)) / (x1.col(0).squaredNorm() + 3.0 * lambda);
  Eigen::MatrixXd probe(1, 1);
  probe << 1.0;
  CHECK(predict(KernelSpec::linear(), fit, probe, fit.coefficients)[0] ==
        doctest::Approx(slope).epsilon(1e-10));
}

TEST_CASE("bias correction limits and spectral form") {
  rng::GaussianStream g(9, 0);
  const Eigen::MatrixXd x = random_inputs(12, 2, g);
  Eigen::VectorXd y(12);
  for (int i = 0; i < 12; ++i) y[i] = g.next();
  const KernelSpec kernel = KernelSpec::gaussian(0.8);
  const Eigen::MatrixXd k = gram_matrix(kernel, x);

  // lambda dominating T_hat: correction factor tends to the identity, so
  // alpha_bc ~ 2 alpha
  const KRRFit big = krr_fit(k, y, 1e8);
  const Eigen::VectorXd bc_big = bias_correct(big, k);
  CHECK((bc_big - 2.0 * big.coefficients).cwiseAbs().maxCoeff() <=
        1e-6 * big.coefficients.cwiseAbs().maxCoeff());

  // orthogonal design, linear kernel: K diagonal, each coefficient scaled by
  // 1 + lambda / (t_j + lambda), t_j = K_jj / n
  Eigen::MatrixXd ortho(2, 2);
  ortho << 2.0, 0.0, 0.0, 3.0;  // orthogonal rows
  const Eigen::MatrixXd k_diag = gram_matrix(KernelSpec::linear(), ortho);
  CHECK(std::abs(k_diag(0, 1)) < 1e-12);
  Eigen::VectorXd y2(2);
  y2 << 1.0, -2.0;
  const double lambda = 0.1;
  const KRRFit fit2 = krr_fit(k_diag, y2, lambda);
  const Eigen::VectorXd bc2 = bias_correct(fit2, k_diag);
  for (int j = 0; j < 2; ++j) {
    const double t_j = k_diag(j, j) / 2.0;
    const double factor = 1.0 + lambda / (t_j + lambda);
    CHECK(bc2[j] == doctest::Approx(factor * fit2.coefficients[j])
                        .epsilon(1e-10));
  }
}

TEST_CASE("bias correction matches the matrix-free CG oracle") {
  rng::GaussianStream g(11, 0);
  for (int trial = 0; trial < 6; ++trial) {
    const Eigen::Index n = 8 + 4 * trial;  // up to 28
    const Eigen::MatrixXd x = random_inputs(n, 1 + trial % 2, g);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y[i] = g.next();
    const KernelSpec kernel = KernelSpec::gaussian(0.9);
    const double lambda = 0.05;

    const KRRFit fit = krr_fit(kernel, x, y, lambda);
    const Eigen::MatrixXd k = gram_matrix(kernel, x);
    const Eigen::VectorXd alpha_bc = bias_correct(fit, k);

    // oracle: f_bc(X) = f(X) + lambda * [(T+lambda)^{-1} f](X) with the
    // resolvent applied by conjugate gradient in evaluation space
    const Eigen::VectorXd f_eval = k * fit.coefficients;
    const Eigen::VectorXd h_eval = cg_resolvent(kernel, x, f_eval, lambda);
    const Eigen::VectorXd oracle = f_eval + lambda * h_eval;
    const Eigen::VectorXd ours = k * alpha_bc;
    CHECK((ours - oracle).cwiseAbs().maxCoeff() <= 1e-6);
  }
}

TEST_CASE("bias correction reduces bias for a representer-span truth") {
  rng::GaussianStream g(13, 0);
  const Eigen::Index n = 40;
  Eigen::MatrixXd x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  const KernelSpec kernel = KernelSpec::gaussian(0.3);
  // f0 in the representer span, noiseless responses
  Eigen::VectorXd c0 = Eigen::VectorXd::Zero(n);
  c0[5] = 1.0;
  c0[20] = -0.7;
  c0[33] = 0.5;
  const Eigen::MatrixXd k = gram_matrix(kernel, x);
  const Eigen::VectorXd y = k * c0;

  Eigen::MatrixXd grid(21, 1);
  for (int i = 0; i < 21; ++i) grid(i, 0) = i / 20.0;
  const Eigen::MatrixXd kg = kernel_matrix(kernel, grid, x);
  const Eigen::VectorXd f0_grid = kg * c0;

  for (double lambda : {1e-3, 1e-2}) {
    const KRRFit fit = krr_fit(kernel, x, y, lambda);
    const Eigen::VectorXd plain = kg * fit.coefficients;
    const Eigen::VectorXd corrected = kg * bias_correct(fit, k);
    const double err_plain = (plain - f0_grid).cwiseAbs().maxCoeff();
    const double err_corrected = (corrected - f0_grid).cwiseAbs().maxCoeff();
    CHECK(err_corrected <= err_plain);
  }
}

TEST_CASE("omega operator matrix") {
  rng::GaussianStream g(15, 0);
  const KernelSpec kernel = KernelSpec::gaussian(0.5);

  // sigma_hat = 0 gives the zero matrix
  const Eigen::MatrixXd x = random_inputs(10, 1, g);
  const Eigen::MatrixXd k = gram_matrix(kernel, x);
  KRRFit noiseless = krr_fit(kernel, x, Eigen::VectorXd::Zero(10), 1e-2);
  const Eigen::MatrixXd grid = random_inputs(5, 1, g);
  CHECK(omega_operator_matrix(noiseless, kernel, grid)
            .entries()
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // huge lambda crushes the covariance like lambda^{-4}
  Eigen::VectorXd y(10);
  for (int i = 0; i < 10; ++i) y[i] = g.next();
  const KRRFit crushed = krr_fit(kernel, x, y, 1e6);
  CHECK(omega_operator_matrix(crushed, kernel, grid)
            .entries()
            .cwiseAbs()
            .maxCoeff() < 1e-12);

  // scalar linear-kernel formula sigma^2 t^3 / (t + lambda)^4 * x z
  Eigen::MatrixXd x1(4, 1);
  x1 << 1.0, -2.0, 0.5, 1.5;
  Eigen::VectorXd y1(4);
  y1 << 1.0, -1.5, 0.2, 2.0;
  const double lambda = 0.3;
  const KRRFit lin_fit = krr_fit(KernelSpec::linear(), x1, y1, lambda);
  Eigen::MatrixXd grid1(2, 1);
  grid1 << 0.7, -1.1;
  const CovMatrix cov =
      omega_operator_matrix(lin_fit, KernelSpec::linear(), grid1);
  const double t = x1.col(0).squaredNorm() / 4.0;
  const double scale =
      lin_fit.sigma_hat_sq * std::pow(t, 3) / std::pow(t + lambda, 4);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      CHECK(cov.entries()(i, j) ==
            doctest::Approx(scale * grid1(i, 0) * grid1(j, 0)).epsilon(1e-8));
    }
  }

  // symmetric PSD on random instances
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Index n = 5 + trial % 10;
    const Eigen::MatrixXd xs = random_inputs(n, 1, g);
    Eigen::VectorXd ys(n);
    for (Eigen::Index i = 0; i < n; ++i) ys[i] = g.next();
    const KRRFit fit = krr_fit(kernel, xs, ys, 0.01);
    const Eigen::MatrixXd gs = random_inputs(4, 1, g);
    const CovMatrix c = omega_operator_matrix(fit, kernel, gs);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.entries());
    CHECK(solver.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("band quantile scalar oracle and monotone refinement") {
  // single grid point with variance v: quantile of |N(0, sqrt(v))|
  Eigen::MatrixXd v(1, 1);
  v << 2.25;
  const double q = band_quantile(CovMatrix(v), 0, 0.95, 200000, 3);
  CHECK(q == doctest::Approx(1.5 * 1.959964).epsilon(0.01));

  CHECK(band_quantile(CovMatrix::Zero(3), 0, 0.9, 1000, 5) == 0.0);

  // nested grids under coupled seeds: sup over a superset dominates
  rng::GaussianStream g(17, 0);
  const Eigen::MatrixXd big = testing::random_psd(6, g);
  const Eigen::MatrixXd sub = big.topLeftCorner(3, 3);
  // full rank on both, same seed, coupled multipliers
  const double q_small = band_quantile(psd_repair(sub), 3, 0.9, 20000, 7);
  const double q_big = band_quantile(psd_repair(big), 3, 0.9, 20000, 7);
  // not per-draw comparable in general (different eigenbases); compare
  // quantiles at MC tolerance
  CHECK(q_big >= q_small - 0.05 * q_small);
}

TEST_CASE("confidence band contains its center and widens with confidence") {
  rng::GaussianStream g(19, 0);
  const Eigen::Index n = 60;
  Eigen::MatrixXd x(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  const KernelSpec kernel = KernelSpec::gaussian(0.25);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    y[i] = std::sin(6.0 * x(i, 0)) + 0.2 * g.next();
  }
  const KRRFit fit = krr_fit(kernel, x, y, 1e-3);

  Eigen::MatrixXd grid(11, 1);
  for (int i = 0; i < 11; ++i) grid(i, 0) = i / 10.0;

  const BandResult tight = confidence_band(fit, kernel, grid, 0.5, 0, 4000, 23);
  const BandResult wide = confidence_band(fit, kernel, grid, 0.05, 0, 4000, 23);
  CHECK(tight.half_width >= 0.0);
  CHECK(wide.half_width >= tight.half_width);  // coupled seeds
  CHECK(wide.center.size() == 11);
  CHECK(wide.m >= 1);
  // the band trivially contains its own center
  CHECK((wide.center - wide.center).cwiseAbs().maxCoeff() <= wide.half_width);
}
