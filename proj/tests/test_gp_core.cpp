// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "gpboot/gp_core.hpp"
#include "test_helpers.hpp"

using namespace gpboot;
using gpboot::testing::ConstantSource;
using gpboot::testing::SequenceSource;
using gpboot::testing::random_psd;

namespace {

Eigen::MatrixXd reconstruct(const KLBasis& basis) {
  return basis.eigenvectors() * basis.eigenvalues().asDiagonal() *
         basis.eigenvectors().transpose();
}

}  // namespace

TEST_CASE("covmatrix rejects asymmetry and accepts tolerance") {
  Eigen::MatrixXd bad(2, 2);
  bad << 1.0, 0.0, 0.5, 1.0;
  CHECK_THROWS_AS(CovMatrix{bad}, NotSymmetric);

  Eigen::MatrixXd almost(2, 2);
  almost << 1.0, 0.5, 0.5 + 1e-13, 1.0;
  CHECK_NOTHROW(CovMatrix{almost});
}

TEST_CASE("eigendecompose_psd on diagonal and identity") {
  Eigen::MatrixXd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 1.0;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));
  REQUIRE(basis.rank() == 2);
  CHECK(basis.eigenvalues()[0] == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(basis.eigenvalues()[1] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(basis.eigenvectors()(0, 0)) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(basis.eigenvectors()(1, 1)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  const KLBasis id3 = eigendecompose_psd(CovMatrix(Eigen::MatrixXd::Identity(3, 3)));
  REQUIRE(id3.rank() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(id3.eigenvalues()[k] == doctest::Approx(1.0).epsilon(1e-12));
  }
  // any orthonormal basis qualifies
  CHECK((id3.eigenvectors().transpose() * id3.eigenvectors() -
         Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("rank-one outer product against direct multiplication oracle") {
  Eigen::VectorXd a(2);
  a << 3.0, 4.0;
  const CovMatrix cov(a * a.transpose());
  const KLBasis basis = eigendecompose_psd(cov);
  REQUIRE(basis.rank() == 1);
  CHECK(basis.eigenvalues()[0] == doctest::Approx(25.0).epsilon(1e-12));
  Eigen::VectorXd v = basis.eigenvectors().col(0);
  if (v[0] < 0) v = -v;
  CHECK(v[0] == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(0.8).epsilon(1e-12));
  // oracle: C v = lambda v by direct multiplication
  CHECK((cov.entries() * v - 25.0 * v).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigendecompose_psd rejects indefinite input") {
  Eigen::MatrixXd indefinite(2, 2);
  indefinite << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3 and -1
  CHECK_THROWS_AS(eigendecompose_psd(CovMatrix(indefinite)), NotPSD);
}

TEST_CASE("zero covariance decomposes to an empty basis") {
  const KLBasis basis = eigendecompose_psd(CovMatrix::Zero(3));
  CHECK(basis.rank() == 0);
  CHECK(basis.dim() == 3);

  ConstantSource zeros(0.0);
  const GaussianDraw draw = kl_sample(basis, 5, zeros);
  CHECK(draw.values.size() == 3);
  CHECK(draw.values.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("truncated_cov reconstructions") {
  const KLBasis id3 = eigendecompose_psd(CovMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK((truncated_cov(id3, 3).entries() - Eigen::MatrixXd::Identity(3, 3))
            .cwiseAbs()
            .maxCoeff() < 1e-10);

  Eigen::MatrixXd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 1.0;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));
  Eigen::MatrixXd top(2, 2);
  top << 4.0, 0.0, 0.0, 0.0;
  CHECK((truncated_cov(basis, 1).entries() - top).cwiseAbs().maxCoeff() <
        1e-12);
  CHECK_THROWS_AS(truncated_cov(basis, 3), RankExceeded);
}

TEST_CASE("equicorrelated top eigenpair matches closed form") {
  // d = 4, rho = 0.5: lambda_1 = 1 + 3 rho = 2.5, eigenvector 1/sqrt(d).
  const Eigen::Index d = 4;
  const double rho = 0.5;
  Eigen::MatrixXd sigma = Eigen::MatrixXd::Constant(d, d, rho) +
                          (1.0 - rho) * Eigen::MatrixXd::Identity(d, d);
  const KLBasis basis = eigendecompose_psd(CovMatrix(sigma));
  REQUIRE(basis.rank() == 4);
  CHECK(basis.eigenvalues()[0] == doctest::Approx(2.5).epsilon(1e-12));

  const Eigen::MatrixXd rank1 = truncated_cov(basis, 1).entries();
  const Eigen::MatrixXd expected =
      Eigen::MatrixXd::Constant(d, d, 2.5 / static_cast<double>(d));
  CHECK((rank1 - expected).cwiseAbs().maxCoeff() < 1e-10);

  CHECK(truncation_error(basis, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("truncation_error equals the next eigenvalue") {
  const KLBasis id3 = eigendecompose_psd(CovMatrix(Eigen::MatrixXd::Identity(3, 3)));
  CHECK(truncation_error(id3, 2) == doctest::Approx(1.0));

  Eigen::MatrixXd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 1.0;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));
  CHECK(truncation_error(basis, 2) == 0.0);
  CHECK_THROWS_AS(truncation_error(basis, 3), RankExceeded);
}

TEST_CASE("kl_sample with forced multipliers") {
  Eigen::MatrixXd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 1.0;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));

  ConstantSource zeros(0.0);
  CHECK(sup_abs(kl_sample(basis, 2, zeros)) == 0.0);

  Eigen::VectorXd ones(2);
  ones << 1.0, 1.0;
  SequenceSource seq(ones);
  const GaussianDraw draw = kl_sample(basis, 2, seq);
  // sqrt(4) * 1 on the first coordinate, sqrt(1) * 1 on the second, up to
  // eigenvector sign
  CHECK(std::abs(draw.values[0]) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(draw.values[1]) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(draw.coefficients.size() == 2);
}

TEST_CASE("sup_abs basics") {
  GaussianDraw draw;
  draw.values.resize(3);
  draw.values << -3.0, 2.0, 0.0;
  CHECK(sup_abs(draw) == 3.0);

  draw.values.setZero();
  CHECK(sup_abs(draw) == 0.0);

  draw.values.resize(1);
  draw.values << -7.5;
  CHECK(sup_abs(draw) == 7.5);

  draw.values.resize(0);
  CHECK_THROWS_AS(sup_abs(draw), EmptyNet);
}

TEST_CASE("full-rank reconstruction over random PSD matrices") {
  rng::GaussianStream g(11, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::Index d = 2 + trial % 7;
    const Eigen::MatrixXd psd = random_psd(d, g);
    const CovMatrix cov(psd);
    const KLBasis basis = eigendecompose_psd(cov);
    CHECK((reconstruct(basis) - psd).cwiseAbs().maxCoeff() <=
          1e-8 * cov.trace());
    // eigenvalue order statistic identity
    for (Eigen::Index m = 1; m < basis.rank(); ++m) {
      CHECK(truncation_error(basis, m) ==
            doctest::Approx(basis.eigenvalues()[m]));
    }
    // orthonormality
    CHECK((basis.eigenvectors().transpose() * basis.eigenvectors() -
           Eigen::MatrixXd::Identity(basis.rank(), basis.rank()))
              .cwiseAbs()
              .maxCoeff() < 1e-9);
  }
}

TEST_CASE("permutation invariance of the spectrum") {
  rng::GaussianStream g(13, 0);
  const Eigen::Index d = 5;
  const Eigen::MatrixXd psd = random_psd(d, g);
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(d);
  perm.setIdentity();
  std::swap(perm.indices()[0], perm.indices()[3]);
  std::swap(perm.indices()[1], perm.indices()[4]);
  const Eigen::MatrixXd permuted = perm * psd * perm.transpose();

  const KLBasis b1 = eigendecompose_psd(CovMatrix(psd));
  const KLBasis b2 = eigendecompose_psd(CovMatrix(permuted));
  REQUIRE(b1.rank() == b2.rank());
  for (Eigen::Index k = 0; k < b1.rank(); ++k) {
    CHECK(std::abs(b1.eigenvalues()[k] - b2.eigenvalues()[k]) < 1e-10);
  }
  // decomposing the permuted matrix commutes with permuting coordinates
  CHECK((reconstruct(b2) - perm * reconstruct(b1) * perm.transpose())
            .cwiseAbs()
            .maxCoeff() < 1e-9);
}

TEST_CASE("sampling covariance fidelity at 1e5 draws") {
  Eigen::MatrixXd diag(2, 2);
  diag << 4.0, 0.0, 0.0, 1.0;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));
  const int b_count = 100000;

  Eigen::MatrixXd second = Eigen::MatrixXd::Zero(2, 2);
  for (int b = 0; b < b_count; ++b) {
    rng::GaussianStream stream(99, rng::stream_id(rng::tag::kKlDraw, b));
    const GaussianDraw draw = kl_sample(basis, 2, stream);
    second += draw.values * draw.values.transpose();
  }
  second /= static_cast<double>(b_count);
  // Monte Carlo tolerance 3 sqrt(lambda_i lambda_j + lambda_ij^2) / sqrt(N)
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double lij = diag(i, j);
      const double band = 3.0 *
                          std::sqrt(diag(i, i) * diag(j, j) + lij * lij) /
                          std::sqrt(static_cast<double>(b_count));
      CHECK(std::abs(second(i, j) - diag(i, j)) <= band);
    }
  }
}

TEST_CASE("draws are bit-for-bit reproducible under the same seed") {
  Eigen::MatrixXd diag(3, 3);
  diag.setZero();
  diag(0, 0) = 2.0;
  diag(1, 1) = 1.0;
  diag(2, 2) = 0.5;
  const KLBasis basis = eigendecompose_psd(CovMatrix(diag));

  auto mean_sup = [&](std::uint64_t seed) {
    double total = 0.0;
    for (int b = 0; b < 100000; ++b) {
      rng::GaussianStream stream(seed, rng::stream_id(rng::tag::kKlDraw, b));
      total += sup_abs(kl_sample(basis, 3, stream));
    }
    return total / 100000.0;
  };
  CHECK(mean_sup(7) == mean_sup(7));
  CHECK(mean_sup(7) != mean_sup(8));
}
