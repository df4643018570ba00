// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/specnorm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gpboot/parallel.hpp"

namespace gpboot {

namespace {

constexpr double kSymTol = 1e-10;
constexpr Eigen::Index kDenseNormLimit = 64;

void require_symmetric(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw NotSymmetric("matrix is not square");
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = j + 1; i < a.rows(); ++i) {
      if (std::abs(a(i, j) - a(j, i)) > kSymTol * (1.0 + std::abs(a(i, j)))) {
        throw NotSymmetric("asymmetry at (" + std::to_string(i) + "," +
                           std::to_string(j) + ")");
      }
    }
  }
}

}  // namespace

Eigen::Index vech_index(Eigen::Index i, Eigen::Index j, Eigen::Index d) {
  // column j contributes d - j entries starting at row j
  return j * d - j * (j - 1) / 2 + (i - j);
}

VechVector vech(const Eigen::MatrixXd& a) {
  require_symmetric(a);
  const Eigen::Index d = a.rows();
  VechVector v;
  v.d = d;
  v.entries.resize(d * (d + 1) / 2);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) v.entries[k++] = a(i, j);
  }
  return v;
}

Eigen::MatrixXd unvech(const VechVector& v) {
  const Eigen::Index d = v.d;
  if (v.entries.size() != d * (d + 1) / 2) {
    throw DimensionMismatch("vech length does not match dimension");
  }
  Eigen::MatrixXd a(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = j; i < d; ++i) {
      a(i, j) = v.entries[k];
      a(j, i) = v.entries[k];
      ++k;
    }
  }
  return a;
}

Eigen::MatrixXd duplication_matrix(Eigen::Index d) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(d * d, d * (d + 1) / 2);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const Eigen::Index vec_pos = j * d + i;  // column-major vec
      h(vec_pos, vech_index(std::max(i, j), std::min(i, j), d)) = 1.0;
    }
  }
  return h;
}

double power_iteration_norm(const Eigen::MatrixXd& a, double tol,
                            int max_iter) {
  require_symmetric(a);
  const Eigen::Index d = a.rows();
  if (a.cwiseAbs().maxCoeff() == 0.0) return 0.0;
  // Deterministic start with a mild ramp so it is not orthogonal to the top
  // eigenspace for the structured matrices we meet in practice.
  Eigen::VectorXd v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v[i] = 1.0 + 0.5 * static_cast<double>(i) / static_cast<double>(d);
  }
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    // one step of power iteration on A^2 resolves +/- eigenvalue pairs
    const Eigen::VectorXd w = a * v;
    const double wn = w.norm();
    if (wn == 0.0) return 0.0;
    const Eigen::VectorXd u = a * w;
    const double un = u.norm();
    if (un == 0.0) return wn;
    const double next = un / wn;  // Rayleigh-type estimate of |lambda|_max
    v = u / un;
    if (it > 0 && std::abs(next - estimate) <= tol * std::max(1.0, next)) {
      return next;
    }
    estimate = next;
  }
  throw NoConvergence("power iteration did not converge in " +
                      std::to_string(max_iter) + " iterations");
}

double operator_norm(const Eigen::MatrixXd& a) {
  require_symmetric(a);
  if (a.rows() <= kDenseNormLimit) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a);
    if (solver.info() != Eigen::Success) {
      throw NoConvergence("symmetric eigensolver failed");
    }
    return solver.eigenvalues().cwiseAbs().maxCoeff();
  }
  return power_iteration_norm(a);
}

double specnorm_statistic(const Eigen::MatrixXd& data, const CovMatrix& sigma) {
  if (data.cols() != sigma.dim()) {
    throw DimensionMismatch("data dimension " + std::to_string(data.cols()) +
                            " != covariance dimension " +
                            std::to_string(sigma.dim()));
  }
  if (data.rows() < 1) throw InvalidArgument("need at least one observation");
  const double n = static_cast<double>(data.rows());
  const Eigen::MatrixXd sigma_hat = data.transpose() * data / n;
  return std::sqrt(n) * operator_norm(sigma_hat - sigma.entries());
}

CovMatrix omega_hat_vech(const Eigen::MatrixXd& data, bool center) {
  const Eigen::Index n = data.rows();
  const Eigen::Index d = data.cols();
  if (n < 2) throw TooFewSamples("omega_hat needs n >= 2");
  Eigen::MatrixXd rows = data;
  if (center) {
    rows = data.rowwise() - data.colwise().mean();
  }
  const Eigen::MatrixXd sigma_hat =
      rows.transpose() * rows / static_cast<double>(n);
  const Eigen::Index q = d * (d + 1) / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd w(q);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd x = rows.row(i).transpose();
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < d; ++c) {
      for (Eigen::Index r = c; r < d; ++r) {
        w[k++] = x[r] * x[c] - sigma_hat(r, c);
      }
    }
    omega.selfadjointView<Eigen::Lower>().rankUpdate(w, 1.0);
  }
  Eigen::MatrixXd full = omega.selfadjointView<Eigen::Lower>();
  full /= static_cast<double>(n);
  return psd_repair(full);
}

SupSamples bootstrap_specnorm(const Eigen::MatrixXd& data, Eigen::Index b_count,
                              std::uint64_t seed, int threads, bool center,
                              std::optional<Eigen::Index> m) {
  if (b_count < 100) {
    throw InvalidArgument("Monte Carlo size must be >= 100");
  }
  const Eigen::Index d = data.cols();
  if (d > 64 && !m.has_value()) {
    throw InvalidArgument(
        "full KL decomposition is limited to d <= 64; pass a truncation "
        "level for larger dimensions");
  }
  const CovMatrix omega = omega_hat_vech(data, center);
  const KLBasis basis = eigendecompose_psd(omega);
  const Eigen::Index level =
      std::min<Eigen::Index>(m.value_or(basis.rank()), basis.rank());

  SupSamples samples;
  samples.seed = seed;
  samples.m = level;
  samples.draws.assign(static_cast<std::size_t>(b_count), 0.0);
  if (basis.rank() == 0) {
    samples.degenerate = true;
    return samples;
  }
  parallel_for(b_count, threads, [&](std::int64_t b) {
    rng::GaussianStream stream(
        seed, rng::stream_id(rng::tag::kKlDraw, static_cast<std::uint64_t>(b)));
    const GaussianDraw z = kl_sample(basis, level, stream);
    VechVector v;
    v.d = d;
    v.entries = z.values;
    samples.draws[static_cast<std::size_t>(b)] = operator_norm(unvech(v));
  });
  std::sort(samples.draws.begin(), samples.draws.end());
  return samples;
}

}  // namespace gpboot
