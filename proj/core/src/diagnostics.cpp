// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpboot/parallel.hpp"

namespace gpboot {

namespace {

double rademacher(rng::GaussianStream& stream) {
  return stream.uniform() > 0.5 ? 1.0 : -1.0;
}

}  // namespace

DataModel DataModel::rank_one(Eigen::VectorXd a, NoiseLaw law) {
  if (a.size() == 0 || a.norm() == 0.0) {
    throw InvalidArgument("rank-one direction must be nonzero");
  }
  DataModel model;
  model.kind = Kind::rank_one;
  model.noise = law;
  model.direction = std::move(a);
  model.dim = model.direction.size();
  return model;
}

DataModel DataModel::equicorrelated(Eigen::Index d, double rho) {
  if (d < 1) throw InvalidArgument("dimension must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw InvalidArgument("equicorrelated rho must lie in [0,1)");
  }
  DataModel model;
  model.kind = Kind::equicorrelated;
  model.dim = d;
  model.rho = rho;
  return model;
}

DataModel::Kind DataModel::kind_from_id(const std::string& id) {
  if (id == "rank_one") return Kind::rank_one;
  if (id == "equicorrelated") return Kind::equicorrelated;
  throw UnknownGenerator("unknown data model '" + id + "'");
}

Eigen::Index DataModel::dimension() const { return dim; }

CovMatrix DataModel::population_cov() const {
  if (kind == Kind::rank_one) {
    return CovMatrix(direction * direction.transpose());
  }
  Eigen::MatrixXd cov =
      Eigen::MatrixXd::Constant(dim, dim, rho) +
      (1.0 - rho) * Eigen::MatrixXd::Identity(dim, dim);
  return CovMatrix(std::move(cov));
}

Eigen::VectorXd DataModel::draw(rng::GaussianStream& stream) const {
  if (kind == Kind::rank_one) {
    const double xi =
        noise == NoiseLaw::gaussian ? stream.next() : rademacher(stream);
    return direction * xi;
  }
  // Bounded equicorrelated design: sqrt(rho) e0 1 + sqrt(1-rho) e, with
  // independent Rademacher e0, e_1..e_d.
  const double shared = std::sqrt(rho) * rademacher(stream);
  Eigen::VectorXd x(dim);
  const double scale = std::sqrt(1.0 - rho);
  for (Eigen::Index i = 0; i < dim; ++i) {
    x[i] = shared + scale * rademacher(stream);
  }
  return x;
}

std::pair<double, double> anticoncentration_bounds(double var_z, double eps) {
  if (!(var_z > 0)) {
    throw NonpositiveVariance("variance must be positive");
  }
  if (eps < 0) throw InvalidArgument("eps must be nonnegative");
  const double root12 = std::sqrt(12.0);
  const double denom = std::sqrt(var_z + eps * eps / 12.0);
  return {(eps / root12) / denom, (eps * root12) / denom};
}

double levy_concentration(const SupSamples& samples, double eps) {
  if (samples.draws.empty()) throw InvalidArgument("no draws");
  if (!(eps > 0)) throw InvalidArgument("eps must be positive");
  const auto& xs = samples.draws;  // already sorted
  const double n = static_cast<double>(xs.size());
  std::size_t hi = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (hi < i) hi = i;
    while (hi < xs.size() && xs[hi] <= xs[i] + eps) ++hi;
    best = std::max(best, hi - i);
  }
  return static_cast<double>(best) / n;
}

std::pair<double, double> variance_bound_shapes(double sigma_lo,
                                                double sigma_hi, double rho,
                                                double ez_over_sigma) {
  if (!(sigma_lo > 0) || sigma_lo > sigma_hi) {
    throw InvalidArgument("need 0 < sigma_lo <= sigma_hi");
  }
  if (!(rho >= 0 && rho <= 1)) throw InvalidArgument("rho must lie in [0,1]");
  if (ez_over_sigma < 0) throw InvalidArgument("E[Z/sigma] must be >= 0");
  const double lower =
      (sigma_lo / (1.0 + ez_over_sigma)) * (sigma_lo / (1.0 + ez_over_sigma));
  const double hi2 = sigma_hi * sigma_hi;
  double upper = hi2;
  if (ez_over_sigma > 0) {
    const double tail = sigma_hi / ez_over_sigma;
    upper = std::min(hi2, hi2 * rho + tail * tail);
  }
  return {lower, upper};
}

SupSamples gaussian_sup_norm_draws(const CovMatrix& cov, Eigen::Index b_count,
                                   std::uint64_t seed, int threads) {
  const KLBasis basis = eigendecompose_psd(cov);
  return sup_draws(basis, std::max<Eigen::Index>(basis.rank(), 1), b_count,
                   seed, threads);
}

double mc_mean(const std::vector<double>& xs) {
  double total = 0.0;
  for (double x : xs) total += x;
  return total / static_cast<double>(xs.size());
}

double mc_variance(const std::vector<double>& xs) {
  const double mean = mc_mean(xs);
  double total = 0.0;
  for (double x : xs) total += (x - mean) * (x - mean);
  return total / static_cast<double>(xs.size());
}

BoundReport gaussian_comparison_check(const CovMatrix& sigma,
                                      const CovMatrix& omega,
                                      Eigen::Index b_count, std::uint64_t seed,
                                      int threads) {
  if (sigma.dim() != omega.dim()) {
    throw DimensionMismatch("covariance dimensions differ");
  }
  const SupSamples y = gaussian_sup_norm_draws(
      sigma, b_count, rng::derive_seed(seed, rng::tag::kProxy, 0), threads);
  const SupSamples z = gaussian_sup_norm_draws(
      omega, b_count, rng::derive_seed(seed, rng::tag::kProxy, 1), threads);

  BoundReport report;
  report.name = "gaussian_comparison";
  report.observed = kolmogorov_distance(y, z);
  report.mc_error = std::sqrt(2.0 / static_cast<double>(b_count));
  const double var_max = std::max(mc_variance(y.draws), mc_variance(z.draws));
  const double diff =
      (sigma.entries() - omega.entries()).cwiseAbs().maxCoeff();
  report.lower = 0.0;
  report.upper = var_max > 0
                     ? std::cbrt(diff / var_max)
                     : (diff > 0 ? std::numeric_limits<double>::infinity()
                                 : 0.0);
  const double capped = std::min(1.0, report.upper);
  report.pass = report.observed >= report.lower - 3.0 * report.mc_error &&
                report.observed <= capped + 3.0 * report.mc_error;
  return report;
}

std::vector<std::pair<int, double>> berry_esseen_decay(
    const DataModel& model, const std::vector<int>& n_list,
    Eigen::Index b_count, std::uint64_t seed, int threads) {
  if (n_list.empty()) throw InvalidArgument("n_list must be nonempty");
  for (std::size_t i = 1; i < n_list.size(); ++i) {
    if (n_list[i] <= n_list[i - 1]) {
      throw InvalidArgument("n_list must be strictly increasing");
    }
  }
  const CovMatrix population = model.population_cov();
  std::vector<std::pair<int, double>> result;
  result.reserve(n_list.size());
  for (std::size_t ni = 0; ni < n_list.size(); ++ni) {
    const int n = n_list[ni];
    if (n < 1) throw InvalidArgument("sample sizes must be positive");
    const std::uint64_t sim_seed =
        rng::derive_seed(seed, rng::tag::kData, ni);
    std::vector<double> stats(static_cast<std::size_t>(b_count), 0.0);
    parallel_for(b_count, threads, [&](std::int64_t b) {
      rng::GaussianStream stream(
          sim_seed,
          rng::stream_id(rng::tag::kData, static_cast<std::uint64_t>(b)));
      Eigen::VectorXd sum = Eigen::VectorXd::Zero(model.dimension());
      for (int i = 0; i < n; ++i) sum += model.draw(stream);
      stats[static_cast<std::size_t>(b)] =
          sum.cwiseAbs().maxCoeff() / std::sqrt(static_cast<double>(n));
    });
    const SupSamples proxy = gaussian_sup_norm_draws(
        population, b_count, rng::derive_seed(seed, rng::tag::kProxy, ni),
        threads);
    result.emplace_back(n, kolmogorov_distance(std::move(stats), proxy.draws));
  }
  return result;
}

}  // namespace gpboot
