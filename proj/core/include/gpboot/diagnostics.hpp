// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gpboot/bootstrap_engine.hpp"

namespace gpboot {

/// Outcome of one executable bound check. pass is evaluated with 3 Monte
/// Carlo standard errors of slack on each side.
struct BoundReport {
  std::string name;
  double lower = 0.0;
  double observed = 0.0;
  double upper = 0.0;
  double mc_error = 0.0;
  bool pass = false;
};

/// Simulation data models for the toy designs: X = a xi (rank one) or an
/// equicorrelated bounded design with covariance (1-rho) I + rho 11'.
struct DataModel {
  enum class Kind { rank_one, equicorrelated };
  enum class NoiseLaw { gaussian, two_point };

  Kind kind = Kind::rank_one;
  NoiseLaw noise = NoiseLaw::gaussian;
  Eigen::VectorXd direction;  // rank one direction a
  Eigen::Index dim = 1;
  double rho = 0.5;

  static DataModel rank_one(Eigen::VectorXd a,
                            NoiseLaw law = NoiseLaw::gaussian);
  static DataModel equicorrelated(Eigen::Index d, double rho);
  /// Parses "rank_one" / "equicorrelated"; throws UnknownGenerator otherwise.
  static Kind kind_from_id(const std::string& id);

  Eigen::Index dimension() const;
  CovMatrix population_cov() const;
  Eigen::VectorXd draw(rng::GaussianStream& stream) const;
};

/// Closed-form anti-concentration sandwich for the Levy concentration of the
/// supremum of a centered Gaussian process:
///   lower = (eps/sqrt(12)) / sqrt(var + eps^2/12)
///   upper = (eps*sqrt(12)) / sqrt(var + eps^2/12)
/// The upper value is returned raw; cap at 1 when reading it as a
/// probability.
std::pair<double, double> anticoncentration_bounds(double var_z, double eps);

/// Monte Carlo Levy concentration: max over t of the fraction of draws in
/// [t, t + eps], with t ranging over the draw values.
double levy_concentration(const SupSamples& samples, double eps);

/// Variance bound shapes with the unnamed absolute constants normalized to
/// c = 0, C = 1 (shape checks only):
///   lower = (sigma_lo / (1 + ez))^2
///   upper = sigma_hi^2 min(1, rho + (1/ez)^2)   with 1/0 = +inf
std::pair<double, double> variance_bound_shapes(double sigma_lo,
                                                double sigma_hi, double rho,
                                                double ez_over_sigma);

/// Monte Carlo Kolmogorov distance between ||Y||_inf, Y ~ N(0, Sigma), and
/// ||Z||_inf, Z ~ N(0, Omega), against the cube-root comparison bound with
/// constant 1 and the variance estimated from the draws. Informational shape
/// check.
BoundReport gaussian_comparison_check(const CovMatrix& sigma,
                                      const CovMatrix& omega,
                                      Eigen::Index b_count, std::uint64_t seed,
                                      int threads = 1);

/// For each n in n_list, simulates b_count replications of ||S_n||_inf under
/// the model and returns the Kolmogorov distance to b_count draws of
/// ||Z||_inf under the model's population covariance.
std::vector<std::pair<int, double>> berry_esseen_decay(
    const DataModel& model, const std::vector<int>& n_list,
    Eigen::Index b_count, std::uint64_t seed, int threads = 1);

/// Draws of ||Z||_inf for Z ~ N(0, cov) (full-rank KL sampling).
SupSamples gaussian_sup_norm_draws(const CovMatrix& cov, Eigen::Index b_count,
                                   std::uint64_t seed, int threads = 1);

double mc_mean(const std::vector<double>& xs);
double mc_variance(const std::vector<double>& xs);

}  // namespace gpboot
