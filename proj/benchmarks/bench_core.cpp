// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include <benchmark/benchmark.h>

#include "gpboot/bootstrap_engine.hpp"
#include "gpboot/ellipsoid.hpp"
#include "gpboot/rkhs.hpp"
#include "gpboot/specnorm.hpp"

using namespace gpboot;

namespace {

CovMatrix make_psd(Eigen::Index d, std::uint64_t seed) {
  rng::GaussianStream g(seed, 0);
  Eigen::MatrixXd a(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) a(i, j) = g.next();
  }
  return psd_repair(a * a.transpose() / static_cast<double>(d));
}

void BM_EigendecomposePsd(benchmark::State& state) {
  const CovMatrix cov = make_psd(state.range(0), 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eigendecompose_psd(cov));
  }
}
BENCHMARK(BM_EigendecomposePsd)->Arg(16)->Arg(64)->Arg(256);

void BM_KlSample(benchmark::State& state) {
  const KLBasis basis = eigendecompose_psd(make_psd(state.range(0), 2));
  std::uint64_t b = 0;
  for (auto _ : state) {
    rng::GaussianStream stream(5, rng::stream_id(rng::tag::kKlDraw, b++));
    benchmark::DoNotOptimize(
        sup_abs(kl_sample(basis, basis.rank(), stream)));
  }
}
BENCHMARK(BM_KlSample)->Arg(16)->Arg(64)->Arg(256);

void BM_SupDraws(benchmark::State& state) {
  const KLBasis basis = eigendecompose_psd(make_psd(64, 3));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        sup_draws(basis, basis.rank(), state.range(0), 7,
                  static_cast<int>(state.range(1))));
  }
}
BENCHMARK(BM_SupDraws)->Args({10000, 1})->Args({10000, 4});

void BM_GaussianProcessBootstrap(benchmark::State& state) {
  const Eigen::Index n = 200;
  const Eigen::Index d = 8;
  rng::GaussianStream g(11, 0);
  Eigen::MatrixXd data(n, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data(i, j) = g.next();
  }
  rng::GaussianStream net_stream(11, rng::stream_id(rng::tag::kNetPoint, 0));
  const IndexNet net = build_sphere_net(d, state.range(0), net_stream);
  const EvaluatedSample sample = evaluate_linear(data, net);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gaussian_process_bootstrap(sample, std::nullopt, 2000, 13));
  }
}
BENCHMARK(BM_GaussianProcessBootstrap)->Arg(64)->Arg(256);

void BM_EuclideanNormDraws(benchmark::State& state) {
  const KLBasis basis = eigendecompose_psd(make_psd(state.range(0), 17));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        euclidean_norm_draws(basis, basis.rank(), 5000, 19));
  }
}
BENCHMARK(BM_EuclideanNormDraws)->Arg(16)->Arg(64);

void BM_OperatorNormDense(benchmark::State& state) {
  rng::GaussianStream g(23, 0);
  Eigen::MatrixXd a(state.range(0), state.range(0));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g.next();
  }
  a = ((a + a.transpose()) / 2.0).eval();
  for (auto _ : state) {
    benchmark::DoNotOptimize(operator_norm(a));
  }
}
BENCHMARK(BM_OperatorNormDense)->Arg(16)->Arg(64);

void BM_OperatorNormPower(benchmark::State& state) {
  rng::GaussianStream g(29, 0);
  Eigen::MatrixXd a(state.range(0), state.range(0));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = g.next();
  }
  a = ((a + a.transpose()) / 2.0).eval();
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_iteration_norm(a));
  }
}
BENCHMARK(BM_OperatorNormPower)->Arg(64)->Arg(128);

void BM_BootstrapSpecnorm(benchmark::State& state) {
  rng::GaussianStream g(31, 0);
  Eigen::MatrixXd data(500, state.range(0));
  for (Eigen::Index i = 0; i < data.rows(); ++i) {
    for (Eigen::Index j = 0; j < data.cols(); ++j) data(i, j) = g.next();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(bootstrap_specnorm(data, 1000, 37));
  }
}
BENCHMARK(BM_BootstrapSpecnorm)->Arg(3)->Arg(6);

void BM_KrrFitAndBand(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  rng::GaussianStream g(41, 0);
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = g.uniform();
    y[i] = std::sin(6.0 * x(i, 0)) + 0.3 * g.next();
  }
  const KernelSpec kernel = KernelSpec::gaussian(0.3);
  Eigen::MatrixXd grid(15, 1);
  for (int i = 0; i < 15; ++i) grid(i, 0) = i / 14.0;
  for (auto _ : state) {
    const KRRFit fit = krr_fit(kernel, x, y, 1e-4);
    benchmark::DoNotOptimize(
        confidence_band(fit, kernel, grid, 0.1, 0, 500, 43));
  }
}
BENCHMARK(BM_KrrFitAndBand)->Arg(100)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
