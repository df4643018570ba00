// Copyright (c) 2026 The gpboot authors
// SPDX-License-Identifier: Apache-2.0

#include "gpboot/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include "gpboot/csv.hpp"
#include "gpboot/diagnostics.hpp"
#include "gpboot/ellipsoid.hpp"
#include "gpboot/parallel.hpp"
#include "gpboot/rkhs.hpp"
#include "gpboot/specnorm.hpp"
#include "gpboot/version.hpp"

namespace gpboot {

namespace {

using nlohmann::json;

const char* const kExperimentIds[] = {
    "bootstrap",         "berry_esseen",      "anticoncentration",
    "ellipsoid_coverage", "specnorm_coverage", "rkhs_band",
};

bool known_experiment(const std::string& id) {
  for (const char* known : kExperimentIds) {
    if (id == known) return true;
  }
  return false;
}

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw ConfigInvalid("config field '" + field + "': " + why);
}

double require_positive(const json& params, const std::string& field) {
  if (!params.contains(field)) invalid(field, "missing");
  const double value = params.at(field).get<double>();
  if (!(value > 0)) invalid(field, "must be positive");
  return value;
}

Eigen::Index require_positive_int(const json& params, const std::string& field) {
  if (!params.contains(field)) invalid(field, "missing");
  const auto value = params.at(field).get<std::int64_t>();
  if (value < 1) invalid(field, "must be a positive integer");
  return static_cast<Eigen::Index>(value);
}

double require_alpha(const json& params, const std::string& field) {
  if (!params.contains(field)) invalid(field, "missing");
  const double value = params.at(field).get<double>();
  if (!(value > 0.0 && value < 1.0)) invalid(field, "must lie in (0,1)");
  return value;
}

DataModel parse_model(const json& params) {
  if (!params.contains("model")) invalid("model", "missing");
  const json& m = params.at("model");
  if (!m.contains("kind")) invalid("model.kind", "missing");
  const auto kind = DataModel::kind_from_id(m.at("kind").get<std::string>());
  if (kind == DataModel::Kind::rank_one) {
    if (!m.contains("a")) invalid("model.a", "missing for rank_one");
    const auto coeffs = m.at("a").get<std::vector<double>>();
    Eigen::VectorXd a(static_cast<Eigen::Index>(coeffs.size()));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      a[static_cast<Eigen::Index>(i)] = coeffs[i];
    }
    auto law = DataModel::NoiseLaw::gaussian;
    if (m.value("noise", "gaussian") == std::string("two_point")) {
      law = DataModel::NoiseLaw::two_point;
    }
    return DataModel::rank_one(std::move(a), law);
  }
  const auto d = static_cast<Eigen::Index>(m.value("d", 1));
  const double rho = m.value("rho", 0.5);
  if (d < 1) invalid("model.d", "must be positive");
  if (!(rho >= 0.0 && rho < 1.0)) invalid("model.rho", "must lie in [0,1)");
  return DataModel::equicorrelated(d, rho);
}

json bound_report_json(const BoundReport& report) {
  return json{{"name", report.name},       {"lower", report.lower},
              {"observed", report.observed}, {"upper", report.upper},
              {"mc_error", report.mc_error}, {"pass", report.pass}};
}

void write_draws_csv(const std::filesystem::path& path,
                     const SupSamples& samples) {
  std::ofstream out(path);
  out << "draw\n";
  out.precision(17);
  for (double d : samples.draws) out << d << "\n";
}

// ---------------------------------------------------------------- bootstrap

json run_bootstrap(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const Eigen::Index b_count = require_positive_int(params, "B");

  Eigen::MatrixXd data;
  if (params.contains("data_csv")) {
    data = ingest_csv(params.at("data_csv").get<std::string>());
  } else {
    const DataModel model = parse_model(params);
    const Eigen::Index n = require_positive_int(params, "n");
    data.resize(n, model.dimension());
    rng::GaussianStream stream(config.seed,
                               rng::stream_id(rng::tag::kData, 0));
    for (Eigen::Index i = 0; i < n; ++i) {
      data.row(i) = model.draw(stream).transpose();
    }
  }
  if (data.rows() < 2) invalid("n", "need at least two observations");

  const Eigen::Index d = data.cols();
  Eigen::Index count = 2 * d;
  if (params.contains("net_count")) {
    count = require_positive_int(params, "net_count");
  }
  rng::GaussianStream net_stream(config.seed,
                                 rng::stream_id(rng::tag::kNetPoint, 0));
  const IndexNet net = build_sphere_net(d, count, net_stream);
  const EvaluatedSample evaluated = evaluate_linear(data, net);

  std::optional<Eigen::Index> m;
  if (params.contains("m") && params.at("m").is_number_integer()) {
    m = require_positive_int(params, "m");
  }
  const SupSamples draws =
      gaussian_process_bootstrap(evaluated, m, b_count, config.seed,
                                 config.threads);

  std::vector<double> alphas{0.5, 0.9, 0.95, 0.99};
  if (params.contains("alphas")) {
    alphas = params.at("alphas").get<std::vector<double>>();
  }
  json quantiles = json::object();
  for (double alpha : alphas) {
    if (!(alpha > 0 && alpha < 1)) invalid("alphas", "must lie in (0,1)");
    quantiles[std::to_string(alpha)] = quantile(draws, alpha);
  }

  json results{{"net_count", net.size()},
               {"net_delta", net.delta()},
               {"m", draws.m},
               {"B", draws.B()},
               {"degenerate", draws.degenerate},
               {"mean", mc_mean(draws.draws)},
               {"variance", mc_variance(draws.draws)},
               {"quantiles", quantiles}};

  const double var_hat = mc_variance(draws.draws);
  if (var_hat > 0) {
    const double delta = params.value("delta", net.delta());
    const double k_const = params.value("K", 1.0);
    results["quantile_shift"] = quantile_shift(delta, var_hat, k_const);
  }

  if (params.value("write_draws", false)) {
    write_draws_csv(std::filesystem::path(config.out_dir) /
                        (config.experiment + "_draws.csv"),
                    draws);
  }
  (void)checks;
  return results;
}

// ------------------------------------------------------------- berry_esseen

json run_berry_esseen(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const DataModel model = parse_model(params);
  const Eigen::Index b_count = require_positive_int(params, "B");
  if (!params.contains("n_list")) invalid("n_list", "missing");
  const auto n_list = params.at("n_list").get<std::vector<int>>();

  const auto decay =
      berry_esseen_decay(model, n_list, b_count, config.seed, config.threads);

  json table = json::array();
  for (const auto& [n, dist] : decay) {
    table.push_back(json{{"n", n}, {"distance", dist}});
  }

  const double mc = std::sqrt(2.0 / static_cast<double>(b_count));
  bool monotone = true;
  for (std::size_t i = 1; i < decay.size(); ++i) {
    if (decay[i].second > decay[i - 1].second + 2.0 * mc) monotone = false;
  }
  checks.push_back(json{{"name", "distance_nonincreasing_within_2mc"},
                        {"mc_error", mc},
                        {"pass", monotone}});
  return json{{"distances", table}};
}

// -------------------------------------------------------- anticoncentration

json run_anticoncentration(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const Eigen::Index b_count = require_positive_int(params, "B");
  const Eigen::Index d_max =
      params.contains("d_max") ? require_positive_int(params, "d_max") : 8;
  const Eigen::Index cases =
      params.contains("cases") ? require_positive_int(params, "cases") : 20;
  std::vector<double> eps_list{0.05, 0.2};
  if (params.contains("eps_list")) {
    eps_list = params.at("eps_list").get<std::vector<double>>();
  }

  json reports = json::array();
  Eigen::Index passed = 0;
  for (Eigen::Index c = 0; c < cases; ++c) {
    rng::GaussianStream gen(
        rng::derive_seed(config.seed, rng::tag::kRep, c),
        rng::stream_id(rng::tag::kData, 0));
    const Eigen::Index d = 2 + std::min<Eigen::Index>(
        d_max - 2, static_cast<Eigen::Index>(
                       gen.uniform() * static_cast<double>(d_max - 1)));
    Eigen::MatrixXd root(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) root(i, j) = gen.next();
    }
    const CovMatrix sigma = psd_repair(root * root.transpose() /
                                       static_cast<double>(d));
    const SupSamples draws = gaussian_sup_norm_draws(
        sigma, b_count, rng::derive_seed(config.seed, rng::tag::kProxy, c),
        config.threads);
    const double var = mc_variance(draws.draws);

    bool case_pass = true;
    for (double eps : eps_list) {
      const auto [lower, upper] = anticoncentration_bounds(var, eps);
      const double observed = levy_concentration(draws, eps);
      const double mc = std::sqrt(observed * (1.0 - observed) /
                                  static_cast<double>(b_count)) +
                        1.0 / static_cast<double>(b_count);
      BoundReport report;
      report.name = "sandwich_case" + std::to_string(c) + "_eps" +
                    std::to_string(eps);
      report.lower = lower;
      report.observed = observed;
      report.upper = upper;
      report.mc_error = mc;
      report.pass = observed >= lower - 3.0 * mc &&
                    observed <= std::min(1.0, upper) + 3.0 * mc;
      case_pass = case_pass && report.pass;
      reports.push_back(bound_report_json(report));
    }
    passed += case_pass ? 1 : 0;
  }
  checks.push_back(json{
      {"name", "sandwich_cases_pass"},
      {"passed", passed},
      {"cases", cases},
      {"pass", passed >= cases - 1}});

  json results{{"sandwich", reports}};

  if (params.contains("comparison")) {
    const json& cmp = params.at("comparison");
    const double delta = cmp.value("delta", 0.01);
    const Eigen::Index cb = cmp.value("B", Eigen::Index{20000});
    const int reps = cmp.value("reps", 5);
    auto observed_at = [&](double dlt, std::uint64_t salt) {
      Eigen::MatrixXd omega = Eigen::MatrixXd::Identity(2, 2);
      omega(1, 1) += dlt;
      double total = 0.0;
      for (int r = 0; r < reps; ++r) {
        const BoundReport rep = gaussian_comparison_check(
            CovMatrix(Eigen::MatrixXd::Identity(2, 2)), CovMatrix(omega), cb,
            rng::derive_seed(config.seed, rng::tag::kNoise,
                             salt * 1000 + static_cast<std::uint64_t>(r)),
            config.threads);
        total += rep.observed;
      }
      return total / static_cast<double>(reps);
    };
    const double obs1 = observed_at(delta, 1);
    const double obs8 = observed_at(8.0 * delta, 2);
    const double ratio = obs1 > 0 ? obs8 / obs1 : 0.0;
    results["comparison"] = json{{"delta", delta},
                                 {"observed_delta", obs1},
                                 {"observed_8delta", obs8},
                                 {"ratio", ratio}};
    checks.push_back(json{{"name", "comparison_cube_root_ratio"},
                          {"ratio", ratio},
                          {"pass", ratio <= 3.0}});
  }
  return results;
}

// ------------------------------------------------------- ellipsoid_coverage

json run_ellipsoid_coverage(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const Eigen::Index d = require_positive_int(params, "d");
  const Eigen::Index n = require_positive_int(params, "n");
  const double alpha = require_alpha(params, "alpha");
  const Eigen::Index reps = require_positive_int(params, "reps");
  const Eigen::Index b_count = require_positive_int(params, "B");

  EllipsoidCoverageModel model;
  model.remainder_scale = params.value("remainder_scale", 0.0);
  model.omega_eigenvalues.resize(d);
  const double ratio = params.value("eigen_decay", 0.5);
  if (!(ratio > 0 && ratio <= 1)) invalid("eigen_decay", "must lie in (0,1]");
  double value = 1.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    model.omega_eigenvalues[j] = value;
    value *= ratio;
  }

  const double coverage =
      coverage_simulation(model, n, alpha, static_cast<int>(reps), b_count,
                          config.seed, config.threads);
  json results{{"coverage", coverage},
               {"nominal", 1.0 - alpha},
               {"effective_rank",
                model.omega_eigenvalues.sum() /
                    model.omega_eigenvalues.maxCoeff()}};
  if (params.contains("expect")) {
    const auto band = params.at("expect").get<std::vector<double>>();
    if (band.size() != 2) invalid("expect", "must be [lo, hi]");
    checks.push_back(json{{"name", "coverage_in_band"},
                          {"coverage", coverage},
                          {"band", band},
                          {"pass", coverage >= band[0] && coverage <= band[1]}});
  }
  return results;
}

// -------------------------------------------------------- specnorm_coverage

json run_specnorm_coverage(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const Eigen::Index n = require_positive_int(params, "n");
  const Eigen::Index reps = require_positive_int(params, "reps");
  const Eigen::Index b_count = require_positive_int(params, "B");
  const double level = params.value("level", 0.9);
  if (!(level > 0 && level < 1)) invalid("level", "must lie in (0,1)");
  if (!params.contains("sigma_diag")) invalid("sigma_diag", "missing");
  const auto diag = params.at("sigma_diag").get<std::vector<double>>();
  const Eigen::Index d = static_cast<Eigen::Index>(diag.size());
  if (d < 1) invalid("sigma_diag", "must be nonempty");
  Eigen::VectorXd sigma_diag(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    if (!(diag[static_cast<std::size_t>(j)] >= 0)) {
      invalid("sigma_diag", "entries must be nonnegative");
    }
    sigma_diag[j] = diag[static_cast<std::size_t>(j)];
  }
  const CovMatrix sigma{Eigen::MatrixXd(sigma_diag.asDiagonal())};
  const Eigen::VectorXd scale = sigma_diag.cwiseSqrt();

  std::vector<char> covered(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, config.threads, [&](std::int64_t r) {
    const std::uint64_t rep_seed = rng::derive_seed(
        config.seed, rng::tag::kRep, static_cast<std::uint64_t>(r));
    rng::GaussianStream data_stream(rep_seed,
                                    rng::stream_id(rng::tag::kData, 0));
    Eigen::MatrixXd data(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) {
        data(i, j) = scale[j] * data_stream.next();
      }
    }
    const double t_n = specnorm_statistic(data, sigma);
    const SupSamples draws = bootstrap_specnorm(data, b_count, rep_seed);
    covered[static_cast<std::size_t>(r)] =
        t_n <= quantile(draws, level) ? 1 : 0;
  });
  double total = 0.0;
  for (char c : covered) total += c;
  const double coverage = total / static_cast<double>(reps);

  json results{{"coverage", coverage}, {"nominal", level}};
  if (params.contains("expect")) {
    const auto band = params.at("expect").get<std::vector<double>>();
    if (band.size() != 2) invalid("expect", "must be [lo, hi]");
    checks.push_back(json{{"name", "coverage_in_band"},
                          {"coverage", coverage},
                          {"band", band},
                          {"pass", coverage >= band[0] && coverage <= band[1]}});
  }
  return results;
}

// ---------------------------------------------------------------- rkhs_band

Eigen::MatrixXd column_grid(double from, double to, Eigen::Index count) {
  Eigen::MatrixXd grid(count, 1);
  for (Eigen::Index i = 0; i < count; ++i) {
    grid(i, 0) = count == 1
                     ? from
                     : from + (to - from) * static_cast<double>(i) /
                           static_cast<double>(count - 1);
  }
  return grid;
}

json run_rkhs_band(const ExperimentConfig& config, json& checks) {
  const json& params = config.params;
  const double lambda = require_positive(params, "lambda");
  const double bandwidth = require_positive(params, "bandwidth");
  const Eigen::Index b_count = require_positive_int(params, "B");
  const double alpha = require_alpha(params, "alpha");
  const KernelSpec kernel = KernelSpec::gaussian(bandwidth);
  const Eigen::Index m =
      params.contains("m") ? require_positive_int(params, "m") : 0;

  if (params.contains("data_csv")) {
    // Fit a band to supplied data: last column is the response.
    const Eigen::MatrixXd table =
        ingest_csv(params.at("data_csv").get<std::string>());
    if (table.cols() < 2) invalid("data_csv", "need predictor and response");
    const Eigen::MatrixXd x = table.leftCols(table.cols() - 1);
    const Eigen::VectorXd y = table.col(table.cols() - 1);
    const KRRFit fit = krr_fit(kernel, x, y, lambda);
    const Eigen::Index grid_count =
        params.contains("grid_count") ? require_positive_int(params, "grid_count")
                                      : 25;
    const Eigen::MatrixXd grid = column_grid(
        params.value("grid_from", x.col(0).minCoeff()),
        params.value("grid_to", x.col(0).maxCoeff()), grid_count);
    const BandResult band = confidence_band(fit, kernel, grid, alpha, m,
                                            b_count, config.seed,
                                            config.threads);
    json centers = json::array();
    for (Eigen::Index i = 0; i < band.center.size(); ++i) {
      centers.push_back(json{{"x", band.grid(i, 0)}, {"center", band.center[i]}});
    }
    return json{{"half_width", band.half_width},
                {"m", band.m},
                {"sigma_hat_sq", fit.sigma_hat_sq},
                {"band", centers},
                {"truncation_bias_documented", true}};
  }

  // Coverage simulation over a finite design: X uniform over `levels` points,
  // f0 in the representer span of three interior anchors.
  const Eigen::Index n = require_positive_int(params, "n");
  const Eigen::Index reps = require_positive_int(params, "reps");
  const Eigen::Index levels =
      params.contains("levels") ? require_positive_int(params, "levels") : 5;
  if (levels < 4) invalid("levels", "need at least 4 design points");
  const double noise_sigma = params.value("noise_sigma", 0.3);
  if (!(noise_sigma > 0)) invalid("noise_sigma", "must be positive");

  const Eigen::MatrixXd design = column_grid(0.1, 0.9, levels);
  Eigen::MatrixXd anchors(3, 1);
  anchors << design(1, 0), design(levels / 2, 0), design(levels - 2, 0);
  Eigen::VectorXd coef(3);
  coef << 1.0, -1.5, 1.0;
  const Eigen::VectorXd f0_grid = kernel_matrix(kernel, design, anchors) * coef;

  std::vector<char> covered(static_cast<std::size_t>(reps), 0);
  parallel_for(reps, config.threads, [&](std::int64_t r) {
    const std::uint64_t rep_seed = rng::derive_seed(
        config.seed, rng::tag::kRep, static_cast<std::uint64_t>(r));
    rng::GaussianStream stream(rep_seed, rng::stream_id(rng::tag::kData, 0));
    Eigen::MatrixXd x(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      auto level = static_cast<Eigen::Index>(stream.uniform() *
                                             static_cast<double>(levels));
      if (level >= levels) level = levels - 1;
      x(i, 0) = design(level, 0);
    }
    const Eigen::VectorXd f0_x = kernel_matrix(kernel, x, anchors) * coef;
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = f0_x[i] + noise_sigma * stream.next();
    }
    const KRRFit fit = krr_fit(kernel, x, y, lambda);
    const BandResult band =
        confidence_band(fit, kernel, design, alpha, m, b_count, rep_seed);
    covered[static_cast<std::size_t>(r)] =
        (band.center - f0_grid).cwiseAbs().maxCoeff() <= band.half_width ? 1
                                                                         : 0;
  });
  double total = 0.0;
  for (char c : covered) total += c;
  const double coverage = total / static_cast<double>(reps);

  json results{{"coverage", coverage},
               {"nominal", 1.0 - alpha},
               {"levels", levels},
               {"truncation_bias_documented", true}};
  if (params.contains("expect_min")) {
    const double expect_min = params.at("expect_min").get<double>();
    checks.push_back(json{{"name", "coverage_at_least"},
                          {"coverage", coverage},
                          {"threshold", expect_min},
                          {"pass", coverage >= expect_min}});
  }
  return results;
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json(const json& doc) {
  ExperimentConfig config;
  if (!doc.contains("experiment")) invalid("experiment", "missing");
  config.experiment = doc.at("experiment").get<std::string>();
  if (!known_experiment(config.experiment)) {
    invalid("experiment", "unknown id '" + config.experiment + "'");
  }
  if (!doc.contains("seed")) {
    invalid("seed", "missing (runs must be explicitly seeded)");
  }
  if (!doc.at("seed").is_number_unsigned() && !doc.at("seed").is_number_integer()) {
    invalid("seed", "must be an integer");
  }
  config.seed = doc.at("seed").get<std::uint64_t>();
  config.out_dir = doc.value("out", ".");
  config.threads = doc.value("threads", 1);
  if (config.threads < 1) invalid("threads", "must be >= 1");
  config.params = doc.value("params", json::object());
  return config;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) throw ConfigInvalid("cannot open config '" + path + "'");
  json doc;
  try {
    input >> doc;
  } catch (const json::exception& e) {
    throw ConfigInvalid("config '" + path + "' is not valid JSON: " +
                        e.what());
  }
  return from_json(doc);
}

json ExperimentConfig::to_json() const {
  // The report embeds everything that determines the result. Output
  // location and worker count are execution environment, not experiment
  // identity, and must not perturb the report bytes.
  return json{{"experiment", experiment}, {"seed", seed}, {"params", params}};
}

int run(const ExperimentConfig& config) {
  json checks = json::array();
  json results;
  if (config.experiment == "bootstrap") {
    results = run_bootstrap(config, checks);
  } else if (config.experiment == "berry_esseen") {
    results = run_berry_esseen(config, checks);
  } else if (config.experiment == "anticoncentration") {
    results = run_anticoncentration(config, checks);
  } else if (config.experiment == "ellipsoid_coverage") {
    results = run_ellipsoid_coverage(config, checks);
  } else if (config.experiment == "specnorm_coverage") {
    results = run_specnorm_coverage(config, checks);
  } else if (config.experiment == "rkhs_band") {
    results = run_rkhs_band(config, checks);
  } else {
    invalid("experiment", "unknown id");
  }

  bool all_pass = true;
  for (const auto& check : checks) {
    if (!check.value("pass", true)) all_pass = false;
  }

  const json report{{"config", config.to_json()},
                    {"library_version", kVersion},
                    {"results", results},
                    {"checks", checks}};

  std::filesystem::create_directories(config.out_dir);
  const std::filesystem::path path =
      std::filesystem::path(config.out_dir) /
      (config.experiment + "_report.json");
  std::ofstream out(path);
  if (!out) throw ConfigInvalid("cannot write report to '" + path.string() + "'");
  out << report.dump(2) << "\n";

  return all_pass ? 0 : 2;
}

}  // namespace gpboot
