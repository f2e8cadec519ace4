#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bfselect/basis.hpp"
#include "bfselect/box_domain.hpp"
#include "bfselect/gp.hpp"
#include "bfselect/hgp.hpp"
#include "bfselect/metrics.hpp"
#include "bfselect/posterior.hpp"
#include "bfselect/predictive.hpp"
#include "bfselect/rng.hpp"
#include "bfselect/selection.hpp"

namespace bfselect {

/// Default demo seed, chosen so the default run exhibits the intended
/// qualitative contrast: integral-bound selection keeps the basis functions
/// closest to the default subdomain while simplified-bound selection drifts
/// to the domain edges.
inline constexpr std::uint64_t kRbfDemoDefaultSeed = 7;
inline constexpr std::uint64_t kRandomFnDefaultSeed = 1;

/// XOR salt separating the function-draw stream from the input/noise stream,
/// so nearby seeds do not share either stream.
inline constexpr std::uint64_t kFunctionSeedSalt = 0x9e3779b97f4a7c15ull;

/// Upper limit on the dense per-model working set (dual B, information
/// matrix, covariance, factor workspace).
inline constexpr long long kMemoryBudgetBytes = 4LL * 1024 * 1024 * 1024;

/// Retained count for a retention fraction rho: n_J = max(1, round(rho L)).
inline int retained_count(double rho, int basis_size) {
  return std::max(1, static_cast<int>(std::lround(rho * basis_size)));
}

// ---------------------------------------------------------------------------
// RBF demo: 1-D regression on [-1, 1], selection toward a subdomain Omega.
// ---------------------------------------------------------------------------

struct RbfDemoConfig {
  std::uint64_t seed = kRbfDemoDefaultSeed;
  int num_bfs = 10;
  int n_select = 2;
  double omega_lo = -0.5;
  double omega_hi = 0.0;
  std::string out_dir = ".";

  // Data generation and model settings (not exposed on the CLI).
  double domain_lo = -1.0;
  double domain_hi = 1.0;
  int n_train = 50;
  double data_lengthscale = 0.25;
  double data_kernel_variance = 0.5;
  double noise_std = 0.1;
  double basis_lengthscale = 0.2;
  double prior_variance = 1.0;
  int grid_points = 201;

  void validate() const {
    if (num_bfs < 1) {
      throw std::invalid_argument("rbf-demo: num-bfs must be >= 1");
    }
    if (n_select < 1 || n_select > num_bfs) {
      throw std::invalid_argument(
          "rbf-demo: n-select must lie in [1, num-bfs]");
    }
    if (!(omega_lo < omega_hi)) {
      throw std::invalid_argument(
          "rbf-demo: omega must satisfy lo < hi");
    }
    if (!(domain_lo < domain_hi)) {
      throw std::invalid_argument("rbf-demo: domain must satisfy lo < hi");
    }
    if (n_train < 1) {
      throw std::invalid_argument("rbf-demo: n_train must be >= 1");
    }
    if (!(data_lengthscale > 0.0) || !(data_kernel_variance > 0.0) ||
        !(noise_std > 0.0) || !(basis_lengthscale > 0.0) ||
        !(prior_variance > 0.0)) {
      throw std::invalid_argument(
          "rbf-demo: physical parameters must be positive");
    }
    if (grid_points < 2) {
      throw std::invalid_argument("rbf-demo: grid_points must be >= 2");
    }
  }
};

struct RbfDemoResult {
  Eigen::VectorXd grid;
  Eigen::VectorXd centers;
  MomentPosterior posterior;
  SelectionResult integral_selection;
  SelectionResult simplified_selection;
  PredictiveDistribution full;
  PredictiveDistribution integral_reduced;
  PredictiveDistribution simplified_reduced;
};

/// Draws a target function from a 1-D SE-GP prior, fits the RBF expansion,
/// selects n_select basis functions by the integral-bound and the
/// simplified-bound scores, and evaluates full and reduced predictives on a
/// dense grid.
inline RbfDemoResult run_rbf_demo(const RbfDemoConfig& config) {
  config.validate();
  const RbfBasis basis = RbfBasis::equidistant_1d(
      config.domain_lo, config.domain_hi, config.num_bfs,
      config.basis_lengthscale);

  Rng rng(config.seed);
  const Eigen::MatrixXd x_train = rng.uniform_matrix(
      config.n_train, 1, config.domain_lo, config.domain_hi);
  const SeKernel data_kernel(config.data_kernel_variance,
                             config.data_lengthscale);
  const Eigen::VectorXd f =
      sample_gp_prior(data_kernel, x_train, config.seed ^ kFunctionSeedSalt);
  const Eigen::VectorXd y =
      f + config.noise_std * rng.normal_vector(config.n_train);

  const Eigen::MatrixXd phi = design_matrix(basis, x_train);
  const Eigen::VectorXd lambda =
      Eigen::VectorXd::Constant(basis.size(), config.prior_variance);
  const double noise_variance = config.noise_std * config.noise_std;

  RbfDemoResult result;
  result.centers = basis.centers().col(0);
  result.posterior = fit_moment(phi, y, noise_variance, lambda);

  const BoxDomain omega = BoxDomain::interval(config.omega_lo, config.omega_hi);
  result.integral_selection = select_top_k(
      integral_scores(result.posterior.mean, basis, omega), config.n_select);
  result.simplified_selection = select_top_k(
      simplified_scores(result.posterior.mean), config.n_select);

  result.grid = Eigen::VectorXd::LinSpaced(config.grid_points,
                                           config.domain_lo, config.domain_hi);
  const Eigen::MatrixXd x_star = result.grid;
  result.full = predict_moment(basis, result.posterior, x_star);
  result.integral_reduced = predict_moment(
      basis, reduce_moment(result.posterior, result.integral_selection),
      result.integral_selection.kept, x_star);
  result.simplified_reduced = predict_moment(
      basis, reduce_moment(result.posterior, result.simplified_selection),
      result.simplified_selection.kept, x_star);
  return result;
}

// ---------------------------------------------------------------------------
// Random-function benchmark: f drawn from a 3-D SE-GP prior on [-1, 1]^3,
// reduced-rank models on [-2, 2]^3, sweep over basis size and retention.
// ---------------------------------------------------------------------------

enum class NlpdTarget { kGpMean, kTrueF };

struct RandomFnConfig {
  std::uint64_t seed = kRandomFnDefaultSeed;
  int n_train = 1000;
  double lengthscale = 0.1;
  double kernel_variance = 0.05;
  double noise_variance = 0.01;
  std::vector<int> ld_list = {2, 4, 6, 8, 10, 12};
  std::vector<double> rho_list = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
  NlpdTarget nlpd_target = NlpdTarget::kGpMean;
  std::string out_dir = ".";

  // Geometry and measurement settings (not exposed on the CLI).
  double data_lo = -1.0;
  double data_hi = 1.0;
  double box_lo = -2.0;
  double box_hi = 2.0;
  int test_points_per_dim = 15;
  int timing_repetitions = 5;
  bool verbose = false;

  void validate() const {
    if (n_train < 1) {
      throw std::invalid_argument("random-fn: n-train must be >= 1");
    }
    if (!(lengthscale > 0.0) || !(kernel_variance > 0.0) ||
        !(noise_variance > 0.0)) {
      throw std::invalid_argument(
          "random-fn: physical parameters must be positive");
    }
    if (ld_list.empty()) {
      throw std::invalid_argument("random-fn: ld-list must be non-empty");
    }
    for (int ld : ld_list) {
      if (ld < 1) {
        throw std::invalid_argument(
            "random-fn: ld-list entries must be >= 1");
      }
    }
    if (rho_list.empty()) {
      throw std::invalid_argument("random-fn: rho-list must be non-empty");
    }
    for (double rho : rho_list) {
      if (!(rho > 0.0) || !(rho <= 1.0)) {
        throw std::invalid_argument(
            "random-fn: rho values must lie in (0, 1]");
      }
    }
    if (!(data_lo < data_hi)) {
      throw std::invalid_argument("random-fn: data domain must satisfy lo < hi");
    }
    if (!(box_lo <= data_lo) || !(data_hi <= box_hi)) {
      throw std::invalid_argument(
          "random-fn: model box must contain the data domain");
    }
    if (test_points_per_dim < 2) {
      throw std::invalid_argument(
          "random-fn: test_points_per_dim must be >= 2");
    }
    if (timing_repetitions < 1) {
      throw std::invalid_argument(
          "random-fn: timing_repetitions must be >= 1");
    }
  }
};

/// Dense working set of one model of L basis functions, in bytes.
inline long long model_memory_bytes(long long basis_size) {
  return 4LL * 8LL * basis_size * basis_size;
}

/// Rejects any requested basis size whose dense working set exceeds the
/// budget, naming the offending size.
inline void check_memory_budget(const std::vector<int>& ld_list) {
  for (int ld : ld_list) {
    const long long l = static_cast<long long>(ld) * ld * ld;
    if (model_memory_bytes(l) > kMemoryBudgetBytes) {
      throw std::runtime_error(
          "random-fn: L = " + std::to_string(l) +
          " exceeds the memory budget of " +
          std::to_string(kMemoryBudgetBytes) + " bytes");
    }
  }
}

struct RandomFnData {
  Eigen::MatrixXd x_train;
  Eigen::VectorXd f_train;
  Eigen::VectorXd y_train;
  Eigen::MatrixXd x_test;
  Eigen::VectorXd f_test;
};

/// Equispaced tensor grid over [lo, hi]^3, last dimension fastest.
inline Eigen::MatrixXd cube_grid(double lo, double hi, int points_per_dim) {
  if (points_per_dim < 2) {
    throw std::invalid_argument("cube_grid: points_per_dim must be >= 2");
  }
  const Eigen::VectorXd g = Eigen::VectorXd::LinSpaced(points_per_dim, lo, hi);
  const int n = points_per_dim * points_per_dim * points_per_dim;
  Eigen::MatrixXd grid(n, 3);
  int row = 0;
  for (int i = 0; i < points_per_dim; ++i) {
    for (int j = 0; j < points_per_dim; ++j) {
      for (int k = 0; k < points_per_dim; ++k) {
        grid(row, 0) = g[i];
        grid(row, 1) = g[j];
        grid(row, 2) = g[k];
        ++row;
      }
    }
  }
  return grid;
}

/// Training inputs uniform over the data cube, test inputs on the dense
/// grid, and a single joint GP-prior draw over both so the true function is
/// consistent at the test locations. Training outputs add i.i.d. noise.
inline RandomFnData make_random_fn_data(const RandomFnConfig& config) {
  config.validate();
  RandomFnData data;
  Rng rng(config.seed);
  data.x_train = rng.uniform_matrix(config.n_train, 3, config.data_lo,
                                    config.data_hi);
  data.x_test =
      cube_grid(config.data_lo, config.data_hi, config.test_points_per_dim);

  const Eigen::Index n_train = data.x_train.rows();
  const Eigen::Index n_test = data.x_test.rows();
  Eigen::MatrixXd joint(n_train + n_test, 3);
  joint.topRows(n_train) = data.x_train;
  joint.bottomRows(n_test) = data.x_test;

  const SeKernel kernel(config.kernel_variance, config.lengthscale);
  const Eigen::VectorXd f =
      sample_gp_prior(kernel, joint, config.seed ^ kFunctionSeedSalt);
  data.f_train = f.head(n_train);
  data.f_test = f.tail(n_test);
  data.y_train = data.f_train +
                 std::sqrt(config.noise_variance) * rng.normal_vector(n_train);
  return data;
}

struct ResultRow {
  long basis_size;
  double rho;
  std::optional<double> rel_kl;
  std::optional<double> rel_nlpd;
  std::optional<double> rel_rmse;
  std::optional<double> rel_time;
  double abs_time_full_s;
  double abs_time_reduced_s;
};

/// One sweep of the benchmark: for every basis size, fits the reduced-rank
/// model, measures the full predictive, and for every retention fraction
/// measures the reduced predictive (selection included in its timed region).
/// Accuracy metrics are taken relative to the full model, with the exact GP
/// on the training data as the common reference.
inline std::vector<ResultRow> run_random_fn(const RandomFnConfig& config) {
  config.validate();
  check_memory_budget(config.ld_list);
  const RandomFnData data = make_random_fn_data(config);

  const SeKernel kernel(config.kernel_variance, config.lengthscale);
  if (config.verbose) {
    std::cerr << "random-fn: exact GP reference on " << data.x_train.rows()
              << " training points\n";
  }
  const PredictiveDistribution exact =
      gp_predict(kernel, data.x_train, data.y_train, config.noise_variance,
                 data.x_test);
  const Eigen::VectorXd& nlpd_targets =
      config.nlpd_target == NlpdTarget::kGpMean ? exact.means : data.f_test;

  const BoxDomain box = BoxDomain::cube(config.box_lo, config.box_hi, 3);
  std::vector<ResultRow> rows;
  for (int ld : config.ld_list) {
    const HgpModel model =
        build_hgp(box, {ld, ld, ld}, config.kernel_variance,
                  config.lengthscale, config.noise_variance);
    const DualPosterior dual = hgp_fit(model, data.x_train, data.y_train);
    if (config.verbose) {
      std::cerr << "random-fn: L = " << model.size() << "\n";
    }

    PredictiveDistribution full;
    const double time_full = time_predict(
        [&] { full = hgp_predict(model, dual, data.x_test); },
        config.timing_repetitions);
    const double kl_full = mean_gaussian_kl(full, exact);
    const double nlpd_full = nlpd(full, nlpd_targets);
    const double rmse_full = rmse(full.means, data.f_test);

    for (double rho : config.rho_list) {
      const int n_j = retained_count(rho, model.size());
      PredictiveDistribution reduced;
      const double time_reduced = time_predict(
          [&] {
            const SelectionResult selection =
                select_top_k(dual_scores(dual), n_j);
            reduced = hgp_predict(model, dual, data.x_test, selection);
          },
          config.timing_repetitions);

      ResultRow row;
      row.basis_size = model.size();
      row.rho = rho;
      row.rel_kl = relative_metric(mean_gaussian_kl(reduced, exact), kl_full);
      row.rel_nlpd = relative_metric(nlpd(reduced, nlpd_targets), nlpd_full);
      row.rel_rmse =
          relative_metric(rmse(reduced.means, data.f_test), rmse_full);
      row.rel_time = relative_metric(time_reduced, time_full);
      row.abs_time_full_s = time_full;
      row.abs_time_reduced_s = time_reduced;
      rows.push_back(row);
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// CSV and metadata emission. Numbers are written in shortest round-trip
// form, locale-independent, with LF line endings.
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_double(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (result.ec != std::errc()) {
    throw std::runtime_error("format_double: conversion failed");
  }
  return std::string(buffer, result.ptr);
}

inline std::string format_optional(const std::optional<double>& value) {
  return value ? format_double(*value) : std::string();
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open output file " + path.string());
  }
  return out;
}

inline void write_prediction_csv(const std::filesystem::path& path,
                                 const Eigen::VectorXd& grid,
                                 const PredictiveDistribution& pred) {
  std::ofstream out = open_output(path);
  out << "x,f,std\n";
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    out << format_double(grid[i]) << ',' << format_double(pred.means[i])
        << ',' << format_double(std::sqrt(pred.variances[i])) << '\n';
  }
}

inline void write_selection_rows(std::ofstream& out, const std::string& method,
                                 const SelectionResult& selection,
                                 const Eigen::VectorXd& centers) {
  for (int index : selection.kept) {
    out << method << ',' << index << ',' << format_double(centers[index])
        << ',' << format_double(selection.scores[index]) << '\n';
  }
}

}  // namespace detail

/// base.csv (full model), standard.csv (simplified-bound reduction),
/// integral.csv (integral-bound reduction), each `x,f,std`; selection.csv
/// lists the kept basis functions per method with 0-based indices.
inline void write_rbf_demo_outputs(const RbfDemoResult& result,
                                   const RbfDemoConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);
  detail::write_prediction_csv(dir / "base.csv", result.grid, result.full);
  detail::write_prediction_csv(dir / "standard.csv", result.grid,
                               result.simplified_reduced);
  detail::write_prediction_csv(dir / "integral.csv", result.grid,
                               result.integral_reduced);

  std::ofstream out = detail::open_output(dir / "selection.csv");
  out << "method,index,center,score\n";
  detail::write_selection_rows(out, "integral", result.integral_selection,
                               result.centers);
  detail::write_selection_rows(out, "simplified", result.simplified_selection,
                               result.centers);
}

inline std::string nlpd_target_name(NlpdTarget target) {
  return target == NlpdTarget::kGpMean ? "gp-mean" : "true-f";
}

/// results.csv with one row per (L, rho) cell; undefined relative cells are
/// emitted empty. metadata.txt captures the fully resolved configuration.
inline void write_random_fn_outputs(const std::vector<ResultRow>& rows,
                                    const RandomFnConfig& config) {
  const std::filesystem::path dir(config.out_dir);
  std::filesystem::create_directories(dir);

  std::ofstream out = detail::open_output(dir / "results.csv");
  out << "L,rho,rel_kl,rel_nlpd,rel_rmse,rel_time,abs_time_full_s,"
         "abs_time_reduced_s\n";
  for (const ResultRow& row : rows) {
    out << row.basis_size << ',' << detail::format_double(row.rho) << ','
        << detail::format_optional(row.rel_kl) << ','
        << detail::format_optional(row.rel_nlpd) << ','
        << detail::format_optional(row.rel_rmse) << ','
        << detail::format_optional(row.rel_time) << ','
        << detail::format_double(row.abs_time_full_s) << ','
        << detail::format_double(row.abs_time_reduced_s) << '\n';
  }

  std::ofstream meta = detail::open_output(dir / "metadata.txt");
  meta << "experiment=random-fn\n";
  meta << "seed=" << config.seed << '\n';
  meta << "n_train=" << config.n_train << '\n';
  meta << "lengthscale=" << detail::format_double(config.lengthscale) << '\n';
  meta << "kernel_variance=" << detail::format_double(config.kernel_variance)
       << '\n';
  meta << "noise_variance=" << detail::format_double(config.noise_variance)
       << '\n';
  meta << "ld_list=";
  for (std::size_t i = 0; i < config.ld_list.size(); ++i) {
    meta << (i > 0 ? "," : "") << config.ld_list[i];
  }
  meta << '\n';
  meta << "rho_list=";
  for (std::size_t i = 0; i < config.rho_list.size(); ++i) {
    meta << (i > 0 ? "," : "")
         << detail::format_double(config.rho_list[i]);
  }
  meta << '\n';
  meta << "nlpd_target=" << nlpd_target_name(config.nlpd_target) << '\n';
  meta << "data_domain_lo=" << detail::format_double(config.data_lo) << '\n';
  meta << "data_domain_hi=" << detail::format_double(config.data_hi) << '\n';
  meta << "model_box_lo=" << detail::format_double(config.box_lo) << '\n';
  meta << "model_box_hi=" << detail::format_double(config.box_hi) << '\n';
  meta << "test_points_per_dim=" << config.test_points_per_dim << '\n';
  meta << "timing_repetitions=" << config.timing_repetitions << '\n';
}

}  // namespace bfselect
