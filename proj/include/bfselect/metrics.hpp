#pragma once

#include <chrono>
#include <cmath>
#include <iostream>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bfselect/linalg.hpp"
#include "bfselect/predictive.hpp"

namespace bfselect {

/// Variances at or below this floor are lifted before entering logs or
/// denominators in the metrics below.
inline constexpr double kVarianceFloor = 1e-12;

inline double rmse(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("rmse: size mismatch");
  }
  if (a.size() == 0) {
    throw std::invalid_argument("rmse: empty input");
  }
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

/// KL(N(mean0, var0) || N(mean1, var1)) between scalar Gaussians.
inline double gaussian_kl(double mean0, double var0, double mean1,
                          double var1) {
  if (!(var0 > 0.0) || !(var1 > 0.0)) {
    throw std::invalid_argument("gaussian_kl: variances must be positive");
  }
  const double diff = mean1 - mean0;
  return 0.5 * (var0 / var1 + diff * diff / var1 - 1.0 + std::log(var1 / var0));
}

namespace detail {

inline Eigen::VectorXd floor_variances(const Eigen::VectorXd& variances,
                                       const char* caller) {
  Eigen::VectorXd floored = variances;
  int lifted = 0;
  for (Eigen::Index i = 0; i < floored.size(); ++i) {
    if (floored[i] < kVarianceFloor) {
      floored[i] = kVarianceFloor;
      ++lifted;
    }
  }
  if (lifted > 0) {
    std::cerr << caller << ": floored " << lifted
              << " variance(s) at 1e-12\n";
  }
  return floored;
}

}  // namespace detail

/// Per-point KL from the candidate predictive to the reference predictive.
/// Variances at or below the floor are lifted first.
inline Eigen::VectorXd pointwise_gaussian_kl(const Eigen::VectorXd& means0,
                                             const Eigen::VectorXd& vars0,
                                             const Eigen::VectorXd& means1,
                                             const Eigen::VectorXd& vars1) {
  if (means0.size() != vars0.size() || means0.size() != means1.size() ||
      means0.size() != vars1.size()) {
    throw std::invalid_argument("pointwise_gaussian_kl: size mismatch");
  }
  if (means0.size() == 0) {
    throw std::invalid_argument("pointwise_gaussian_kl: empty input");
  }
  const Eigen::VectorXd v0 =
      detail::floor_variances(vars0, "pointwise_gaussian_kl");
  const Eigen::VectorXd v1 =
      detail::floor_variances(vars1, "pointwise_gaussian_kl");
  Eigen::VectorXd kl(means0.size());
  for (Eigen::Index i = 0; i < means0.size(); ++i) {
    kl[i] = gaussian_kl(means0[i], v0[i], means1[i], v1[i]);
  }
  return kl;
}

inline Eigen::VectorXd pointwise_gaussian_kl(
    const PredictiveDistribution& candidate,
    const PredictiveDistribution& reference) {
  return pointwise_gaussian_kl(candidate.means, candidate.variances,
                               reference.means, reference.variances);
}

/// Mean pointwise KL from the candidate predictive to the reference
/// predictive.
inline double mean_gaussian_kl(const Eigen::VectorXd& means0,
                               const Eigen::VectorXd& vars0,
                               const Eigen::VectorXd& means1,
                               const Eigen::VectorXd& vars1) {
  return pointwise_gaussian_kl(means0, vars0, means1, vars1).mean();
}

/// Mean negative log predictive density of targets under per-point
/// Gaussian predictives. Variances at or below the floor are lifted first.
inline double nlpd(const Eigen::VectorXd& means,
                   const Eigen::VectorXd& variances,
                   const Eigen::VectorXd& targets) {
  if (means.size() != variances.size() || means.size() != targets.size()) {
    throw std::invalid_argument("nlpd: size mismatch");
  }
  if (means.size() == 0) {
    throw std::invalid_argument("nlpd: empty input");
  }
  const Eigen::VectorXd v = detail::floor_variances(variances, "nlpd");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < means.size(); ++i) {
    const double diff = targets[i] - means[i];
    sum += 0.5 * std::log(2.0 * std::numbers::pi * v[i]) +
           0.5 * diff * diff / v[i];
  }
  return sum / static_cast<double>(means.size());
}

inline double mean_gaussian_kl(const PredictiveDistribution& candidate,
                               const PredictiveDistribution& reference) {
  return mean_gaussian_kl(candidate.means, candidate.variances,
                          reference.means, reference.variances);
}

inline double nlpd(const PredictiveDistribution& pred,
                   const Eigen::VectorXd& targets) {
  return nlpd(pred.means, pred.variances, targets);
}

/// candidate / baseline, or nullopt when the baseline is too close to zero
/// for the ratio to be meaningful.
inline std::optional<double> relative_metric(double candidate,
                                             double baseline) {
  if (std::abs(baseline) <= 1e-9) {
    return std::nullopt;
  }
  return candidate / baseline;
}

/// Median wall-clock seconds of `repetitions` calls to `fn`, after one
/// discarded warm-up call. `fn` is responsible for capturing its own result.
template <typename F>
double time_predict(F&& fn, int repetitions) {
  if (repetitions < 1) {
    throw std::invalid_argument("time_predict: repetitions must be >= 1");
  }
  fn();  // warm-up, not timed
  std::vector<double> times;
  times.reserve(static_cast<std::size_t>(repetitions));
  for (int r = 0; r < repetitions; ++r) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    times.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return median(times);
}

}  // namespace bfselect
