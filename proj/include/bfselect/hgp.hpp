#pragma once

#include <chrono>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "bfselect/basis.hpp"
#include "bfselect/box_domain.hpp"
#include "bfselect/posterior.hpp"
#include "bfselect/predictive.hpp"
#include "bfselect/selection.hpp"

namespace bfselect {

/// Spectral density of the squared-exponential kernel in d dimensions:
/// S(omega) = sf2 * (2 pi l^2)^(d/2) * exp(-l^2 omega^2 / 2).
inline double se_spectral_density(double omega, double kernel_variance,
                                  double lengthscale, int dim) {
  if (!(kernel_variance > 0.0) || !(lengthscale > 0.0)) {
    throw std::invalid_argument(
        "se_spectral_density: parameters must be positive");
  }
  const double l2 = lengthscale * lengthscale;
  return kernel_variance *
         std::pow(2.0 * std::numbers::pi * l2, 0.5 * dim) *
         std::exp(-0.5 * l2 * omega * omega);
}

/// Frequency magnitude of the Laplacian eigenfunction with the given
/// multi-index on a box: omega_i = sqrt(sum_d (pi i_d / w_d)^2), matching
/// the wave numbers of the sine basis.
inline double laplacian_frequency(const Eigen::RowVectorXi& index,
                                  const BoxDomain& box) {
  if (index.size() != box.dimension()) {
    throw std::invalid_argument("laplacian_frequency: dimension mismatch");
  }
  double sum = 0.0;
  for (int k = 0; k < box.dimension(); ++k) {
    if (index[k] < 1) {
      throw std::invalid_argument("laplacian_frequency: indices must be >= 1");
    }
    const double w = std::numbers::pi * index[k] / box.width(k);
    sum += w * w;
  }
  return std::sqrt(sum);
}

/// Reduced-rank GP on a box: sine basis plus spectral-density prior
/// eigenvalues, K_ff ~= Phi Lambda Phi^T.
struct HgpModel {
  HilbertBasis basis;
  Eigen::VectorXd prior_eigenvalues;
  double kernel_variance;
  double lengthscale;
  double noise_variance;

  int size() const { return basis.size(); }
};

/// Assembles the model with prod(per_dim_counts) basis functions in
/// row-major multi-index order and lambda_i = S(omega_i).
inline HgpModel build_hgp(const BoxDomain& box,
                          const std::vector<int>& per_dim_counts,
                          double kernel_variance, double lengthscale,
                          double noise_variance) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("build_hgp: noise variance must be positive");
  }
  HilbertBasis basis = HilbertBasis::tensor(box, per_dim_counts);
  Eigen::VectorXd lambda(basis.size());
  for (int i = 0; i < basis.size(); ++i) {
    lambda[i] = se_spectral_density(
        laplacian_frequency(basis.indices().row(i), box), kernel_variance,
        lengthscale, box.dimension());
  }
  return HgpModel{std::move(basis), std::move(lambda), kernel_variance,
                  lengthscale, noise_variance};
}

/// Dual posterior from a batch of observations inside the model box.
inline DualPosterior hgp_fit(const HgpModel& model, const Eigen::MatrixXd& x,
                             const Eigen::VectorXd& y) {
  if (!model.basis.domain().contains_all(x)) {
    throw std::invalid_argument("hgp_fit: inputs must lie in the model box");
  }
  return dual_from_batch(design_matrix(model.basis, x), y,
                         model.noise_variance, model.prior_eigenvalues);
}

namespace detail {

inline PredictiveDistribution hgp_predict_impl(const HgpModel& model,
                                               const DualPosterior& dual,
                                               const Eigen::MatrixXd& x_star,
                                               const SelectionResult* selection) {
  if (!model.basis.domain().contains_all(x_star)) {
    throw std::invalid_argument("hgp_predict: test inputs must lie in the box");
  }
  const auto start = std::chrono::steady_clock::now();

  PredictiveDistribution pred;
  if (selection == nullptr) {
    const MomentPosterior post = dual_to_moment(dual);  // O(L^3)
    const Eigen::MatrixXd phi = design_matrix(model.basis, x_star);
    pred.means = phi * post.mean;
    pred.variances = (phi * post.covariance).cwiseProduct(phi).rowwise().sum();
  } else {
    const DualPosterior reduced = reduce_dual(dual, *selection);
    const MomentPosterior post = dual_to_moment(reduced);  // O(n_J^3)
    const Eigen::MatrixXd phi =
        design_matrix_subset(model.basis, x_star, selection->kept);
    pred.means = phi * post.mean;
    pred.variances = (phi * post.covariance).cwiseProduct(phi).rowwise().sum();
  }

  const auto stop = std::chrono::steady_clock::now();
  pred.latency_seconds = std::chrono::duration<double>(stop - start).count();
  detail::clamp_variances(pred.variances);
  return pred;
}

}  // namespace detail

/// Full-model predictive: factorizes with all L basis functions, then
/// evaluates mu* = Phi* m and var*_i = phi_i^T S phi_i per test point.
/// latency_seconds covers factorization plus per-point evaluation (the
/// training-side design matrix is already folded into the dual).
inline PredictiveDistribution hgp_predict(const HgpModel& model,
                                          const DualPosterior& dual,
                                          const Eigen::MatrixXd& x_star) {
  return detail::hgp_predict_impl(model, dual, x_star, nullptr);
}

/// Reduced-model predictive: restricts the dual to the selected index set
/// first (full B sub-block, not its diagonal), then factorizes at O(n_J^3).
inline PredictiveDistribution hgp_predict(const HgpModel& model,
                                          const DualPosterior& dual,
                                          const Eigen::MatrixXd& x_star,
                                          const SelectionResult& selection) {
  return detail::hgp_predict_impl(model, dual, x_star, &selection);
}

}  // namespace bfselect
