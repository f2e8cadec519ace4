#pragma once

#include <cstdint>
#include <stdexcept>

#include <Eigen/Core>

#include "bfselect/linalg.hpp"
#include "bfselect/predictive.hpp"
#include "bfselect/rng.hpp"

namespace bfselect {

/// Squared-exponential kernel kappa(x, x') = sf2 * exp(-|x - x'|^2 / (2 l^2)).
struct SeKernel {
  double kernel_variance;
  double lengthscale;

  SeKernel(double kernel_variance_, double lengthscale_)
      : kernel_variance(kernel_variance_), lengthscale(lengthscale_) {
    if (!(kernel_variance > 0.0) || !(lengthscale > 0.0)) {
      throw std::invalid_argument("SeKernel: parameters must be positive");
    }
  }

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& y) const {
    return kernel_variance *
           std::exp(-(x - y).squaredNorm() /
                    (2.0 * lengthscale * lengthscale));
  }
};

/// Cross-kernel matrix, entry (i, j) = kappa(A_i, B_j); one point per row.
/// Entries are evaluated directly, so kernel_matrix(A, B) is exactly the
/// transpose of kernel_matrix(B, A).
inline Eigen::MatrixXd kernel_matrix(const SeKernel& kernel,
                                     const Eigen::MatrixXd& a,
                                     const Eigen::MatrixXd& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("kernel_matrix: point dimensions must match");
  }
  Eigen::MatrixXd k(a.rows(), b.rows());
  const double inv = -1.0 / (2.0 * kernel.lengthscale * kernel.lengthscale);
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      k(i, j) = kernel.kernel_variance *
                std::exp(inv * (a.row(i) - b.row(j)).squaredNorm());
    }
  }
  return k;
}

/// Exact GP regression posterior at the rows of X_star:
///
///   mu*    = K_*f (K_ff + sigma^2 I)^-1 y
///   var*_i = kappa(x*_i, x*_i) - k_*i^T (K_ff + sigma^2 I)^-1 k_*i
///
/// The latent-function predictive: observation noise is not added to var*.
inline PredictiveDistribution gp_predict(const SeKernel& kernel,
                                         const Eigen::MatrixXd& x,
                                         const Eigen::VectorXd& y,
                                         double noise_variance,
                                         const Eigen::MatrixXd& x_star) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("gp_predict: noise variance must be positive");
  }
  if (x.rows() != y.size()) {
    throw std::invalid_argument("gp_predict: row count of x must match y");
  }
  PredictiveDistribution pred;
  if (x.rows() == 0) {
    pred.means = Eigen::VectorXd::Zero(x_star.rows());
    pred.variances =
        Eigen::VectorXd::Constant(x_star.rows(), kernel.kernel_variance);
    return pred;
  }
  Eigen::MatrixXd gram = kernel_matrix(kernel, x, x);
  gram.diagonal().array() += noise_variance;
  const auto llt = cholesky_with_jitter(gram);

  const Eigen::MatrixXd k_cross = kernel_matrix(kernel, x_star, x);
  pred.means = k_cross * llt.solve(y);
  // var_i = sf2 - |L^-1 k_*i|^2
  const Eigen::MatrixXd w = llt.matrixL().solve(k_cross.transpose());
  pred.variances = (kernel.kernel_variance -
                    w.colwise().squaredNorm().transpose().array())
                       .matrix();
  detail::clamp_variances(pred.variances);
  return pred;
}

/// Draws f ~ N(0, K_XX) with a seeded generator: f = L z for the jittered
/// Cholesky factor L and standard-normal z. Deterministic per (seed, row
/// order of X).
inline Eigen::VectorXd sample_gp_prior(const SeKernel& kernel,
                                       const Eigen::MatrixXd& x,
                                       std::uint64_t seed) {
  if (x.rows() > 5000) {
    throw std::invalid_argument(
        "sample_gp_prior: at most 5000 points (dense Cholesky budget)");
  }
  const Eigen::MatrixXd gram = kernel_matrix(kernel, x, x);
  const auto llt = cholesky_with_jitter(gram);
  Rng rng(seed);
  return llt.matrixL() * rng.normal_vector(x.rows());
}

}  // namespace bfselect
