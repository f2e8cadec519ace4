#pragma once

#include <iostream>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "bfselect/basis.hpp"
#include "bfselect/posterior.hpp"

namespace bfselect {

/// Marginal predictive distribution over a set of test points: per-point
/// means and variances, plus the wall-clock latency of the producing call
/// when one was measured.
struct PredictiveDistribution {
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
  std::optional<double> latency_seconds;

  int size() const { return static_cast<int>(means.size()); }
};

namespace detail {

/// Clamps tiny negative variances (numerical solve residue) to zero.
inline void clamp_variances(Eigen::VectorXd& variances) {
  int clamped = 0;
  for (Eigen::Index i = 0; i < variances.size(); ++i) {
    if (variances[i] < 0.0) {
      variances[i] = 0.0;
      ++clamped;
    }
  }
  if (clamped > 0) {
    std::cerr << "bfselect: clamped " << clamped
              << " negative predictive variance(s) to 0\n";
  }
}

}  // namespace detail

/// Predictive of a linear-in-parameters model at the rows of X_star:
/// mu = Phi* mean, var_i = phi_i^T covariance phi_i (latent function, no
/// observation noise added).
template <BasisFamily B>
PredictiveDistribution predict_moment(const B& basis,
                                      const MomentPosterior& posterior,
                                      const Eigen::MatrixXd& X_star) {
  if (posterior.size() != basis.size()) {
    throw std::invalid_argument(
        "predict_moment: posterior size must match the basis");
  }
  const Eigen::MatrixXd phi = design_matrix(basis, X_star);
  PredictiveDistribution pred;
  pred.means = phi * posterior.mean;
  pred.variances =
      (phi * posterior.covariance).cwiseProduct(phi).rowwise().sum();
  detail::clamp_variances(pred.variances);
  return pred;
}

/// Same, for a posterior already reduced to the index set `kept`.
template <BasisFamily B>
PredictiveDistribution predict_moment(const B& basis,
                                      const MomentPosterior& posterior,
                                      const std::vector<int>& kept,
                                      const Eigen::MatrixXd& X_star) {
  if (posterior.size() != static_cast<int>(kept.size())) {
    throw std::invalid_argument(
        "predict_moment: posterior size must match the kept index set");
  }
  const Eigen::MatrixXd phi = design_matrix_subset(basis, X_star, kept);
  PredictiveDistribution pred;
  pred.means = phi * posterior.mean;
  pred.variances =
      (phi * posterior.covariance).cwiseProduct(phi).rowwise().sum();
  detail::clamp_variances(pred.variances);
  return pred;
}

}  // namespace bfselect
