#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Core>

#include "bfselect/linalg.hpp"

namespace bfselect {

/// Gaussian weight posterior in moment form, theta ~ N(mean, covariance).
struct MomentPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd covariance;

  int size() const { return static_cast<int>(mean.size()); }
};

namespace detail {

inline void check_prior(const Eigen::VectorXd& prior_eigenvalues,
                        double noise_variance) {
  if (!(noise_variance > 0.0)) {
    throw std::invalid_argument("posterior: noise variance must be positive");
  }
  if ((prior_eigenvalues.array() <= 0.0).any()) {
    throw std::invalid_argument(
        "posterior: all prior eigenvalues must be positive");
  }
}

}  // namespace detail

/// Information-form sufficient statistics of the weight posterior:
/// alpha = Phi^T y and B = Phi^T Phi, together with the prior eigenvalues
/// Lambda and the noise variance. Both statistics are additive over
/// observations, so new data points fold in as rank-1 updates.
///
/// The diagonal of B is additionally kept as a contiguous vector so that
/// diagonal-only consumers stay O(L) with unit-stride access instead of
/// walking the L x L storage.
class DualPosterior {
 public:
  /// Empty posterior (no observations absorbed yet).
  DualPosterior(Eigen::VectorXd prior_eigenvalues, double noise_variance)
      : alpha_(Eigen::VectorXd::Zero(prior_eigenvalues.size())),
        b_matrix_(Eigen::MatrixXd::Zero(prior_eigenvalues.size(),
                                        prior_eigenvalues.size())),
        b_diagonal_(Eigen::VectorXd::Zero(prior_eigenvalues.size())),
        prior_eigenvalues_(std::move(prior_eigenvalues)),
        noise_variance_(noise_variance),
        count_(0) {
    detail::check_prior(prior_eigenvalues_, noise_variance_);
  }

  /// Assembles a posterior from explicit statistics. Used by reduction;
  /// alpha and b_matrix must already be consistent with each other.
  DualPosterior(Eigen::VectorXd alpha, Eigen::MatrixXd b_matrix,
                Eigen::VectorXd prior_eigenvalues, double noise_variance,
                long count)
      : alpha_(std::move(alpha)),
        b_matrix_(std::move(b_matrix)),
        b_diagonal_(b_matrix_.diagonal()),
        prior_eigenvalues_(std::move(prior_eigenvalues)),
        noise_variance_(noise_variance),
        count_(count) {
    detail::check_prior(prior_eigenvalues_, noise_variance_);
    if (alpha_.size() != prior_eigenvalues_.size() ||
        b_matrix_.rows() != alpha_.size() || b_matrix_.cols() != alpha_.size()) {
      throw std::invalid_argument("DualPosterior: inconsistent dimensions");
    }
  }

  int size() const { return static_cast<int>(alpha_.size()); }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::MatrixXd& b_matrix() const { return b_matrix_; }
  const Eigen::VectorXd& b_diagonal() const { return b_diagonal_; }
  const Eigen::VectorXd& prior_eigenvalues() const { return prior_eigenvalues_; }
  double noise_variance() const { return noise_variance_; }
  long count() const { return count_; }

  /// Absorbs one observation: alpha += phi(x_n) y_n, B += phi(x_n) phi(x_n)^T.
  /// Mutation requires exclusive access; distinct posteriors may be updated
  /// in parallel.
  void accumulate(const Eigen::Ref<const Eigen::VectorXd>& features,
                  double y_n) {
    if (features.size() != alpha_.size()) {
      throw std::invalid_argument("DualPosterior: feature length mismatch");
    }
    alpha_.noalias() += features * y_n;
    b_matrix_.noalias() += features * features.transpose();
    b_diagonal_.array() += features.array().square();
    ++count_;
  }

 private:
  Eigen::VectorXd alpha_;
  Eigen::MatrixXd b_matrix_;
  Eigen::VectorXd b_diagonal_;
  Eigen::VectorXd prior_eigenvalues_;
  double noise_variance_;
  long count_;
};

/// Weight posterior of the Bayesian linear model y = Phi theta + e,
/// e ~ N(0, sigma^2 I), theta ~ N(0, Lambda):
///
///   Sigma = (Phi^T Phi + sigma^2 Lambda^-1)^-1,
///   mean = Sigma Phi^T y,   covariance = sigma^2 Sigma.
///
/// Solved through a (jittered) Cholesky factorization; no explicit inverse
/// is ever formed.
inline MomentPosterior fit_moment(const Eigen::MatrixXd& phi,
                                  const Eigen::VectorXd& y,
                                  double noise_variance,
                                  const Eigen::VectorXd& prior_eigenvalues) {
  detail::check_prior(prior_eigenvalues, noise_variance);
  if (phi.rows() != y.size()) {
    throw std::invalid_argument("fit_moment: row count of phi must match y");
  }
  if (phi.cols() != prior_eigenvalues.size()) {
    throw std::invalid_argument(
        "fit_moment: column count of phi must match the prior");
  }
  const Eigen::Index l = phi.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(l, l);
  a.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  a = a.selfadjointView<Eigen::Lower>();
  a.diagonal() += noise_variance * prior_eigenvalues.cwiseInverse();

  const auto llt = cholesky_with_jitter(a);
  MomentPosterior post;
  post.mean = llt.solve(phi.transpose() * y);
  post.covariance = noise_variance * llt.solve(Eigen::MatrixXd::Identity(l, l));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  return post;
}

/// alpha = Phi^T y, B = Phi^T Phi from a full batch of observations.
inline DualPosterior dual_from_batch(const Eigen::MatrixXd& phi,
                                     const Eigen::VectorXd& y,
                                     double noise_variance,
                                     Eigen::VectorXd prior_eigenvalues) {
  detail::check_prior(prior_eigenvalues, noise_variance);
  if (phi.rows() != y.size()) {
    throw std::invalid_argument("dual_from_batch: row count of phi must match y");
  }
  if (phi.cols() != prior_eigenvalues.size()) {
    throw std::invalid_argument(
        "dual_from_batch: column count of phi must match the prior");
  }
  const Eigen::Index l = phi.cols();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(l, l);
  b.selfadjointView<Eigen::Lower>().rankUpdate(phi.transpose());
  b = b.selfadjointView<Eigen::Lower>();
  return DualPosterior(phi.transpose() * y, std::move(b),
                       std::move(prior_eigenvalues), noise_variance,
                       phi.rows());
}

/// Value-returning form of DualPosterior::accumulate.
inline DualPosterior dual_accumulate(
    DualPosterior dual, const Eigen::Ref<const Eigen::VectorXd>& features,
    double y_n) {
  dual.accumulate(features, y_n);
  return dual;
}

/// Converts the information form to moments: Sigma = (B + sigma^2 Lambda^-1)^-1
/// via Cholesky, mean = Sigma alpha, covariance = sigma^2 Sigma. O(L^3).
inline MomentPosterior dual_to_moment(const DualPosterior& dual) {
  const Eigen::Index l = dual.size();
  Eigen::MatrixXd a = dual.b_matrix();
  a.diagonal() +=
      dual.noise_variance() * dual.prior_eigenvalues().cwiseInverse();
  const auto llt = cholesky_with_jitter(a);
  MomentPosterior post;
  post.mean = llt.solve(dual.alpha());
  post.covariance =
      dual.noise_variance() * llt.solve(Eigen::MatrixXd::Identity(l, l));
  post.covariance = 0.5 * (post.covariance + post.covariance.transpose()).eval();
  return post;
}

/// O(L) diagonal approximation [Sigma]_ii ~= 1 / ([B]_ii + sigma^2 / lambda_i).
/// Reads only the cached diagonal of B; off-diagonal entries are never
/// touched.
inline Eigen::VectorXd dual_diag_sigma(const DualPosterior& dual) {
  return (dual.b_diagonal().array() +
          dual.noise_variance() / dual.prior_eigenvalues().array())
      .inverse()
      .matrix();
}

}  // namespace bfselect
