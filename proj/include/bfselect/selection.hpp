#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bfselect/basis.hpp"
#include "bfselect/box_domain.hpp"
#include "bfselect/posterior.hpp"
#include "bfselect/quadrature.hpp"

namespace bfselect {

/// Outcome of a basis selection: the retained index set (ascending), the
/// per-index importance scores it was computed from, and the value of the
/// loss bound over the discarded set. residual_bound is the sum of the
/// discarded scores, accumulated in ascending score order (ties by index).
struct SelectionResult {
  std::vector<int> kept;
  Eigen::VectorXd scores;
  double residual_bound = 0.0;
};

inline constexpr int kDefaultNormQuadraturePoints = 64;

namespace detail {

/// Indices 0..L-1 ordered by (score asc, index asc).
inline std::vector<int> ascending_order(const Eigen::VectorXd& scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (scores[a] != scores[b]) return scores[a] < scores[b];
    return a < b;
  });
  return order;
}

inline SelectionResult make_result(Eigen::VectorXd scores,
                                   std::vector<int> kept_unsorted) {
  SelectionResult result;
  result.scores = std::move(scores);
  result.kept = std::move(kept_unsorted);
  std::sort(result.kept.begin(), result.kept.end());

  std::vector<bool> is_kept(result.scores.size(), false);
  for (int i : result.kept) is_kept[i] = true;
  double bound = 0.0;
  for (int i : ascending_order(result.scores)) {
    if (!is_kept[i]) bound += result.scores[i];
  }
  result.residual_bound = bound;
  return result;
}

inline void check_selection(const SelectionResult& selection, int size) {
  for (std::size_t j = 0; j < selection.kept.size(); ++j) {
    const int idx = selection.kept[j];
    if (idx < 0 || idx >= size) {
      throw std::out_of_range("selection: kept index out of range");
    }
    if (j > 0 && selection.kept[j - 1] >= idx) {
      throw std::invalid_argument(
          "selection: kept indices must be unique and ascending");
    }
  }
}

}  // namespace detail

/// Integral-bound scores: score_j = (int_Omega |phi_j|^2 dx) * m_j^2. The
/// sum of the discarded scores bounds the squared L2(Omega) distance between
/// the full and the reduced predictor. Uses the basis's closed-form norm
/// integral when available, Gauss-Legendre quadrature otherwise.
template <BasisFamily B>
Eigen::VectorXd integral_scores(
    const Eigen::VectorXd& mean, const B& basis, const BoxDomain& omega,
    int quadrature_points_per_dim = kDefaultNormQuadraturePoints) {
  if (mean.size() != basis.size()) {
    throw std::invalid_argument("integral_scores: mean length must match basis");
  }
  Eigen::VectorXd scores(mean.size());
  for (int j = 0; j < basis.size(); ++j) {
    double norm;
    if constexpr (ClosedFormNormBasis<B>) {
      norm = basis.sq_norm_integral(j, omega);
    } else {
      norm = sq_norm_integral_quadrature(basis, j, omega,
                                         quadrature_points_per_dim);
    }
    scores[j] = norm * mean[j] * mean[j];
  }
  return scores;
}

/// Simplified-bound scores: score_j = m_j^2. Valid for ranking whenever the
/// basis norms over Omega are (approximately) equal; the shared constant
/// C = int_Omega |phi|^2 dx is dropped, so these scores and their residual
/// bound are in units of C.
inline Eigen::VectorXd simplified_scores(const Eigen::VectorXd& mean) {
  return mean.cwiseProduct(mean);
}

/// Dual-parametrization scores: score_j = ([Sigma]_jj alpha_j)^2 with the
/// O(L) diagonal approximation [Sigma]_jj ~= 1/([B]_jj + sigma^2/lambda_j),
/// evaluated as (alpha_j lambda_j / (lambda_j [B]_jj + sigma^2))^2 so one
/// fused pass with a single division suffices. No L x L intermediate is
/// formed.
inline Eigen::VectorXd dual_scores(const DualPosterior& dual) {
  const auto lambda = dual.prior_eigenvalues().array();
  return ((dual.alpha().array() * lambda) /
          (lambda * dual.b_diagonal().array() + dual.noise_variance()))
      .square()
      .matrix();
}

/// Keeps the n_j largest scores; ties broken toward the smaller index.
inline SelectionResult select_top_k(const Eigen::VectorXd& scores, int n_j) {
  const int l = static_cast<int>(scores.size());
  if (n_j < 0 || n_j > l) {
    throw std::invalid_argument("select_top_k: n_j must be in [0, L]");
  }
  std::vector<int> order = detail::ascending_order(scores);
  std::vector<int> kept(order.end() - n_j, order.end());
  // ascending_order put ties in ascending index order, so among equal scores
  // the largest indices sit at the end; re-pick ties toward smaller indices.
  if (n_j > 0 && n_j < l) {
    const double cutoff = scores[kept.front()];
    std::vector<int> below, at;
    for (int i = 0; i < l; ++i) {
      if (scores[i] > cutoff) below.push_back(i);  // strictly above cutoff
      else if (scores[i] == cutoff) at.push_back(i);
    }
    kept = std::move(below);
    for (int i : at) {
      if (static_cast<int>(kept.size()) == n_j) break;
      kept.push_back(i);
    }
  }
  return detail::make_result(scores, std::move(kept));
}

/// Discards the largest prefix of the ascending-sorted scores whose
/// cumulative sum stays <= epsilon and keeps the rest, so the returned
/// residual_bound never exceeds epsilon.
inline SelectionResult select_by_threshold(const Eigen::VectorXd& scores,
                                           double epsilon) {
  if (!(epsilon >= 0.0)) {
    throw std::invalid_argument("select_by_threshold: epsilon >= 0 required");
  }
  const std::vector<int> order = detail::ascending_order(scores);
  std::vector<int> kept;
  double cumulative = 0.0;
  std::size_t cut = 0;
  while (cut < order.size()) {
    const double next = cumulative + scores[order[cut]];
    if (next > epsilon) break;
    cumulative = next;
    ++cut;
  }
  for (std::size_t j = cut; j < order.size(); ++j) kept.push_back(order[j]);
  return detail::make_result(scores, std::move(kept));
}

/// Marginal reduced posterior (m_J, S_JJ): sub-vector and principal
/// sub-matrix, no re-fitting.
inline MomentPosterior reduce_moment(const MomentPosterior& posterior,
                                     const SelectionResult& selection) {
  detail::check_selection(selection, posterior.size());
  const Eigen::Index n = static_cast<Eigen::Index>(selection.kept.size());
  MomentPosterior reduced;
  reduced.mean.resize(n);
  reduced.covariance.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    reduced.mean[a] = posterior.mean[selection.kept[a]];
    for (Eigen::Index b = 0; b < n; ++b) {
      reduced.covariance(a, b) =
          posterior.covariance(selection.kept[a], selection.kept[b]);
    }
  }
  return reduced;
}

/// Reduced dual (alpha_J, B_JJ, lambda_J); a later dual_to_moment costs
/// O(n_J^3) instead of O(L^3).
inline DualPosterior reduce_dual(const DualPosterior& dual,
                                 const SelectionResult& selection) {
  detail::check_selection(selection, dual.size());
  const Eigen::Index n = static_cast<Eigen::Index>(selection.kept.size());
  Eigen::VectorXd alpha(n), lambda(n);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    alpha[a] = dual.alpha()[selection.kept[a]];
    lambda[a] = dual.prior_eigenvalues()[selection.kept[a]];
    for (Eigen::Index c = 0; c < n; ++c) {
      b(a, c) = dual.b_matrix()(selection.kept[a], selection.kept[c]);
    }
  }
  return DualPosterior(std::move(alpha), std::move(b), std::move(lambda),
                       dual.noise_variance(), dual.count());
}

/// Quadrature value of the exact selection loss
/// L = int_Omega | sum_{j not in J} phi_j(x) m_j |^2 dx.
/// The bound Sum_{j not in J} integral_scores_j dominates this for every J.
template <BasisFamily B>
double exact_loss(const Eigen::VectorXd& full_mean,
                  const SelectionResult& selection, const B& basis,
                  const BoxDomain& omega, int points_per_dim) {
  if (full_mean.size() != basis.size()) {
    throw std::invalid_argument("exact_loss: mean length must match basis");
  }
  detail::check_selection(selection, basis.size());
  if (points_per_dim < 2) {
    throw std::invalid_argument("exact_loss: points_per_dim >= 2 required");
  }
  std::vector<bool> is_kept(basis.size(), false);
  for (int i : selection.kept) is_kept[i] = true;
  return integrate(omega, points_per_dim, [&](const Eigen::VectorXd& x) {
    double omitted = 0.0;
    for (int j = 0; j < basis.size(); ++j) {
      if (!is_kept[j]) omitted += basis.eval(j, x) * full_mean[j];
    }
    return omitted * omitted;
  });
}

/// Exhaustive minimizer of exact_loss over all subsets of cardinality n_j;
/// ties broken lexicographically. Enumeration is budgeted at C(L, n_j) <= 1e6.
template <BasisFamily B>
std::vector<int> oracle_best_subset(const Eigen::VectorXd& full_mean,
                                    const B& basis, const BoxDomain& omega,
                                    int n_j, int points_per_dim) {
  const int l = basis.size();
  if (full_mean.size() != l) {
    throw std::invalid_argument("oracle_best_subset: mean length mismatch");
  }
  if (n_j < 0 || n_j > l) {
    throw std::invalid_argument("oracle_best_subset: n_j must be in [0, L]");
  }
  double combinations = 1.0;
  for (int i = 0; i < n_j; ++i) combinations *= double(l - i) / double(i + 1);
  if (combinations > 1e6) {
    throw std::invalid_argument(
        "oracle_best_subset: combinatorial budget C(L, n_j) <= 1e6 exceeded");
  }

  // Precompute weighted basis values on the quadrature grid once:
  // loss(J) = sum_q w_q (full_q - sum_{j in J} G(q, j))^2.
  std::vector<Eigen::VectorXd> nodes;
  std::vector<double> weights;
  {
    const int d = omega.dimension();
    std::vector<QuadratureRule> rules;
    for (int k = 0; k < d; ++k) {
      rules.push_back(
          gauss_legendre(points_per_dim, omega.lower()[k], omega.upper()[k]));
    }
    std::vector<int> idx(d, 0);
    Eigen::VectorXd x(d);
    for (;;) {
      double w = 1.0;
      for (int k = 0; k < d; ++k) {
        x[k] = rules[k].nodes[idx[k]];
        w *= rules[k].weights[idx[k]];
      }
      nodes.push_back(x);
      weights.push_back(w);
      int k = d - 1;
      while (k >= 0 && ++idx[k] == points_per_dim) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  const Eigen::Index q_count = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd g(q_count, l);
  for (Eigen::Index q = 0; q < q_count; ++q) {
    for (int j = 0; j < l; ++j) {
      g(q, j) = basis.eval(j, nodes[q]) * full_mean[j];
    }
  }
  const Eigen::VectorXd full = g.rowwise().sum();

  std::vector<int> subset(n_j);
  std::iota(subset.begin(), subset.end(), 0);
  std::vector<int> best = subset;
  double best_loss = std::numeric_limits<double>::infinity();
  for (;;) {
    double loss = 0.0;
    for (Eigen::Index q = 0; q < q_count; ++q) {
      double kept_sum = 0.0;
      for (int j : subset) kept_sum += g(q, j);
      const double omitted = full[q] - kept_sum;
      loss += weights[q] * omitted * omitted;
    }
    if (loss < best_loss) {
      best_loss = loss;
      best = subset;
    }
    // next combination in lexicographic order
    int i = n_j - 1;
    while (i >= 0 && subset[i] == l - n_j + i) --i;
    if (i < 0) break;
    ++subset[i];
    for (int j = i + 1; j < n_j; ++j) subset[j] = subset[j - 1] + 1;
  }
  return best;
}

}  // namespace bfselect
