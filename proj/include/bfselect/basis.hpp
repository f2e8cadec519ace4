#pragma once

#include <cmath>
#include <concepts>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

#include "bfselect/box_domain.hpp"
#include "bfselect/quadrature.hpp"

namespace bfselect {

/// Minimal interface of an evaluable basis family {phi_i}, i = 0..L-1.
template <class B>
concept BasisFamily = requires(const B& b, int i,
                               const Eigen::Ref<const Eigen::VectorXd>& x) {
  { b.size() } -> std::convertible_to<int>;
  { b.dimension() } -> std::convertible_to<int>;
  { b.eval(i, x) } -> std::convertible_to<double>;
};

/// Basis family that additionally provides the exact value of
/// int_Omega |phi_i(x)|^2 dx over an axis-aligned box.
template <class B>
concept ClosedFormNormBasis =
    BasisFamily<B> && requires(const B& b, int i, const BoxDomain& omega) {
      { b.sq_norm_integral(i, omega) } -> std::convertible_to<double>;
    };

namespace detail {

inline void check_index(int i, int size) {
  if (i < 0 || i >= size) {
    throw std::out_of_range("basis: index out of range");
  }
}

inline void check_dimension(Eigen::Index got, int expected) {
  if (got != expected) {
    throw std::invalid_argument("basis: point dimension mismatch");
  }
}

}  // namespace detail

/// Radial basis functions phi_i(x) = exp(-|x - c_i|^2 / l^2) with a shared
/// lengthscale l and one center c_i per function. Defined on all of R^d.
class RbfBasis {
 public:
  /// centers: one d-dimensional center per row.
  RbfBasis(Eigen::MatrixXd centers, double lengthscale)
      : centers_(std::move(centers)), lengthscale_(lengthscale) {
    if (centers_.rows() < 1) {
      throw std::invalid_argument("RbfBasis: at least one center required");
    }
    if (!(lengthscale_ > 0.0)) {
      throw std::invalid_argument("RbfBasis: lengthscale must be positive");
    }
  }

  /// count centers equidistantly spaced over [lo, hi], endpoints included.
  static RbfBasis equidistant_1d(double lo, double hi, int count,
                                 double lengthscale) {
    if (count < 1) {
      throw std::invalid_argument("RbfBasis: count >= 1 required");
    }
    Eigen::MatrixXd centers(count, 1);
    if (count == 1) {
      centers(0, 0) = 0.5 * (lo + hi);
    } else {
      for (int i = 0; i < count; ++i) {
        centers(i, 0) = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
      }
    }
    return RbfBasis(std::move(centers), lengthscale);
  }

  int size() const { return static_cast<int>(centers_.rows()); }
  int dimension() const { return static_cast<int>(centers_.cols()); }
  const Eigen::MatrixXd& centers() const { return centers_; }
  double lengthscale() const { return lengthscale_; }

  double eval(int i, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    detail::check_index(i, size());
    detail::check_dimension(x.size(), dimension());
    const double sq = (x.transpose() - centers_.row(i)).squaredNorm();
    return std::exp(-sq / (lengthscale_ * lengthscale_));
  }

  /// int_Omega exp(-2 |x - c_i|^2 / l^2) dx. Factorizes per dimension into
  /// l * sqrt(pi/8) * (erf(sqrt(2) (b - c)/l) - erf(sqrt(2) (a - c)/l)).
  /// Omega may lie anywhere in R^d.
  double sq_norm_integral(int i, const BoxDomain& omega) const {
    detail::check_index(i, size());
    detail::check_dimension(omega.dimension(), dimension());
    const double l = lengthscale_;
    const double scale = l * std::sqrt(std::numbers::pi / 8.0);
    const double root2 = std::numbers::sqrt2;
    double result = 1.0;
    for (int k = 0; k < dimension(); ++k) {
      const double c = centers_(i, k);
      const double a = omega.lower()[k];
      const double b = omega.upper()[k];
      result *= scale * (std::erf(root2 * (b - c) / l) -
                         std::erf(root2 * (a - c) / l));
    }
    return result;
  }

 private:
  Eigen::MatrixXd centers_;
  double lengthscale_;
};

/// Sine basis of the Laplacian eigenfunctions on a box, orthonormal over the
/// model domain:
///
///   phi_i(x) = prod_d sqrt(2 / w_d) * sin(pi i_d (x_d - lo_d) / w_d),
///
/// where w_d is the box width and i is a multi-index with every i_d >= 1.
/// For the box [-2, 2]^d this reduces to (1/sqrt(2)) sin(pi i_d (x_d + 2)/4)
/// per dimension.
class HilbertBasis {
 public:
  /// indices: one multi-index per row, entries >= 1.
  HilbertBasis(BoxDomain domain, Eigen::MatrixXi indices)
      : domain_(std::move(domain)), indices_(std::move(indices)) {
    if (indices_.rows() < 1) {
      throw std::invalid_argument("HilbertBasis: at least one index required");
    }
    if (indices_.cols() != domain_.dimension()) {
      throw std::invalid_argument(
          "HilbertBasis: index dimension must match the domain");
    }
    if ((indices_.array() < 1).any()) {
      throw std::invalid_argument("HilbertBasis: all index entries must be >= 1");
    }
    for (int k = 0; k < domain_.dimension(); ++k) {
      if (!(domain_.width(k) > 0.0)) {
        throw std::invalid_argument(
            "HilbertBasis: model domain must have positive widths");
      }
    }
  }

  /// Full tensor grid of multi-indices with i_d in 1..counts[d], enumerated
  /// row-major with the last dimension varying fastest.
  static HilbertBasis tensor(BoxDomain domain, const std::vector<int>& counts) {
    const int d = domain.dimension();
    if (static_cast<int>(counts.size()) != d) {
      throw std::invalid_argument(
          "HilbertBasis: one per-dimension count required per dimension");
    }
    long total = 1;
    for (int c : counts) {
      if (c < 1) {
        throw std::invalid_argument("HilbertBasis: counts must be >= 1");
      }
      total *= c;
    }
    Eigen::MatrixXi indices(total, d);
    std::vector<int> idx(d, 1);
    for (long row = 0; row < total; ++row) {
      for (int k = 0; k < d; ++k) indices(row, k) = idx[k];
      int k = d - 1;
      while (k >= 0 && ++idx[k] > counts[k]) idx[k--] = 1;
    }
    return HilbertBasis(std::move(domain), std::move(indices));
  }

  int size() const { return static_cast<int>(indices_.rows()); }
  int dimension() const { return domain_.dimension(); }
  const BoxDomain& domain() const { return domain_; }
  const Eigen::MatrixXi& indices() const { return indices_; }

  double eval(int i, const Eigen::Ref<const Eigen::VectorXd>& x) const {
    detail::check_index(i, size());
    detail::check_dimension(x.size(), dimension());
    double result = 1.0;
    for (int k = 0; k < dimension(); ++k) {
      const double w = domain_.width(k);
      result *= std::sqrt(2.0 / w) *
                std::sin(std::numbers::pi * indices_(i, k) *
                         (x[k] - domain_.lower()[k]) / w);
    }
    return result;
  }

  /// int_Omega |phi_i|^2 dx for Omega inside the model box. Per dimension,
  /// with wave number k = pi i_d / w_d and the model's lower edge lo:
  ///
  ///   (2/w) int_a^b sin^2(k (x - lo)) dx
  ///     = (b - a)/w - (sin(2k(b - lo)) - sin(2k(a - lo))) / (2 k w).
  ///
  /// Over the full model box this evaluates to 1 (orthonormality).
  double sq_norm_integral(int i, const BoxDomain& omega) const {
    detail::check_index(i, size());
    detail::check_dimension(omega.dimension(), dimension());
    if (!domain_.contains(omega)) {
      throw std::domain_error(
          "HilbertBasis: omega must lie inside the model domain; the basis "
          "is undefined outside it");
    }
    double result = 1.0;
    for (int k = 0; k < dimension(); ++k) {
      const double w = domain_.width(k);
      const double lo = domain_.lower()[k];
      const double a = omega.lower()[k];
      const double b = omega.upper()[k];
      const double wave = std::numbers::pi * indices_(i, k) / w;
      result *= (b - a) / w - (std::sin(2.0 * wave * (b - lo)) -
                               std::sin(2.0 * wave * (a - lo))) /
                                  (2.0 * wave * w);
    }
    return result;
  }

 private:
  BoxDomain domain_;
  Eigen::MatrixXi indices_;
};

/// Design matrix: entry (n, i) = phi_i(X_n), one input point per row of X.
template <BasisFamily B>
Eigen::MatrixXd design_matrix(const B& basis, const Eigen::MatrixXd& X) {
  detail::check_dimension(X.cols(), basis.dimension());
  Eigen::MatrixXd phi(X.rows(), basis.size());
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    const Eigen::VectorXd x = X.row(n).transpose();
    for (int i = 0; i < basis.size(); ++i) phi(n, i) = basis.eval(i, x);
  }
  return phi;
}

/// Design matrix restricted to a subset of basis indices (ascending order of
/// the given list is preserved in the columns).
template <BasisFamily B>
Eigen::MatrixXd design_matrix_subset(const B& basis, const Eigen::MatrixXd& X,
                                     const std::vector<int>& kept) {
  detail::check_dimension(X.cols(), basis.dimension());
  Eigen::MatrixXd phi(X.rows(), static_cast<Eigen::Index>(kept.size()));
  for (Eigen::Index n = 0; n < X.rows(); ++n) {
    const Eigen::VectorXd x = X.row(n).transpose();
    for (std::size_t j = 0; j < kept.size(); ++j) {
      phi(n, static_cast<Eigen::Index>(j)) = basis.eval(kept[j], x);
    }
  }
  return phi;
}

/// Tensor-product Gauss-Legendre estimate of int_Omega |phi_i|^2 dx. Serves
/// as the oracle for the closed forms and as the fallback for user-supplied
/// bases without one.
template <BasisFamily B>
double sq_norm_integral_quadrature(const B& basis, int i,
                                   const BoxDomain& omega, int points_per_dim) {
  detail::check_index(i, basis.size());
  detail::check_dimension(omega.dimension(), basis.dimension());
  if (points_per_dim < 2) {
    throw std::invalid_argument(
        "sq_norm_integral_quadrature: points_per_dim >= 2 required");
  }
  return integrate(omega, points_per_dim, [&](const Eigen::VectorXd& x) {
    const double v = basis.eval(i, x);
    return v * v;
  });
}

}  // namespace bfselect
