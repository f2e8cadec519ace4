#pragma once

#include <stdexcept>
#include <utility>

#include <Eigen/Core>

namespace bfselect {

/// Axis-aligned box in R^d. Used both for the model domain of a basis
/// family and for the subdomain over which predictions are requested.
/// Zero-width edges are allowed; such a box has measure zero.
class BoxDomain {
 public:
  BoxDomain(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) {
      throw std::invalid_argument(
          "BoxDomain: lower and upper must have equal length >= 1");
    }
    for (Eigen::Index k = 0; k < lower_.size(); ++k) {
      if (!(lower_[k] <= upper_[k])) {
        throw std::invalid_argument(
            "BoxDomain: lower[k] <= upper[k] required for every dimension");
      }
    }
  }

  /// [lo, hi]^dim.
  static BoxDomain cube(double lo, double hi, int dim) {
    return BoxDomain(Eigen::VectorXd::Constant(dim, lo),
                     Eigen::VectorXd::Constant(dim, hi));
  }

  /// One-dimensional box.
  static BoxDomain interval(double lo, double hi) { return cube(lo, hi, 1); }

  int dimension() const { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const { return lower_; }
  const Eigen::VectorXd& upper() const { return upper_; }
  double width(int k) const { return upper_[k] - lower_[k]; }

  double measure() const {
    double m = 1.0;
    for (Eigen::Index k = 0; k < lower_.size(); ++k) m *= upper_[k] - lower_[k];
    return m;
  }

  bool has_zero_measure() const {
    for (Eigen::Index k = 0; k < lower_.size(); ++k) {
      if (upper_[k] == lower_[k]) return true;
    }
    return false;
  }

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x,
                double tol = 0.0) const {
    if (x.size() != lower_.size()) return false;
    for (Eigen::Index k = 0; k < lower_.size(); ++k) {
      if (x[k] < lower_[k] - tol || x[k] > upper_[k] + tol) return false;
    }
    return true;
  }

  /// Component-wise inclusion of another box.
  bool contains(const BoxDomain& other, double tol = 1e-12) const {
    if (other.dimension() != dimension()) return false;
    for (Eigen::Index k = 0; k < lower_.size(); ++k) {
      if (other.lower_[k] < lower_[k] - tol ||
          other.upper_[k] > upper_[k] + tol) {
        return false;
      }
    }
    return true;
  }

  /// True if every row of X (one point per row) lies inside the box.
  bool contains_all(const Eigen::MatrixXd& points, double tol = 0.0) const {
    for (Eigen::Index n = 0; n < points.rows(); ++n) {
      if (!contains(points.row(n).transpose(), tol)) return false;
    }
    return true;
  }

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

}  // namespace bfselect
