#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace bfselect {

/// Cholesky factorization with jitter escalation. The matrix is first
/// factorized as given; on failure, eps * mean(diag) * I is added for eps in
/// {1e-12, 1e-10, 1e-8} before giving up. Throws std::runtime_error when all
/// attempts fail, which signals an ill-posed prior/noise combination rather
/// than a recoverable condition.
inline Eigen::LLT<Eigen::MatrixXd> cholesky_with_jitter(
    const Eigen::MatrixXd& a, double* jitter_used = nullptr) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("cholesky_with_jitter: matrix must be square");
  }
  if (jitter_used != nullptr) *jitter_used = 0.0;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (a.rows() == 0 || llt.info() == Eigen::Success) return llt;

  const double scale = a.diagonal().mean();
  for (double eps : {1e-12, 1e-10, 1e-8}) {
    const double jitter = eps * scale;
    Eigen::MatrixXd jittered = a;
    jittered.diagonal().array() += jitter;
    llt.compute(jittered);
    if (llt.info() == Eigen::Success) {
      if (jitter_used != nullptr) *jitter_used = jitter;
      return llt;
    }
  }
  throw std::runtime_error(
      "cholesky_with_jitter: factorization failed after jitter escalation");
}

/// Median of a sequence; the even case averages the two middle elements.
inline double median(std::vector<double> values) {
  if (values.empty()) {
    throw std::invalid_argument("median: empty input");
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace bfselect
