#include <catch2/catch_amalgamated.hpp>

#include <Eigen/QR>

#include <cmath>
#include <stdexcept>

#include "bfselect/gp.hpp"
#include "bfselect/rng.hpp"

using Catch::Approx;

namespace {

Eigen::MatrixXd column(std::initializer_list<double> values) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(values.size()), 1);
  Eigen::Index i = 0;
  for (double v : values) x(i++, 0) = v;
  return x;
}

}  // namespace

TEST_CASE("squared-exponential kernel values", "[gp]") {
  const bfselect::SeKernel kernel(0.05, 0.1);
  const Eigen::VectorXd p = Eigen::VectorXd::Constant(1, 0.3);
  CHECK(kernel(p, p) == Approx(0.05).epsilon(1e-15));

  // Distance l * sqrt(2) decays by exactly e^-1.
  const Eigen::VectorXd q =
      Eigen::VectorXd::Constant(1, 0.3 + 0.1 * std::sqrt(2.0));
  CHECK(kernel(p, q) ==
        Approx(0.05 * 0.36787944117144233).epsilon(1e-14));

  CHECK_THROWS_AS(bfselect::SeKernel(0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(bfselect::SeKernel(1.0, -0.2), std::invalid_argument);
}

TEST_CASE("kernel matrices are exact transposes across argument order",
          "[gp]") {
  const bfselect::SeKernel kernel(0.7, 0.4);
  bfselect::Rng rng(11);
  const Eigen::MatrixXd a = rng.uniform_matrix(5, 3, -1.0, 1.0);
  const Eigen::MatrixXd b = rng.uniform_matrix(7, 3, -1.0, 1.0);
  const Eigen::MatrixXd kab = bfselect::kernel_matrix(kernel, a, b);
  const Eigen::MatrixXd kba = bfselect::kernel_matrix(kernel, b, a);
  REQUIRE(kab.rows() == 5);
  REQUIRE(kab.cols() == 7);
  CHECK(kab == kba.transpose());

  const Eigen::MatrixXd kaa = bfselect::kernel_matrix(kernel, a, a);
  CHECK(kaa == kaa.transpose());
  for (int i = 0; i < 5; ++i) CHECK(kaa(i, i) == Approx(0.7).epsilon(1e-15));

  const Eigen::MatrixXd wrong = rng.uniform_matrix(4, 2, -1.0, 1.0);
  CHECK_THROWS_AS(bfselect::kernel_matrix(kernel, a, wrong),
                  std::invalid_argument);
}

TEST_CASE("single-observation posterior in closed form", "[gp]") {
  // One observation y=1 at x=0: mu*(0) = sf2 / (sf2 + s2),
  // V*(0) = sf2 - sf2^2 / (sf2 + s2).
  const bfselect::SeKernel kernel(0.05, 0.1);
  const auto pred = bfselect::gp_predict(kernel, column({0.0}),
                                         Eigen::VectorXd::Ones(1), 0.01,
                                         column({0.0}));
  CHECK(pred.means[0] == Approx(0.05 / 0.06).epsilon(1e-12));
  CHECK(pred.variances[0] ==
        Approx(0.05 - 0.05 * 0.05 / 0.06).epsilon(1e-12));
}

TEST_CASE("empty training set returns the prior", "[gp]") {
  const bfselect::SeKernel kernel(0.3, 0.2);
  const Eigen::MatrixXd none(0, 1);
  const auto pred = bfselect::gp_predict(kernel, none, Eigen::VectorXd(0),
                                         0.01, column({-0.5, 0.0, 0.5}));
  CHECK(pred.means.isZero(0.0));
  for (int i = 0; i < 3; ++i) CHECK(pred.variances[i] == Approx(0.3));
}

TEST_CASE("predictions match a dense solver oracle", "[gp]") {
  const bfselect::SeKernel kernel(0.4, 0.3);
  bfselect::Rng rng(21);
  const Eigen::MatrixXd x = rng.uniform_matrix(25, 2, -1.0, 1.0);
  const Eigen::VectorXd y = rng.normal_vector(25);
  const Eigen::MatrixXd x_star = rng.uniform_matrix(9, 2, -1.0, 1.0);
  const double noise_variance = 0.05;

  const auto pred = bfselect::gp_predict(kernel, x, y, noise_variance, x_star);

  Eigen::MatrixXd gram = bfselect::kernel_matrix(kernel, x, x);
  gram.diagonal().array() += noise_variance;
  const Eigen::MatrixXd k_cross = bfselect::kernel_matrix(kernel, x_star, x);
  const auto qr = gram.colPivHouseholderQr();
  const Eigen::VectorXd means = k_cross * qr.solve(y);
  for (int i = 0; i < 9; ++i) {
    const Eigen::VectorXd k_i = k_cross.row(i).transpose();
    const double variance =
        kernel.kernel_variance - k_i.dot(qr.solve(k_i));
    REQUIRE(pred.means[i] == Approx(means[i]).epsilon(1e-10).margin(1e-12));
    REQUIRE(pred.variances[i] == Approx(variance).epsilon(1e-10).margin(1e-12));
  }
}

TEST_CASE("predictive input validation", "[gp]") {
  const bfselect::SeKernel kernel(1.0, 0.5);
  const Eigen::MatrixXd x = column({0.0, 1.0});
  const Eigen::VectorXd y = Eigen::VectorXd::Ones(2);
  CHECK_THROWS_AS(
      bfselect::gp_predict(kernel, x, Eigen::VectorXd::Ones(3), 0.1,
                           column({0.5})),
      std::invalid_argument);
  CHECK_THROWS_AS(bfselect::gp_predict(kernel, x, y, 0.0, column({0.5})),
                  std::invalid_argument);
}

TEST_CASE("near-noiseless posterior interpolates the data", "[gp]") {
  const bfselect::SeKernel kernel(1.0, 0.4);
  const Eigen::MatrixXd x = column({-0.8, -0.3, 0.2, 0.7});
  const Eigen::VectorXd y = Eigen::Vector4d(0.5, -1.0, 0.3, 1.2);
  const auto pred = bfselect::gp_predict(kernel, x, y, 1e-8, x);
  for (int i = 0; i < 4; ++i) {
    REQUIRE(std::abs(pred.means[i] - y[i]) <= 1e-3);
    REQUIRE(pred.variances[i] >= 0.0);
    REQUIRE(pred.variances[i] <= 1e-3);
  }
}

TEST_CASE("prior samples are deterministic per seed", "[gp]") {
  const bfselect::SeKernel kernel(0.5, 0.25);
  bfselect::Rng rng(31);
  const Eigen::MatrixXd x = rng.uniform_matrix(40, 1, -1.0, 1.0);
  const Eigen::VectorXd first = bfselect::sample_gp_prior(kernel, x, 123);
  const Eigen::VectorXd second = bfselect::sample_gp_prior(kernel, x, 123);
  CHECK(first == second);
  const Eigen::VectorXd other = bfselect::sample_gp_prior(kernel, x, 124);
  CHECK(first != other);
}

TEST_CASE("prior samples have the kernel's marginal statistics", "[gp]") {
  const double kernel_variance = 0.5;
  const double lengthscale = 0.25;
  const bfselect::SeKernel kernel(kernel_variance, lengthscale);
  // Three points: two at distance l, one far away.
  const Eigen::MatrixXd x = column({0.0, 0.25, 10.0});

  const int draws = 200;
  double sq = 0.0;
  double cross = 0.0;
  for (int seed = 0; seed < draws; ++seed) {
    const Eigen::VectorXd f =
        bfselect::sample_gp_prior(kernel, x, 1000 + seed);
    sq += f.squaredNorm() / 3.0;
    cross += f[0] * f[1];
  }
  const double variance = sq / draws;
  const double correlation = cross / draws / kernel_variance;

  // 3 sigma bands; within-draw correlation between the two nearby points
  // is accounted for in the estimator variances.
  REQUIRE(std::abs(variance - kernel_variance) <= 0.10);

  // At distance l the correlation is e^{-1/2}.
  REQUIRE(std::abs(correlation - 0.6065306597126334) <= 0.25);
}

TEST_CASE("dense Cholesky budget is enforced", "[gp]") {
  const bfselect::SeKernel kernel(1.0, 0.5);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Zero(5001, 1);
  CHECK_THROWS_AS(bfselect::sample_gp_prior(kernel, x, 1),
                  std::invalid_argument);
}
