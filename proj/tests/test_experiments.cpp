#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bfselect/cli.hpp"
#include "bfselect/experiments.hpp"

using Catch::Approx;

namespace {

namespace fs = std::filesystem;

// Fresh scratch directory, removed on destruction.
struct TempDir {
  fs::path path;

  explicit TempDir(const std::string& tag)
      : path(fs::temp_directory_path() /
             ("bfselect_test_" + tag + "_" +
              std::to_string(
                  std::chrono::steady_clock::now().time_since_epoch().count()))) {
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string slurp(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string current;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) lines.push_back(current);
  return lines;
}

// Small but complete benchmark configuration (seconds, not minutes).
bfselect::RandomFnConfig small_benchmark() {
  bfselect::RandomFnConfig config;
  config.seed = 7;
  config.n_train = 60;
  config.test_points_per_dim = 4;
  config.ld_list = {2, 3};
  config.rho_list = {0.5, 1.0};
  config.timing_repetitions = 1;
  return config;
}

}  // namespace

TEST_CASE("retained counts round and never drop to zero", "[experiments]") {
  CHECK(bfselect::retained_count(0.05, 8) == 1);
  CHECK(bfselect::retained_count(1.0, 512) == 512);
  CHECK(bfselect::retained_count(0.3, 1728) == 518);
  CHECK(bfselect::retained_count(0.5, 27) == 14);
}

TEST_CASE("the model memory budget names the offending size",
          "[experiments]") {
  CHECK(bfselect::model_memory_bytes(1728) == 4LL * 8 * 1728 * 1728);
  CHECK_NOTHROW(bfselect::check_memory_budget({2, 12, 20}));
  try {
    bfselect::check_memory_budget({2, 30});
    FAIL("expected the budget check to throw");
  } catch (const std::runtime_error& error) {
    CHECK(std::string(error.what()).find("27000") != std::string::npos);
  }
}

TEST_CASE("the evaluation grid covers the cube last dimension fastest",
          "[experiments]") {
  const Eigen::MatrixXd grid = bfselect::cube_grid(-1.0, 1.0, 15);
  REQUIRE(grid.rows() == 3375);
  REQUIRE(grid.cols() == 3);
  CHECK(grid.row(0) == Eigen::RowVector3d(-1.0, -1.0, -1.0));
  CHECK(grid.row(3374) == Eigen::RowVector3d(1.0, 1.0, 1.0));
  // Row 1 advances only the last coordinate by one step.
  const double step = 2.0 / 14.0;
  CHECK(grid(1, 0) == Approx(-1.0));
  CHECK(grid(1, 1) == Approx(-1.0));
  CHECK(grid(1, 2) == Approx(-1.0 + step));
  // Row 15 advances the middle coordinate.
  CHECK(grid(15, 1) == Approx(-1.0 + step));
  CHECK(grid(15, 2) == Approx(-1.0));
}

TEST_CASE("benchmark data generation is deterministic", "[experiments]") {
  bfselect::RandomFnConfig config = small_benchmark();
  const auto first = bfselect::make_random_fn_data(config);
  const auto second = bfselect::make_random_fn_data(config);
  CHECK(first.x_train == second.x_train);
  CHECK(first.f_train == second.f_train);
  CHECK(first.y_train == second.y_train);
  CHECK(first.x_test == second.x_test);
  CHECK(first.f_test == second.f_test);

  REQUIRE(first.x_train.rows() == 60);
  REQUIRE(first.x_train.cols() == 3);
  REQUIRE(first.x_test.rows() == 64);
  REQUIRE(first.f_test.size() == 64);

  config.seed = 8;
  const auto other = bfselect::make_random_fn_data(config);
  CHECK(first.y_train != other.y_train);
}

TEST_CASE("observation noise has the configured scale", "[experiments]") {
  bfselect::RandomFnConfig config = small_benchmark();
  config.n_train = 2000;
  const auto data = bfselect::make_random_fn_data(config);
  const Eigen::VectorXd noise = data.y_train - data.f_train;
  const double sd = std::sqrt(noise.squaredNorm() / noise.size());
  // sigma = 0.1; 4 sigma sampling band for 2000 draws.
  CHECK(std::abs(sd - 0.1) <= 0.01);
}

TEST_CASE("demo outputs use the documented layout", "[experiments]") {
  TempDir dir("demo");
  bfselect::RbfDemoConfig config;
  config.out_dir = dir.path.string();
  const auto result = bfselect::run_rbf_demo(config);
  bfselect::write_rbf_demo_outputs(result, config);

  for (const char* name : {"base.csv", "standard.csv", "integral.csv"}) {
    const std::string text = slurp(dir.path / name);
    CHECK(text.find('\r') == std::string::npos);
    const auto lines = lines_of(text);
    REQUIRE(lines.size() == 202);
    CHECK(lines[0] == "x,f,std");
    // Three comma-separated fields per row.
    for (std::size_t i = 1; i < lines.size(); ++i) {
      CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 2);
    }
  }

  const auto selection = lines_of(slurp(dir.path / "selection.csv"));
  REQUIRE(selection.size() == 5);
  CHECK(selection[0] == "method,index,center,score");
  CHECK(selection[1].rfind("integral,", 0) == 0);
  CHECK(selection[3].rfind("simplified,", 0) == 0);
}

TEST_CASE("demo runs are reproducible", "[experiments]") {
  bfselect::RbfDemoConfig config;
  const auto first = bfselect::run_rbf_demo(config);
  const auto second = bfselect::run_rbf_demo(config);
  CHECK(first.posterior.mean == second.posterior.mean);
  CHECK(first.full.means == second.full.means);
  CHECK(first.integral_selection.kept == second.integral_selection.kept);
  CHECK(first.simplified_selection.kept == second.simplified_selection.kept);

  REQUIRE(first.grid.size() == 201);
  REQUIRE(first.centers.size() == 10);
  REQUIRE(static_cast<int>(first.integral_selection.kept.size()) == 2);
  REQUIRE(static_cast<int>(first.simplified_selection.kept.size()) == 2);
  REQUIRE(first.integral_reduced.size() == 201);
  REQUIRE(first.simplified_reduced.size() == 201);
}

TEST_CASE("default demo contrasts the two selection rules", "[experiments]") {
  const bfselect::RbfDemoConfig config;
  const auto result = bfselect::run_rbf_demo(config);

  // Integral-bound selection keeps basis functions adjacent to the default
  // subdomain [-0.5, 0].
  for (int idx : result.integral_selection.kept) {
    CHECK(result.centers[idx] >= -0.7);
    CHECK(result.centers[idx] <= 0.2);
  }
  // Simplified-bound selection ignores the subdomain and drifts to
  // large-weight basis functions near the domain edges.
  for (int idx : result.simplified_selection.kept) {
    CHECK(std::abs(result.centers[idx]) >= 0.5);
  }
  CHECK(result.simplified_selection.kept != result.integral_selection.kept);
}

TEST_CASE("benchmark rows are deterministic up to timing", "[experiments]") {
  const bfselect::RandomFnConfig config = small_benchmark();
  const auto first = bfselect::run_random_fn(config);
  const auto second = bfselect::run_random_fn(config);
  REQUIRE(first.size() == 4);
  REQUIRE(second.size() == 4);
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(first[i].basis_size == second[i].basis_size);
    CHECK(first[i].rho == second[i].rho);
    REQUIRE(first[i].rel_kl.has_value());
    REQUIRE(second[i].rel_kl.has_value());
    CHECK(*first[i].rel_kl == *second[i].rel_kl);
    REQUIRE(first[i].rel_nlpd.has_value());
    CHECK(*first[i].rel_nlpd == *second[i].rel_nlpd);
    REQUIRE(first[i].rel_rmse.has_value());
    CHECK(*first[i].rel_rmse == *second[i].rel_rmse);
  }

  // Full retention: the reduced model is the full model.
  for (const auto& row : first) {
    if (row.rho == 1.0) {
      CHECK(*row.rel_kl == Approx(1.0).margin(1e-9));
      CHECK(*row.rel_nlpd == Approx(1.0).margin(1e-9));
      CHECK(*row.rel_rmse == Approx(1.0).margin(1e-9));
    }
  }
}

TEST_CASE("benchmark outputs use the documented layout", "[experiments]") {
  TempDir dir("bench");
  bfselect::RandomFnConfig config = small_benchmark();
  config.out_dir = dir.path.string();
  const auto rows = bfselect::run_random_fn(config);
  bfselect::write_random_fn_outputs(rows, config);

  const std::string text = slurp(dir.path / "results.csv");
  CHECK(text.find('\r') == std::string::npos);
  const auto lines = lines_of(text);
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] ==
        "L,rho,rel_kl,rel_nlpd,rel_rmse,rel_time,abs_time_full_s,"
        "abs_time_reduced_s");
  CHECK(lines[1].rfind("8,0.5,", 0) == 0);
  CHECK(lines[3].rfind("27,0.5,", 0) == 0);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    CHECK(std::count(lines[i].begin(), lines[i].end(), ',') == 7);
  }

  const std::string meta = slurp(dir.path / "metadata.txt");
  CHECK(meta.find("experiment=random-fn\n") != std::string::npos);
  CHECK(meta.find("seed=7\n") != std::string::npos);
  CHECK(meta.find("ld_list=2,3\n") != std::string::npos);
  CHECK(meta.find("rho_list=0.5,1\n") != std::string::npos);
  CHECK(meta.find("nlpd_target=gp-mean\n") != std::string::npos);
}

TEST_CASE("command lines populate the demo configuration", "[experiments]") {
  const auto defaults = bfselect::parse_config({"rbf-demo"});
  CHECK(defaults.experiment == "rbf-demo");
  CHECK(defaults.rbf_demo.seed == bfselect::kRbfDemoDefaultSeed);
  CHECK(defaults.rbf_demo.num_bfs == 10);
  CHECK(defaults.rbf_demo.n_select == 2);
  CHECK(defaults.rbf_demo.omega_lo == -0.5);
  CHECK(defaults.rbf_demo.omega_hi == 0.0);
  CHECK(defaults.rbf_demo.out_dir == ".");

  const auto custom = bfselect::parse_config(
      {"rbf-demo", "--seed", "7", "--num-bfs", "12", "--n-select", "3",
       "--omega", "-0.6,0.1", "--out", "demo_out"});
  CHECK(custom.rbf_demo.seed == 7);
  CHECK(custom.rbf_demo.num_bfs == 12);
  CHECK(custom.rbf_demo.n_select == 3);
  CHECK(custom.rbf_demo.omega_lo == -0.6);
  CHECK(custom.rbf_demo.omega_hi == 0.1);
  CHECK(custom.rbf_demo.out_dir == "demo_out");

  const auto equals_form =
      bfselect::parse_config({"rbf-demo", "--omega=-0.25,-0.05"});
  CHECK(equals_form.rbf_demo.omega_lo == -0.25);
  CHECK(equals_form.rbf_demo.omega_hi == -0.05);
}

TEST_CASE("command lines populate the benchmark configuration",
          "[experiments]") {
  const auto defaults = bfselect::parse_config({"random-fn"});
  CHECK(defaults.experiment == "random-fn");
  CHECK(defaults.random_fn.seed == bfselect::kRandomFnDefaultSeed);
  CHECK(defaults.random_fn.n_train == 1000);
  CHECK(defaults.random_fn.lengthscale == 0.1);
  CHECK(defaults.random_fn.kernel_variance == 0.05);
  CHECK(defaults.random_fn.noise_variance == 0.01);
  CHECK(defaults.random_fn.ld_list == std::vector<int>{2, 4, 6, 8, 10, 12});
  CHECK(defaults.random_fn.rho_list ==
        std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.5, 1.0});
  CHECK(defaults.random_fn.nlpd_target == bfselect::NlpdTarget::kGpMean);

  const auto custom = bfselect::parse_config(
      {"random-fn", "--seed", "9", "--n-train", "200", "--lengthscale", "0.2",
       "--kernel-var", "0.1", "--noise-var", "0.02", "--ld-list", "2,4",
       "--rho-list", "0.1,0.5", "--nlpd-target", "true-f", "--out", "bench"});
  CHECK(custom.random_fn.seed == 9);
  CHECK(custom.random_fn.n_train == 200);
  CHECK(custom.random_fn.lengthscale == 0.2);
  CHECK(custom.random_fn.kernel_variance == 0.1);
  CHECK(custom.random_fn.noise_variance == 0.02);
  CHECK(custom.random_fn.ld_list == std::vector<int>{2, 4});
  CHECK(custom.random_fn.rho_list == std::vector<double>{0.1, 0.5});
  CHECK(custom.random_fn.nlpd_target == bfselect::NlpdTarget::kTrueF);
  CHECK(custom.random_fn.out_dir == "bench");
}

TEST_CASE("invalid command lines are rejected", "[experiments]") {
  CHECK_THROWS_AS(bfselect::parse_config({"rbf-demo", "--bogus", "1"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({"frobnicate"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({}), std::invalid_argument);
  CHECK_THROWS_AS(
      bfselect::parse_config({"random-fn", "--rho-list", "0.5,1.5"}),
      std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({"random-fn", "--ld-list", "0"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      bfselect::parse_config({"random-fn", "--nlpd-target", "oracle"}),
      std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({"rbf-demo", "--omega", "0.5"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({"rbf-demo", "--omega", "0.5,0.1"}),
                  std::invalid_argument);
  CHECK_THROWS_AS(bfselect::parse_config({"rbf-demo", "--n-select", "40"}),
                  std::invalid_argument);
}

TEST_CASE("configuration files merge beneath command-line flags",
          "[experiments]") {
  TempDir dir("config");
  const fs::path file = dir.path / "bench.toml";
  {
    std::ofstream out(file);
    out << "n-train=150\n";
    out << "lengthscale=0.3\n";
  }
  const auto merged = bfselect::parse_config(
      {"random-fn", "--config", file.string(), "--lengthscale", "0.25"});
  CHECK(merged.random_fn.n_train == 150);
  // Command line wins over the file.
  CHECK(merged.random_fn.lengthscale == 0.25);

  const fs::path bad = dir.path / "bad.toml";
  {
    std::ofstream out(bad);
    out << "unknown-key=1\n";
  }
  CHECK_THROWS_AS(
      bfselect::parse_config({"random-fn", "--config", bad.string()}),
      std::invalid_argument);
}

TEST_CASE("help requests short-circuit without an experiment",
          "[experiments]") {
  const auto help = bfselect::parse_config({"--help"});
  CHECK(help.experiment.empty());
}
