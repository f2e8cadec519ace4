#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include "bfselect/bfselect.hpp"
#include "bfselect/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  try {
    bfselect::ExperimentConfig config = bfselect::parse_config(std::move(args));
    if (config.experiment.empty()) {
      return 0;
    }
    if (config.experiment == "rbf-demo") {
      const bfselect::RbfDemoResult result =
          bfselect::run_rbf_demo(config.rbf_demo);
      bfselect::write_rbf_demo_outputs(result, config.rbf_demo);
      std::cout << "rbf-demo: wrote base.csv, standard.csv, integral.csv, "
                   "selection.csv to "
                << config.rbf_demo.out_dir << "\n";
    } else {
      config.random_fn.verbose = true;
      const std::vector<bfselect::ResultRow> rows =
          bfselect::run_random_fn(config.random_fn);
      bfselect::write_random_fn_outputs(rows, config.random_fn);
      std::cout << "random-fn: wrote results.csv (" << rows.size()
                << " rows) and metadata.txt to " << config.random_fn.out_dir
                << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "bfselect: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
