#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bfselect/experiments.hpp"

namespace bfselect {

/// Parsed command line: which experiment to run and its resolved settings.
/// An empty `experiment` means help was requested and printed; nothing to
/// run.
struct ExperimentConfig {
  std::string experiment;
  RbfDemoConfig rbf_demo;
  RandomFnConfig random_fn;
};

namespace detail {

inline double parse_strict_double(const std::string& text,
                                  const char* context) {
  double value = 0.0;
  const char* begin = text.data();
  const char* end = begin + text.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc() || result.ptr != end) {
    throw std::invalid_argument(std::string(context) + ": malformed number '" +
                                text + "'");
  }
  return value;
}

/// "lo,hi" -> two doubles.
inline std::pair<double, double> parse_interval(const std::string& text,
                                                const char* context) {
  const auto comma = text.find(',');
  if (comma == std::string::npos || text.find(',', comma + 1) != std::string::npos) {
    throw std::invalid_argument(std::string(context) +
                                ": expected exactly two values 'lo,hi', got '" +
                                text + "'");
  }
  return {parse_strict_double(text.substr(0, comma), context),
          parse_strict_double(text.substr(comma + 1), context)};
}

/// Applies a flat `key=value` configuration file to a subcommand. Keys name
/// the subcommand's long options without the leading dashes; `#` starts a
/// comment. Values for options already given on the command line are
/// ignored, so command-line flags win. Unknown keys and malformed lines are
/// rejected.
inline void apply_config_file(CLI::App& sub, const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument(sub.get_name() +
                                ": cannot open config file '" + path + "'");
  }
  const auto strip = [](const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const std::string text = strip(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw std::invalid_argument(
          sub.get_name() + ": malformed config line " +
          std::to_string(line_number) + ": expected key=value, got '" + text +
          "'");
    }
    const std::string key = strip(text.substr(0, eq));
    const std::string value = strip(text.substr(eq + 1));
    CLI::Option* option =
        key == "config" || key == "help"
            ? nullptr
            : sub.get_option_no_throw("--" + key);
    if (option == nullptr) {
      throw std::invalid_argument(sub.get_name() +
                                  ": unknown configuration key '" + key + "'");
    }
    if (option->count() > 0) continue;
    try {
      option->add_result(value);
      option->run_callback();
    } catch (const CLI::Error& e) {
      throw std::invalid_argument(sub.get_name() + ": config key '" + key +
                                  "': " + e.what());
    }
  }
}

}  // namespace detail

/// Parses command-line arguments (program name excluded, natural order).
/// CLI flags override config-file values override defaults; unknown keys are
/// rejected. Throws std::invalid_argument on any parse or validation error.
inline ExperimentConfig parse_config(std::vector<std::string> args) {
  ExperimentConfig config;

  CLI::App app{"Basis-function regression with adaptive basis selection",
               "bfselect"};
  app.require_subcommand(1);

  auto* rbf = app.add_subcommand(
      "rbf-demo",
      "1-D RBF regression with basis selection toward a subdomain");
  std::string rbf_config_path;
  rbf->add_option("--config", rbf_config_path,
                  "read unset options from a key=value file");
  std::string omega_text = "-0.5,0.0";
  rbf->add_option("--seed", config.rbf_demo.seed, "RNG seed")
      ->capture_default_str();
  rbf->add_option("--num-bfs", config.rbf_demo.num_bfs,
                  "number of equidistant RBF basis functions")
      ->capture_default_str();
  rbf->add_option("--n-select", config.rbf_demo.n_select,
                  "number of basis functions to keep")
      ->capture_default_str();
  rbf->add_option("--omega", omega_text, "prediction subdomain as lo,hi")
      ->capture_default_str();
  rbf->add_option("--out", config.rbf_demo.out_dir, "output directory")
      ->capture_default_str();

  auto* rfn = app.add_subcommand(
      "random-fn",
      "3-D random-function benchmark over basis size and retention fraction");
  std::string rfn_config_path;
  rfn->add_option("--config", rfn_config_path,
                  "read unset options from a key=value file");
  std::string nlpd_target_text = "gp-mean";
  rfn->add_option("--seed", config.random_fn.seed, "RNG seed")
      ->capture_default_str();
  rfn->add_option("--n-train", config.random_fn.n_train,
                  "number of training points")
      ->capture_default_str();
  rfn->add_option("--lengthscale", config.random_fn.lengthscale,
                  "SE kernel lengthscale")
      ->capture_default_str();
  rfn->add_option("--kernel-var", config.random_fn.kernel_variance,
                  "SE kernel variance")
      ->capture_default_str();
  rfn->add_option("--noise-var", config.random_fn.noise_variance,
                  "observation noise variance")
      ->capture_default_str();
  rfn->add_option("--ld-list", config.random_fn.ld_list,
                  "per-dimension basis counts, comma separated")
      ->delimiter(',')
      ->capture_default_str();
  rfn->add_option("--rho-list", config.random_fn.rho_list,
                  "retention fractions in (0, 1], comma separated")
      ->delimiter(',')
      ->capture_default_str();
  rfn->add_option("--nlpd-target", nlpd_target_text,
                  "NLPD evaluation targets")
      ->check(CLI::IsMember({"gp-mean", "true-f"}))
      ->capture_default_str();
  rfn->add_option("--out", config.random_fn.out_dir, "output directory")
      ->capture_default_str();

  // "--omega -0.5,0.0": fold the value into --omega=... so the leading '-'
  // of the value is never mistaken for an option name.
  for (std::size_t i = 0; i + 1 < args.size(); ++i) {
    if (args[i] == "--omega") {
      args[i] += "=" + args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    }
  }

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return config;
  } catch (const CLI::ParseError& e) {
    throw std::invalid_argument(e.what());
  }

  if (app.got_subcommand(rbf)) {
    config.experiment = "rbf-demo";
    if (!rbf_config_path.empty()) {
      detail::apply_config_file(*rbf, rbf_config_path);
    }
    const auto [lo, hi] = detail::parse_interval(omega_text, "rbf-demo: omega");
    config.rbf_demo.omega_lo = lo;
    config.rbf_demo.omega_hi = hi;
    config.rbf_demo.validate();
  } else {
    config.experiment = "random-fn";
    if (!rfn_config_path.empty()) {
      detail::apply_config_file(*rfn, rfn_config_path);
    }
    config.random_fn.nlpd_target = nlpd_target_text == "true-f"
                                       ? NlpdTarget::kTrueF
                                       : NlpdTarget::kGpMean;
    config.random_fn.validate();
  }
  return config;
}

}  // namespace bfselect
