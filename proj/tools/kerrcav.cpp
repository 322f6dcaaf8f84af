// kerrcav — driven Kerr oscillator in a chain-mapped environment.
//
// Subcommands:
//   steady-sweep  closed-form steady-state observables over a drive grid
//   evolve        matrix-product-state time evolution with phase-space frames
//   compare       end-state agreement between the three methods
//   chain-info    print the chain couplings for the configured geometry
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 tolerance failure (compare only).

#include "kerrcav/config.hpp"
#include "kerrcav/linalg.hpp"
#include "kerrcav/runner.hpp"
#include "kerrcav/version.hpp"

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  kerrcav::linalg::ensure_single_threaded_blas();

  CLI::App app{"driven dissipative Kerr oscillator toolkit"};
  app.set_version_flag("--version", std::string(kerrcav::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int threads = 1;
  bool seedless = false;
  app.add_option("--config", config_path, "JSON run configuration")
      ->required()
      ->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (created if missing)");
  app.add_option("--threads", threads, "worker threads for grid/sweep fills")
      ->check(CLI::PositiveNumber);
  app.add_flag("--seedless", seedless,
               "accepted for interface compatibility; every computation here "
               "is deterministic and uses no random numbers");

  auto* sweep = app.add_subcommand(
      "steady-sweep", "closed-form steady state over the configured drives");
  auto* evolve =
      app.add_subcommand("evolve", "time-evolve the configured initial state");
  auto* compare = app.add_subcommand(
      "compare", "compare end states across the three methods");
  auto* chain_info =
      app.add_subcommand("chain-info", "print the mapped chain couplings");
  for (CLI::App* sub : {sweep, evolve, compare, chain_info}) {
    sub->fallthrough(); // allow global options after the subcommand name
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int cli_rc = app.exit(e);
    return cli_rc == 0 ? 0 : kerrcav::runner::kExitConfig;
  }

  try {
    const kerrcav::config::RunConfig cfg =
        kerrcav::config::load_config(config_path);
    if (sweep->parsed()) {
      return kerrcav::runner::run_steady_sweep(cfg, out_dir, threads);
    }
    if (evolve->parsed()) {
      return kerrcav::runner::run_evolve(cfg, out_dir, threads);
    }
    if (compare->parsed()) {
      return kerrcav::runner::run_compare(cfg, out_dir, threads);
    }
    if (chain_info->parsed()) {
      return kerrcav::runner::run_chain_info(cfg, std::cout);
    }
    std::cerr << "no subcommand selected\n";
    return kerrcav::runner::kExitConfig;
  } catch (const kerrcav::config::ConfigError& e) {
    std::cerr << "configuration error:\n" << e.what() << "\n";
    return kerrcav::runner::kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kerrcav::runner::kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kerrcav::runner::kExitNumerical;
  }
}
