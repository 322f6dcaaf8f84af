#pragma once

// Orchestration of the four command-line workflows: steady-state sweeps,
// chain-plus-oscillator time evolution with Wigner frame dumps, cross-method
// comparison reports, and chain coefficient inspection.  Every run directory
// receives exactly one manifest that reproduces the run.

#include "kerrcav/config.hpp"

#include <iosfwd>
#include <string>

namespace kerrcav::runner {

// process exit codes shared with the CLI
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitTolerance = 4;

int run_steady_sweep(const config::RunConfig& cfg, const std::string& out_dir,
                     int threads);
int run_evolve(const config::RunConfig& cfg, const std::string& out_dir,
               int threads);
int run_compare(const config::RunConfig& cfg, const std::string& out_dir,
                int threads);
int run_chain_info(const config::RunConfig& cfg, std::ostream& out);

} // namespace kerrcav::runner
