#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>

#include "poa/network.hpp"

namespace poa {

struct RunConfig {
  std::string command;  // solve, optimum, sweep, trace, breakpoints, analyze, verify
  std::string network_path;
  std::optional<double> demand;
  double from = 0.0;
  double to = 0.0;
  std::size_t samples = 100;
  double max_demand = 0.0;
  double tol = 1e-10;
  double active_eps = 1e-7;
  double refine_tol = 1e-9;
  std::size_t max_iterations = 1'000'000;
  std::string method = "auto";  // auto, frank-wolfe, exact
  bool adaptive = false;
  unsigned threads = 1;
  std::string trace_path;
  std::string flows_path;
  std::string output;  // empty: write to `out`
  std::string format;  // csv or json; empty picks the command default
  std::size_t path_cap = kDefaultPathCap;
};

/// Exit status: 0 success, 1 input error, 2 solver failure, 3 contract violation.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses command-line arguments (and POA_MAX_PATHS) and calls run.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace poa
