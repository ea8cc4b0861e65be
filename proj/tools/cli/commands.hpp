#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rlab/report.hpp"

namespace rlab::cli {

struct RunConfig {
  std::string command;
  std::string metric_spec;
  std::vector<double> point;
  // gbc
  int nodes = 32;
  bool richardson = false;
  // grids
  std::vector<double> center;
  double half_width = 0.25;
  int points_per_axis = 3;
  // tolerances; unset means the command default
  std::optional<double> tol;
  std::optional<double> eps_deg;
  std::optional<double> eps_gap;
  // finite differences and sweeps
  double h = 1e-3;
  bool no_richardson = false;
  int cases = 100;
  int draws = 10000;
  std::uint64_t seed = 20240601;
  // output
  std::string out;
  std::string format = "json";
  bool timing = false;
};

struct CommandResult {
  Json report;
  /// False when a residual exceeded its tolerance.
  bool checks_passed = true;
};

/// Executes one command. Throws rlab errors for invalid input.
CommandResult run_command(const RunConfig& config, std::ostream& diagnostics);

/// The command names, in help order.
const std::vector<std::string>& command_names();

}  // namespace rlab::cli
