#pragma once
// Subcommand bodies behind the gekf executable. Each returns a process exit code.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gekf/config.hpp"
#include "gekf/manifold.hpp"

namespace gekf::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3, kThresholdFailure = 4 };

/// Monte Carlo campaign: CSVs, table.txt, SVG plots, config.json and manifest.json in cfg.output_dir.
int cmd_bench(const CliConfig& cfg, std::ostream& log);

/// Order-fit table for one geometry; kThresholdFailure if any row misses its threshold.
int cmd_check(const std::string& geometry, const std::vector<JacobianMode>& modes, std::ostream& log);

/// Truth, IMU and measurement streams of run 0 (same seed as the first bench run).
int cmd_simulate(const CliConfig& cfg, std::ostream& log);

/// Maps the exception in flight to an exit code and prints it to err.
int report_exception(std::ostream& err);

}  // namespace gekf::cli
