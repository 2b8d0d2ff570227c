#include "commands.hpp"

#include <fstream>
#include <iostream>

#include "gekf/bench.hpp"
#include "gekf/check.hpp"
#include "gekf/ins.hpp"

namespace gekf::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& file) {
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write " + file.string());
  return os;
}

void write_text(const fs::path& file, const std::string& text) {
  auto os = open_out(file);
  os << text;
  if (!os) throw Error("failed writing " + file.string());
}

void prepare(const CliConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) throw Error("cannot create " + cfg.output_dir.string() + ": " + ec.message());
  write_text(cfg.output_dir / "config.json", to_json(cfg));
  write_text(cfg.output_dir / "manifest.json", manifest_json(cfg));
}

}  // namespace

int cmd_bench(const CliConfig& cfg, std::ostream& log) {
  cfg.validate();
  prepare(cfg);
  const auto report = bench::monte_carlo(cfg.bench);
  bench::emit(cfg.output_dir, report, cfg.write_errors);
  log << bench::format_table(report);
  for (const auto& d : report.diagnostics)
    if (d.diverged > 0) log << d.variant << ": " << d.diverged << " of " << report.runs << " runs diverged\n";
  log << "wrote " << cfg.output_dir.string() << "\n";
  return kOk;
}

int cmd_check(const std::string& geometry, const std::vector<JacobianMode>& modes, std::ostream& log) {
  const auto rows = order_check(geometry, modes);
  log << format_order_check(rows);
  for (const auto& r : rows)
    if (!r.pass) return kThresholdFailure;
  return kOk;
}

int cmd_simulate(const CliConfig& cfg, std::ostream& log) {
  cfg.validate();
  prepare(cfg);
  const auto& tc = cfg.bench.trajectory;
  const auto run = ins::simulate_run(tc, bench::run_seed(cfg.bench.seed, 0));
  {
    auto os = open_out(cfg.output_dir / "truth.csv");
    ins::write_truth_csv(os, run, tc);
  }
  {
    auto os = open_out(cfg.output_dir / "imu.csv");
    ins::write_imu_csv(os, run);
  }
  {
    auto os = open_out(cfg.output_dir / "measurements.csv");
    ins::write_measurement_csv(os, run);
  }
  log << "wrote " << run.imu.size() << " IMU samples and " << run.meas.size() << " measurements to "
      << cfg.output_dir.string() << "\n";
  return kOk;
}

int report_exception(std::ostream& err) {
  try {
    throw;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnsupportedError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace gekf::cli
