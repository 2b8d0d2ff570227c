// gekf: Monte Carlo benchmark, Jacobian order checks and data simulation.
//
// Configuration precedence: built-in defaults < --config file < individual flags.
// Worker threads for `bench` come from GEKF_THREADS (or the "threads" config key).

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "commands.hpp"

using namespace gekf;

namespace {

struct Overrides {
  std::string config;
  std::optional<int> runs;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> variants;
  std::optional<std::string> out;
  std::optional<std::string> jacobian_mode;

  void attach(CLI::App* app, bool bench) {
    app->add_option("--config", config, "JSON configuration file")->check(CLI::ExistingFile);
    app->add_option("--seed", seed, "Campaign seed");
    app->add_option("--out", out, "Output directory");
    if (!bench) return;
    app->add_option("--runs", runs, "Monte Carlo runs");
    app->add_option("--variants", variants, "Comma-separated variant list")->delimiter(',');
    app->add_option("--jacobian-mode", jacobian_mode,
                    "closed_form | pt_curvature | pt_only | finite_diff");
  }

  CliConfig resolve() const {
    CliConfig cfg = config.empty() ? CliConfig{} : load_config(config);
    if (runs) cfg.bench.runs = *runs;
    if (seed) cfg.bench.seed = *seed;
    if (!variants.empty()) cfg.bench.variants = variants;
    if (out) cfg.output_dir = *out;
    if (jacobian_mode) cfg.bench.jacobian_mode = parse_jacobian_mode(*jacobian_mode);
    cfg.validate();
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Geometric EKF toolkit"};
  app.set_version_flag("--version", GEKF_VERSION);
  app.require_subcommand(1);

  Overrides bench_opts, sim_opts;
  auto* bench = app.add_subcommand("bench", "Run the SE2(3) inertial navigation Monte Carlo benchmark");
  bench_opts.attach(bench, true);
  bool print_config = false;
  bench->add_flag("--print-config", print_config, "Print the resolved configuration and exit");

  auto* simulate = app.add_subcommand("simulate", "Write truth, IMU and measurement streams");
  sim_opts.attach(simulate, false);

  std::string geometry = "SO3";
  std::vector<std::string> modes{"pt_curvature", "pt_only"};
  auto* check = app.add_subcommand("check", "Fit Jacobian approximation orders against finite differences");
  check->add_option("--geometry", geometry, "R<n>, SO3, SE3 or SE23")->capture_default_str();
  check->add_option("--mode", modes, "Comma-separated Jacobian modes")->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kConfigError;
  }

  try {
    if (*bench) {
      const auto cfg = bench_opts.resolve();
      if (print_config) {
        std::cout << to_json(cfg);
        return cli::kOk;
      }
      return cli::cmd_bench(cfg, std::cout);
    }
    if (*simulate) return cli::cmd_simulate(sim_opts.resolve(), std::cout);
    std::vector<JacobianMode> parsed;
    for (const auto& m : modes) parsed.push_back(parse_jacobian_mode(m));
    return cli::cmd_check(geometry, parsed, std::cout);
  } catch (...) {
    return cli::report_exception(std::cerr);
  }
}
