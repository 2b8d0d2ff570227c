#pragma once
// Monte Carlo benchmark for the SE₂(3) case study: per-run filtering on paired
// sensor streams, RMSE/ANEES aggregation and CSV/table/SVG emission.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gekf/filter.hpp"
#include "gekf/ins.hpp"

namespace gekf::bench {

struct BenchConfig {
  ins::TrajectoryConfig trajectory;
  std::vector<std::string> variants = variant_names();
  int runs = 100;
  std::uint64_t seed = 1;
  JacobianMode jacobian_mode = JacobianMode::closed_form;
  int max_iters = 10;
  double iter_tol = 1e-8;
  double transient_end = 30;  // s; transient phase is t < transient_end
  int threads = 0;            // 0: GEKF_THREADS or hardware concurrency

  void validate() const;
};

/// One variant on one run. Errors are sampled at t = 0 and after every measurement update.
struct RunReport {
  std::string variant;
  int run = 0;
  std::uint64_t seed = 0;
  bool diverged = false;
  std::string failure;
  std::vector<double> t;
  std::vector<ins::Vec9> eps;    // log(ξ̂, ξ): truth in the estimate chart
  std::vector<double> nees;      // εᵀΣ⁻¹ε
  std::vector<int> iterations;   // relinearizations per update (iterated variants)
  long spd_repairs = 0;
};

struct SummaryRow {
  std::string variant;
  std::string phase;  // "transient" or "asymptotic"
  double rmse_rot_deg = 0;
  double rmse_pos_m = 0;
  double rmse_vel_mps = 0;
  double pct_vs_baseline = 0;
  bool operator==(const SummaryRow&) const = default;
};

struct AneesRow {
  std::string variant;
  double t = 0;
  double anees = 0;
  double band_lo = 0;
  double band_hi = 0;
  bool operator==(const AneesRow&) const = default;
};

struct ErrorRow {
  std::string variant;
  int run = 0;
  double t = 0;
  ins::Vec9 eps = ins::Vec9::Zero();
  bool operator==(const ErrorRow&) const = default;
};

struct DiagnosticsRow {
  std::string variant;
  int runs_used = 0;
  int diverged = 0;
  long updates = 0;
  double single_iteration_fraction = 0;  // updates whose iteration stopped after one relinearization
  double mean_anees_transient = 0;
  double mean_anees_asymptotic = 0;
  long spd_repairs = 0;
  bool operator==(const DiagnosticsRow&) const = default;
};

struct AggregateReport {
  int runs = 0;
  std::vector<SummaryRow> summary;
  std::vector<AneesRow> anees;
  std::vector<ErrorRow> errors;
  std::vector<DiagnosticsRow> diagnostics;
  bool operator==(const AggregateReport&) const = default;

  const SummaryRow& row(const std::string& variant, const std::string& phase) const;
  const DiagnosticsRow& diag(const std::string& variant) const;
};

/// √(mean ‖bᵢ‖²) over all blocks. Throws DimensionError on empty input.
double rmse(const std::vector<Vector>& blocks);

/// (1/nM) Σ εᵢᵀΣᵢ⁻¹εᵢ with n the error dimension. Throws NumericalError on singular Σ.
double anees(const std::vector<Vector>& errors, const std::vector<Matrix>& covs);

/// Two-sided 95% chi-square band for the ANEES of M runs of dimension n.
std::pair<double, double> anees_band(int n, int M, double confidence = 0.95);

/// Seed of run r derived from the campaign seed.
std::uint64_t run_seed(std::uint64_t seed, int run);

/// Filters one simulated run with one variant.
RunReport filter_run(const BenchConfig& cfg, const ins::SimulatedRun& data, const FilterVariant& variant, int run,
                     std::uint64_t seed);

/// Runs every requested variant on the same streams of each run, in parallel over runs.
std::vector<RunReport> run_campaign(const BenchConfig& cfg);

/// Deterministic reduction; independent of the order of `reports`.
AggregateReport aggregate(const BenchConfig& cfg, std::vector<RunReport> reports);

AggregateReport monte_carlo(const BenchConfig& cfg);

/// Worker count from GEKF_THREADS (if set and positive) or hardware concurrency.
int default_threads();

// Emission. Paths are created; unwritable paths throw gekf::Error.
void write_summary_csv(const std::filesystem::path& file, const AggregateReport& r);
void write_anees_csv(const std::filesystem::path& file, const AggregateReport& r);
void write_errors_csv(const std::filesystem::path& file, const AggregateReport& r);
void write_diagnostics_csv(const std::filesystem::path& file, const AggregateReport& r);
/// Writes all CSVs, table.txt and the SVG plots into dir.
void emit(const std::filesystem::path& dir, const AggregateReport& r, bool with_errors = true);
AggregateReport read_report(const std::filesystem::path& dir);

/// Table I layout: one block per phase, one row per variant, percentages against the baseline.
std::string format_table(const AggregateReport& r);
std::string error_plot_svg(const AggregateReport& r);
std::string anees_plot_svg(const AggregateReport& r);

}  // namespace gekf::bench
