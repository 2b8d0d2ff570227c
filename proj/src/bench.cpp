#include "gekf/bench.hpp"

#include <Eigen/Cholesky>
#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "gekf/lie.hpp"

namespace gekf::bench {

namespace fs = std::filesystem;

namespace {

using SE23 = lie::SE23<double>;

constexpr double kDivergedError = 1e3;
const char* const kPhases[] = {"transient", "asymptotic"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const fs::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(file.parent_path(), ec);
  }
  std::ofstream os(file, std::ios::binary);
  if (!os) throw Error("cannot write " + file.string());
  return os;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str()) throw Error("malformed number '" + s + "'");
  return v;
}

// Rows of a CSV file after its header; the header must match.
std::vector<std::vector<std::string>> read_csv(const fs::path& file, const std::string& header) {
  std::ifstream is(file, std::ios::binary);
  if (!is) throw Error("cannot read " + file.string());
  std::string line;
  if (!std::getline(is, line) || line != header) throw Error(file.string() + ": unexpected header");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(is, line))
    if (!line.empty()) rows.push_back(split(line));
  return rows;
}

int variant_rank(const BenchConfig& cfg, const std::string& v) {
  const auto it = std::find(cfg.variants.begin(), cfg.variants.end(), v);
  return static_cast<int>(it - cfg.variants.begin());
}

double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const double pos = q * (v.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - lo) * (v[hi] - v[lo]);
}

const char* const kPalette[] = {"#e08214", "#1b9e77", "#7570b3", "#d95f02", "#66a61e", "#e7298a", "#a6761d", "#666666"};

struct Axis {
  double x0, x1, y0, y1;  // data range
  double left, top, width, height;
  double px(double x) const { return left + (x - x0) / (x1 - x0) * width; }
  double py(double y) const { return top + height - (y - y0) / (y1 - y0) * height; }
};

void axes_svg(std::ostringstream& os, const Axis& a, const std::string& title, const std::string& ylabel) {
  os << "<rect x='" << a.left << "' y='" << a.top << "' width='" << a.width << "' height='" << a.height
     << "' fill='none' stroke='#000'/>\n";
  os << "<text x='" << a.left + a.width / 2 << "' y='" << a.top - 8 << "' text-anchor='middle' font-size='14'>"
     << title << "</text>\n";
  os << "<text x='" << a.left - 45 << "' y='" << a.top + a.height / 2 << "' font-size='12' transform='rotate(-90 "
     << a.left - 45 << ' ' << a.top + a.height / 2 << ")' text-anchor='middle'>" << ylabel << "</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double y = a.y0 + (a.y1 - a.y0) * i / 4, x = a.x0 + (a.x1 - a.x0) * i / 4;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", y);
    os << "<text x='" << a.left - 4 << "' y='" << a.py(y) + 4 << "' text-anchor='end' font-size='10'>" << buf
       << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", x);
    os << "<text x='" << a.px(x) << "' y='" << a.top + a.height + 14 << "' text-anchor='middle' font-size='10'>"
       << buf << "</text>\n";
  }
}

std::string polyline(const Axis& a, const std::vector<double>& x, const std::vector<double>& y) {
  std::ostringstream os;
  for (size_t i = 0; i < x.size(); ++i) os << (i ? " " : "") << a.px(x[i]) << ',' << a.py(std::min(y[i], a.y1));
  return os.str();
}

}  // namespace

void BenchConfig::validate() const {
  trajectory.validate();
  if (runs < 1) throw ConfigError("runs must be >= 1");
  if (variants.empty()) throw ConfigError("variants must not be empty");
  for (const auto& v : variants) variant_from_name(v);
  for (size_t i = 0; i < variants.size(); ++i)
    for (size_t j = i + 1; j < variants.size(); ++j)
      if (variants[i] == variants[j]) throw ConfigError("variant '" + variants[i] + "' listed twice");
  if (max_iters < 1) throw ConfigError("max_iters must be >= 1");
  if (!(iter_tol > 0)) throw ConfigError("iter_tol must be positive");
  if (!(transient_end > 0)) throw ConfigError("transient_end must be positive");
  if (threads < 0) throw ConfigError("threads must be >= 0");
}

const SummaryRow& AggregateReport::row(const std::string& variant, const std::string& phase) const {
  for (const auto& r : summary)
    if (r.variant == variant && r.phase == phase) return r;
  throw Error("no summary row for " + variant + "/" + phase);
}

const DiagnosticsRow& AggregateReport::diag(const std::string& variant) const {
  for (const auto& r : diagnostics)
    if (r.variant == variant) return r;
  throw Error("no diagnostics row for " + variant);
}

double rmse(const std::vector<Vector>& blocks) {
  if (blocks.empty()) throw DimensionError("rmse: empty input");
  double acc = 0;
  for (const auto& b : blocks) acc += b.squaredNorm();
  return std::sqrt(acc / blocks.size());
}

double anees(const std::vector<Vector>& errors, const std::vector<Matrix>& covs) {
  if (errors.empty() || errors.size() != covs.size()) throw DimensionError("anees: need one covariance per error");
  const double n = static_cast<double>(errors.front().size());
  double acc = 0;
  for (size_t i = 0; i < errors.size(); ++i) {
    Eigen::LLT<Matrix> llt(covs[i]);
    if (llt.info() != Eigen::Success) throw NumericalError("anees: covariance is singular or indefinite");
    acc += errors[i].dot(llt.solve(errors[i]));
  }
  return acc / (n * errors.size());
}

std::pair<double, double> anees_band(int n, int M, double confidence) {
  const double dof = static_cast<double>(n) * M;
  const boost::math::chi_squared chi(dof);
  const double tail = (1 - confidence) / 2;
  return {boost::math::quantile(chi, tail) / dof, boost::math::quantile(chi, 1 - tail) / dof};
}

std::uint64_t run_seed(std::uint64_t seed, int run) {
  // splitmix64 finalizer over (seed, run)
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(run) + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int default_threads() {
  if (const char* env = std::getenv("GEKF_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunReport filter_run(const BenchConfig& cfg, const ins::SimulatedRun& data, const FilterVariant& base, int run,
                     std::uint64_t seed) {
  FilterVariant variant = base;
  variant.max_iters = cfg.max_iters;
  variant.iter_tol = cfg.iter_tol;
  variant.jacobian_mode = cfg.jacobian_mode;
  const auto sys = ins::make_system_model(cfg.trajectory);
  const auto meas = ins::make_measurement_model(cfg.trajectory);
  const double dt = cfg.trajectory.dt();

  RunReport rep;
  rep.variant = variant.name;
  rep.run = run;
  rep.seed = seed;
  FilterState s{Matrix(data.initial_estimate), ins::initial_covariance(cfg.trajectory), 0};

  auto record = [&](long k) {
    const ins::State est = s.estimate;
    const ins::Vec9 e = SE23::log(SE23::inverse(est) * data.truth[k]);
    Eigen::LLT<Matrix> llt(s.cov);
    if (llt.info() != Eigen::Success || !e.allFinite() || e.norm() > kDivergedError) {
      rep.diverged = true;
      rep.failure = "error norm above 1e3 or covariance not SPD";
      return;
    }
    rep.t.push_back(k * dt);
    rep.eps.push_back(e);
    rep.nees.push_back(Vector(e).dot(llt.solve(Vector(e))));
  };

  try {
    record(0);
    size_t next = 0;
    const long steps = static_cast<long>(data.truth.size()) - 1;
    for (long k = 0; k < steps && !rep.diverged; ++k) {
      std::optional<Matrix> y;
      if (next < data.meas.size() && data.meas[next].k == k + 1) y = Matrix(data.meas[next++].pose);
      StepResult r = step(s, ins::input_vector(data.imu[k]), y, sys, meas, variant);
      s = std::move(r.state);
      rep.spd_repairs += r.trace.spd_repaired;
      if (y) {
        if (variant.iterated) rep.iterations.push_back(r.trace.iterations);
        record(k + 1);
      }
    }
  } catch (const Error& e) {
    rep.diverged = true;
    rep.failure = e.what();
  }
  return rep;
}

std::vector<RunReport> run_campaign(const BenchConfig& cfg) {
  cfg.validate();
  const int V = static_cast<int>(cfg.variants.size());
  std::vector<FilterVariant> variants;
  for (const auto& name : cfg.variants) variants.push_back(variant_from_name(name));
  std::vector<RunReport> out(static_cast<size_t>(cfg.runs) * V);

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (int r = next++; r < cfg.runs; r = next++) {
      try {
        const std::uint64_t seed = run_seed(cfg.seed, r);
        const ins::SimulatedRun data = ins::simulate_run(cfg.trajectory, seed);
        for (int v = 0; v < V; ++v) out[static_cast<size_t>(r) * V + v] = filter_run(cfg, data, variants[v], r, seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const int threads = std::min(cfg.threads > 0 ? cfg.threads : default_threads(), cfg.runs);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

AggregateReport aggregate(const BenchConfig& cfg, std::vector<RunReport> reports) {
  std::sort(reports.begin(), reports.end(), [&](const RunReport& a, const RunReport& b) {
    const int va = variant_rank(cfg, a.variant), vb = variant_rank(cfg, b.variant);
    return va != vb ? va < vb : a.run < b.run;
  });

  AggregateReport out;
  out.runs = cfg.runs;
  const std::string baseline =
      std::find(cfg.variants.begin(), cfg.variants.end(), "ekf") != cfg.variants.end() ? "ekf" : cfg.variants.front();

  std::map<std::string, std::array<double, 2>> base_pos;
  std::vector<SummaryRow> rows;
  for (const auto& variant : cfg.variants) {
    std::vector<const RunReport*> used;
    DiagnosticsRow d;
    d.variant = variant;
    long single = 0;
    for (const auto& r : reports) {
      if (r.variant != variant) continue;
      if (r.diverged) {
        ++d.diverged;
        continue;
      }
      used.push_back(&r);
      d.spd_repairs += r.spd_repairs;
      for (int it : r.iterations) {
        ++d.updates;
        single += it <= 1;
      }
    }
    d.runs_used = static_cast<int>(used.size());
    d.single_iteration_fraction = d.updates > 0 ? static_cast<double>(single) / d.updates : 0;

    for (int phase = 0; phase < 2; ++phase) {
      std::vector<Vector> rot, pos, vel;
      for (const RunReport* r : used)
        for (size_t j = 0; j < r->t.size(); ++j) {
          if ((r->t[j] < cfg.transient_end) != (phase == 0)) continue;
          rot.emplace_back(r->eps[j].head<3>());
          vel.emplace_back(r->eps[j].segment<3>(3));
          pos.emplace_back(r->eps[j].tail<3>());
        }
      SummaryRow s;
      s.variant = variant;
      s.phase = kPhases[phase];
      const double nan = std::numeric_limits<double>::quiet_NaN();
      s.rmse_rot_deg = rot.empty() ? nan : rmse(rot) * 180 / M_PI;
      s.rmse_pos_m = pos.empty() ? nan : rmse(pos);
      s.rmse_vel_mps = vel.empty() ? nan : rmse(vel);
      rows.push_back(s);
      if (variant == baseline) base_pos[variant][phase] = s.rmse_pos_m;
    }

    if (!used.empty()) {
      const auto band = anees_band(9, d.runs_used);
      const auto& times = used.front()->t;
      double sum[2] = {0, 0};
      int count[2] = {0, 0};
      for (size_t j = 0; j < times.size(); ++j) {
        double acc = 0;
        for (const RunReport* r : used) acc += r->nees.at(j);
        AneesRow a{variant, times[j], acc / (9.0 * d.runs_used), band.first, band.second};
        const int phase = times[j] < cfg.transient_end ? 0 : 1;
        sum[phase] += a.anees;
        ++count[phase];
        out.anees.push_back(a);
      }
      d.mean_anees_transient = count[0] ? sum[0] / count[0] : 0;
      d.mean_anees_asymptotic = count[1] ? sum[1] / count[1] : 0;
      for (const RunReport* r : used)
        for (size_t j = 0; j < r->t.size(); ++j) out.errors.push_back({variant, r->run, r->t[j], r->eps[j]});
    }
    out.diagnostics.push_back(d);
  }
  for (auto& s : rows) s.pct_vs_baseline = 100 * s.rmse_pos_m / base_pos[baseline][s.phase == "transient" ? 0 : 1];
  out.summary = std::move(rows);
  return out;
}

AggregateReport monte_carlo(const BenchConfig& cfg) { return aggregate(cfg, run_campaign(cfg)); }

void write_summary_csv(const fs::path& file, const AggregateReport& r) {
  auto os = open_out(file);
  os << "variant,phase,rmse_rot_deg,rmse_pos_m,rmse_vel_mps,pct_vs_baseline\n";
  for (const auto& s : r.summary)
    os << s.variant << ',' << s.phase << ',' << fmt(s.rmse_rot_deg) << ',' << fmt(s.rmse_pos_m) << ','
       << fmt(s.rmse_vel_mps) << ',' << fmt(s.pct_vs_baseline) << '\n';
}

void write_anees_csv(const fs::path& file, const AggregateReport& r) {
  auto os = open_out(file);
  os << "variant,t,anees,band_lo,band_hi\n";
  for (const auto& a : r.anees)
    os << a.variant << ',' << fmt(a.t) << ',' << fmt(a.anees) << ',' << fmt(a.band_lo) << ',' << fmt(a.band_hi)
       << '\n';
}

void write_errors_csv(const fs::path& file, const AggregateReport& r) {
  auto os = open_out(file);
  os << "variant,run,t,eps_1,eps_2,eps_3,eps_4,eps_5,eps_6,eps_7,eps_8,eps_9\n";
  for (const auto& e : r.errors) {
    os << e.variant << ',' << e.run << ',' << fmt(e.t);
    for (int i = 0; i < 9; ++i) os << ',' << fmt(e.eps(i));
    os << '\n';
  }
}

void write_diagnostics_csv(const fs::path& file, const AggregateReport& r) {
  auto os = open_out(file);
  os << "variant,runs,runs_used,diverged,updates,single_iteration_fraction,mean_anees_transient,"
        "mean_anees_asymptotic,spd_repairs\n";
  for (const auto& d : r.diagnostics)
    os << d.variant << ',' << r.runs << ',' << d.runs_used << ',' << d.diverged << ',' << d.updates << ','
       << fmt(d.single_iteration_fraction) << ',' << fmt(d.mean_anees_transient) << ','
       << fmt(d.mean_anees_asymptotic) << ',' << d.spd_repairs << '\n';
}

void emit(const fs::path& dir, const AggregateReport& r, bool with_errors) {
  write_summary_csv(dir / "summary.csv", r);
  write_anees_csv(dir / "anees.csv", r);
  write_diagnostics_csv(dir / "diagnostics.csv", r);
  if (with_errors) write_errors_csv(dir / "errors.csv", r);
  open_out(dir / "table.txt") << format_table(r);
  if (!r.errors.empty()) open_out(dir / "errors.svg") << error_plot_svg(r);
  if (!r.anees.empty()) open_out(dir / "anees.svg") << anees_plot_svg(r);
}

AggregateReport read_report(const fs::path& dir) {
  AggregateReport r;
  for (const auto& c : read_csv(dir / "summary.csv", "variant,phase,rmse_rot_deg,rmse_pos_m,rmse_vel_mps,pct_vs_baseline")) {
    if (c.size() != 6) throw Error("summary.csv: expected 6 columns");
    r.summary.push_back({c[0], c[1], parse_double(c[2]), parse_double(c[3]), parse_double(c[4]), parse_double(c[5])});
  }
  for (const auto& c : read_csv(dir / "anees.csv", "variant,t,anees,band_lo,band_hi")) {
    if (c.size() != 5) throw Error("anees.csv: expected 5 columns");
    r.anees.push_back({c[0], parse_double(c[1]), parse_double(c[2]), parse_double(c[3]), parse_double(c[4])});
  }
  const auto diag = read_csv(dir / "diagnostics.csv",
                             "variant,runs,runs_used,diverged,updates,single_iteration_fraction,mean_anees_transient,"
                             "mean_anees_asymptotic,spd_repairs");
  for (const auto& c : diag) {
    if (c.size() != 9) throw Error("diagnostics.csv: expected 9 columns");
    r.runs = std::stoi(c[1]);
    r.diagnostics.push_back({c[0], std::stoi(c[2]), std::stoi(c[3]), std::stol(c[4]), parse_double(c[5]),
                             parse_double(c[6]), parse_double(c[7]), std::stol(c[8])});
  }
  if (fs::exists(dir / "errors.csv")) {
    for (const auto& c : read_csv(dir / "errors.csv", "variant,run,t,eps_1,eps_2,eps_3,eps_4,eps_5,eps_6,eps_7,eps_8,eps_9")) {
      if (c.size() != 12) throw Error("errors.csv: expected 12 columns");
      ErrorRow e{c[0], std::stoi(c[1]), parse_double(c[2]), ins::Vec9::Zero()};
      for (int i = 0; i < 9; ++i) e.eps(i) = parse_double(c[3 + i]);
      r.errors.push_back(e);
    }
  }
  return r;
}

std::string format_table(const AggregateReport& r) {
  std::ostringstream os;
  std::vector<std::string> variants;
  for (const auto& s : r.summary)
    if (std::find(variants.begin(), variants.end(), s.variant) == variants.end()) variants.push_back(s.variant);
  for (const char* phase : kPhases) {
    // Percentages follow the pct_vs_baseline convention for every block.
    const SummaryRow* base = nullptr;
    for (const auto& s : r.summary)
      if (s.phase == phase && std::abs(s.pct_vs_baseline - 100) < 1e-9) {
        base = &s;
        break;
      }
    os << "RMSE, " << phase << " phase (M = " << r.runs << ")\n";
    char line[256];
    std::snprintf(line, sizeof line, "%-16s %20s %20s %20s\n", "variant", "rot (deg)", "pos (m)", "vel (m/s)");
    os << line;
    for (const auto& v : variants) {
      for (const auto& s : r.summary) {
        if (s.variant != v || s.phase != phase) continue;
        auto cell = [&](double x, double b) {
          char c[64];
          std::snprintf(c, sizeof c, "%.4f (%.1f%%)", x, base ? 100 * x / b : 100.0);
          return std::string(c);
        };
        std::snprintf(line, sizeof line, "%-16s %20s %20s %20s\n", v.c_str(),
                      cell(s.rmse_rot_deg, base ? base->rmse_rot_deg : 1).c_str(),
                      cell(s.rmse_pos_m, base ? base->rmse_pos_m : 1).c_str(),
                      cell(s.rmse_vel_mps, base ? base->rmse_vel_mps : 1).c_str());
        os << line;
      }
    }
    os << '\n';
  }
  for (const auto& d : r.diagnostics) {
    char line[256];
    std::snprintf(line, sizeof line, "%-16s used %d/%d, diverged %d, mean ANEES %.3f / %.3f\n", d.variant.c_str(),
                  d.runs_used, r.runs, d.diverged, d.mean_anees_transient, d.mean_anees_asymptotic);
    os << line;
  }
  return os.str();
}

std::string error_plot_svg(const AggregateReport& r) {
  // Percentile bands of the block error norms over runs at each sample time.
  std::vector<std::string> variants;
  std::map<std::string, std::map<double, std::array<std::vector<double>, 3>>> samples;
  for (const auto& e : r.errors) {
    if (std::find(variants.begin(), variants.end(), e.variant) == variants.end()) variants.push_back(e.variant);
    auto& s = samples[e.variant][e.t];
    s[0].push_back(e.eps.head<3>().norm() * 180 / M_PI);
    s[1].push_back(e.eps.tail<3>().norm());
    s[2].push_back(e.eps.segment<3>(3).norm());
  }
  const char* titles[] = {"rotation error", "position error", "velocity error"};
  const char* units[] = {"deg", "m", "m/s"};
  std::ostringstream os;
  const double W = 900, H = 260;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << 3 * H + 40
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  for (int b = 0; b < 3; ++b) {
    double tmax = 0, ymax = 0;
    std::map<std::string, std::array<std::vector<double>, 4>> curves;  // t, p25, p50, p75
    for (const auto& v : variants) {
      auto& c = curves[v];
      for (const auto& [t, s] : samples[v]) {
        c[0].push_back(t);
        c[1].push_back(percentile(s[b], 0.25));
        c[2].push_back(percentile(s[b], 0.5));
        c[3].push_back(percentile(s[b], 0.75));
        tmax = std::max(tmax, t);
      }
      // Clip the vertical range to the late-time spread so the transient does not flatten the plot.
      for (size_t i = c[0].size() / 10; i < c[0].size(); ++i) ymax = std::max(ymax, c[3][i]);
    }
    if (!(ymax > 0)) ymax = 1;
    const Axis ax{0, tmax > 0 ? tmax : 1, 0, ymax * 1.1, 80, b * H + 40, W - 260, H - 70};
    axes_svg(os, ax, titles[b], std::string("|error| (") + units[b] + ")");
    for (size_t i = 0; i < variants.size(); ++i) {
      const auto& c = curves[variants[i]];
      const char* col = kPalette[i % 8];
      std::vector<double> xs = c[0], band = c[3];
      xs.insert(xs.end(), c[0].rbegin(), c[0].rend());
      band.insert(band.end(), c[1].rbegin(), c[1].rend());
      os << "<polygon points='" << polyline(ax, xs, band) << "' fill='" << col
         << "' fill-opacity='0.18' stroke='none'/>\n";
      os << "<polyline points='" << polyline(ax, c[0], c[2]) << "' fill='none' stroke='" << col
         << "' stroke-width='1.2'/>\n";
      if (b == 0)
        os << "<text x='" << W - 170 << "' y='" << 60 + 16 * i << "' font-size='12' fill='" << col << "'>"
           << variants[i] << "</text>\n";
    }
  }
  os << "</svg>\n";
  return os.str();
}

std::string anees_plot_svg(const AggregateReport& r) {
  std::vector<std::string> variants;
  std::map<std::string, std::array<std::vector<double>, 2>> curves;
  double tmax = 0, ymax = 1;
  for (const auto& a : r.anees) {
    if (std::find(variants.begin(), variants.end(), a.variant) == variants.end()) variants.push_back(a.variant);
    curves[a.variant][0].push_back(a.t);
    curves[a.variant][1].push_back(a.anees);
    tmax = std::max(tmax, a.t);
    if (a.t > 1) ymax = std::max(ymax, a.anees);
  }
  ymax = std::min(ymax * 1.1, 20.0);
  const double W = 900, H = 360;
  std::ostringstream os;
  os << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H
     << "' font-family='sans-serif'>\n<rect width='100%' height='100%' fill='white'/>\n";
  const Axis ax{0, tmax > 0 ? tmax : 1, 0, ymax, 80, 40, W - 260, H - 80};
  axes_svg(os, ax, "ANEES", "ANEES");
  os << "<line x1='" << ax.px(0) << "' y1='" << ax.py(1) << "' x2='" << ax.px(ax.x1) << "' y2='" << ax.py(1)
     << "' stroke='#000' stroke-dasharray='6,4'/>\n";
  if (!r.anees.empty()) {
    const auto& a = r.anees.front();
    for (double y : {a.band_lo, a.band_hi})
      os << "<line x1='" << ax.px(0) << "' y1='" << ax.py(y) << "' x2='" << ax.px(ax.x1) << "' y2='" << ax.py(y)
         << "' stroke='#999' stroke-dasharray='2,3'/>\n";
  }
  for (size_t i = 0; i < variants.size(); ++i) {
    const char* col = kPalette[i % 8];
    os << "<polyline points='" << polyline(ax, curves[variants[i]][0], curves[variants[i]][1])
       << "' fill='none' stroke='" << col << "' stroke-width='1.2'/>\n";
    os << "<text x='" << W - 170 << "' y='" << 60 + 16 * i << "' font-size='12' fill='" << col << "'>"
       << variants[i] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace gekf::bench
