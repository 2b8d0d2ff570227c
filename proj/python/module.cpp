#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gekf/bench.hpp"
#include "gekf/check.hpp"
#include "gekf/config.hpp"
#include "gekf/gaussian.hpp"

namespace py = pybind11;
using namespace gekf;

namespace {

Trivialization parse_trivialization(const std::string& s) {
  if (s == "left") return Trivialization::left;
  if (s == "right") return Trivialization::right;
  throw ConfigError("trivialization must be 'left' or 'right'");
}

py::dict summary_dict(const bench::SummaryRow& r) {
  py::dict d;
  d["variant"] = r.variant;
  d["phase"] = r.phase;
  d["rmse_rot_deg"] = r.rmse_rot_deg;
  d["rmse_pos_m"] = r.rmse_pos_m;
  d["rmse_vel_mps"] = r.rmse_vel_mps;
  d["pct_vs_baseline"] = r.pct_vs_baseline;
  return d;
}

py::dict diagnostics_dict(const bench::DiagnosticsRow& r) {
  py::dict d;
  d["variant"] = r.variant;
  d["runs_used"] = r.runs_used;
  d["diverged"] = r.diverged;
  d["updates"] = r.updates;
  d["single_iteration_fraction"] = r.single_iteration_fraction;
  d["mean_anees_transient"] = r.mean_anees_transient;
  d["mean_anees_asymptotic"] = r.mean_anees_asymptotic;
  d["spd_repairs"] = r.spd_repairs;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Geometric extended Kalman filtering on manifolds";
  m.attr("__version__") = GEKF_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<BranchError>(m, "BranchError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);

  py::class_<Geometry, std::shared_ptr<Geometry>>(m, "Geometry")
      .def_property_readonly("name", &Geometry::name)
      .def_property_readonly("dim", &Geometry::dim)
      .def("identity", &Geometry::identity)
      .def("exp", &Geometry::exp, py::arg("base"), py::arg("v"))
      .def("log", &Geometry::log, py::arg("base"), py::arg("target"))
      .def("transport", &Geometry::transport, py::arg("base"), py::arg("v"))
      .def("curvature", &Geometry::curvature, py::arg("base"), py::arg("x"), py::arg("y"), py::arg("z"));

  m.def(
      "make_geometry",
      [](const std::string& name, const std::string& conv) {
        return std::const_pointer_cast<Geometry>(make_geometry<double>(name, parse_trivialization(conv)));
      },
      py::arg("name"), py::arg("trivialization") = "left", "R<n>, SO3, SE3 or SE23");

  m.def(
      "jacobians",
      [](const Geometry& g, const Matrix& from, const Matrix& to, const std::string& mode) {
        const auto jm = parse_jacobian_mode(mode);
        return py::make_tuple(jacobian_tangential(g, from, to, jm).map, jacobian_positional(g, from, to, jm).map);
      },
      py::arg("geometry"), py::arg("from_point"), py::arg("to_point"), py::arg("mode") = "closed_form",
      "Tangential and positional pushforwards (J2, J1) of the exponential map between two points.");

  m.def(
      "reexpress",
      [](const Geometry& g, const Matrix& ref, const Vector& mean, const Matrix& cov, const Matrix& new_ref) {
        const auto out = reexpress(g, make_concentrated(g, ref, mean, cov), new_ref);
        return py::make_tuple(out.mean, out.cov);
      },
      py::arg("geometry"), py::arg("ref"), py::arg("mean"), py::arg("cov"), py::arg("new_ref"));

  m.def(
      "order_check",
      [](const std::string& geometry, const std::vector<std::string>& modes) {
        std::vector<JacobianMode> jm;
        for (const auto& s : modes) jm.push_back(parse_jacobian_mode(s));
        py::list out;
        for (const auto& r : order_check(geometry, jm)) {
          py::dict d;
          d["geometry"] = r.geometry;
          d["kind"] = r.kind == PushforwardKind::tangential ? "tangential" : "positional";
          d["mode"] = to_string(r.mode);
          d["slope"] = r.slope;
          d["max_error"] = r.max_error;
          d["pass"] = r.pass;
          out.append(d);
        }
        return out;
      },
      py::arg("geometry"), py::arg("modes") = std::vector<std::string>{"pt_curvature", "pt_only"});

  m.def("variant_names", &variant_names);
  m.def("anees_band", &bench::anees_band, py::arg("n"), py::arg("runs"), py::arg("confidence") = 0.95);

  m.def("parse_config", [](const std::string& text) { return to_json(parse_config(text)); }, py::arg("text"),
        "Validates a JSON config and returns its canonical form.");
  m.def("default_config", [] { return to_json(CliConfig{}); });

  m.def(
      "monte_carlo",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json);
        bench::AggregateReport r;
        {
          py::gil_scoped_release release;
          r = bench::monte_carlo(cfg.bench);
        }
        py::list summary, diag;
        for (const auto& row : r.summary) summary.append(summary_dict(row));
        for (const auto& row : r.diagnostics) diag.append(diagnostics_dict(row));
        py::dict out;
        out["runs"] = r.runs;
        out["summary"] = summary;
        out["diagnostics"] = diag;
        out["table"] = bench::format_table(r);
        return out;
      },
      py::arg("config_json") = "{}");

  m.def(
      "simulate",
      [](const std::string& config_json) {
        const auto cfg = parse_config(config_json);
        const auto run = ins::simulate_run(cfg.bench.trajectory, bench::run_seed(cfg.bench.seed, 0));
        const long n = static_cast<long>(run.truth.size());
        Matrix pos(n, 3), omega(n, 3), accel(n, 3);
        Vector t(n);
        for (long k = 0; k < n; ++k) {
          pos.row(k) = run.truth[k].block(0, 4, 3, 1).transpose();
          omega.row(k) = run.imu[k].omega.transpose();
          accel.row(k) = run.imu[k].accel.transpose();
          t(k) = run.imu[k].t;
        }
        py::dict out;
        out["t"] = t;
        out["position"] = pos;
        out["omega"] = omega;
        out["accel"] = accel;
        out["measurements"] = static_cast<long>(run.meas.size());
        return out;
      },
      py::arg("config_json") = "{}");
}
