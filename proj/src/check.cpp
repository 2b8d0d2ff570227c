#include "gekf/check.hpp"

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <cmath>
#include <cstdio>
#include <limits>

namespace gekf {

namespace {

using quad = boost::multiprecision::float128;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::pair<double, double> slope_bounds(JacobianMode mode) {
  switch (mode) {
    case JacobianMode::pt_curvature:
      return {3.5, kInf};
    case JacobianMode::pt_only:
      return {1.8, 2.5};
    default:
      return {-kInf, kInf};
  }
}

}  // namespace

std::vector<OrderCheckRow> order_check(const std::string& geometry, const std::vector<JacobianMode>& modes,
                                       int radii) {
  const auto g = make_geometry<quad>(geometry);
  const auto rs = log_spaced<quad>(quad(1e-3), quad(1e-1), radii);
  BasicGeometry<quad>::Vector dir(g->dim());
  for (int i = 0; i < g->dim(); ++i) dir(i) = quad(0.3 + 0.11 * i) * ((i % 2) ? -1 : 1);
  const auto base = g->exp(g->identity(), BasicGeometry<quad>::Vector(dir * quad(0.5)));

  std::vector<OrderCheckRow> rows;
  for (auto mode : modes)
    for (auto kind : {PushforwardKind::tangential, PushforwardKind::positional}) {
      const auto fit = order_fit<quad>(*g, kind, mode, dir, rs, quad(1e-7), base);
      OrderCheckRow r;
      r.geometry = g->name();
      r.kind = kind;
      r.mode = mode;
      r.slope = fit.slope;
      r.max_error = fit.max_error;
      std::tie(r.slope_min, r.slope_max) = slope_bounds(mode);
      if (fit.exact)
        r.pass = true;
      else if (mode == JacobianMode::pt_curvature || mode == JacobianMode::pt_only)
        r.pass = fit.slope >= r.slope_min && fit.slope <= r.slope_max;
      else
        r.pass = fit.max_error <= 1e-8;
      rows.push_back(r);
    }
  return rows;
}

std::string format_order_check(const std::vector<OrderCheckRow>& rows) {
  std::string out = "geometry  pushforward  mode          slope     max_error   required      result\n";
  char buf[256];
  for (const auto& r : rows) {
    char req[32], slope[32];
    if (std::isinf(r.slope))
      std::snprintf(slope, sizeof slope, "exact");
    else
      std::snprintf(slope, sizeof slope, "%.3f", r.slope);
    if (std::isinf(r.slope_min) && std::isinf(r.slope_max))
      std::snprintf(req, sizeof req, "err<=1e-8");
    else if (std::isinf(r.slope_max))
      std::snprintf(req, sizeof req, ">=%.1f", r.slope_min);
    else
      std::snprintf(req, sizeof req, "[%.1f,%.1f]", r.slope_min, r.slope_max);
    std::snprintf(buf, sizeof buf, "%-9s %-12s %-13s %-9s %-11.3e %-13s %s\n", r.geometry.c_str(),
                  r.kind == PushforwardKind::tangential ? "tangential" : "positional", to_string(r.mode).c_str(),
                  slope, r.max_error, req,
                  r.pass ? "PASS" : "FAIL");
    out += buf;
  }
  return out;
}

}  // namespace gekf
