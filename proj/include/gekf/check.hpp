#pragma once
// Order-fit diagnostics for the approximate exponential-map Jacobians.

#include <string>
#include <vector>

#include "gekf/manifold.hpp"

namespace gekf {

struct OrderCheckRow {
  std::string geometry;
  PushforwardKind kind = PushforwardKind::tangential;
  JacobianMode mode = JacobianMode::pt_curvature;
  double slope = 0;  // +inf for exact (flat) geometries
  double max_error = 0;
  double slope_min = 0;
  double slope_max = 0;  // +inf when unbounded
  bool pass = false;
};

/// Thresholds: pt_curvature slope >= 3.5, pt_only slope in [1.8, 2.5]. closed_form and
/// finite_diff are reported against max error <= 1e-8. Runs in quad precision with
/// |v| in [1e-3, 1e-1] and finite-difference step 1e-7.
std::vector<OrderCheckRow> order_check(const std::string& geometry, const std::vector<JacobianMode>& modes,
                                       int radii = 7);

std::string format_order_check(const std::vector<OrderCheckRow>& rows);

}  // namespace gekf
