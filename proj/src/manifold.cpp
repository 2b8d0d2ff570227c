#include "gekf/manifold.hpp"

namespace gekf {

std::string to_string(JacobianMode mode) {
  switch (mode) {
    case JacobianMode::closed_form:
      return "closed_form";
    case JacobianMode::pt_curvature:
      return "pt_curvature";
    case JacobianMode::pt_only:
      return "pt_only";
    case JacobianMode::finite_diff:
      return "finite_diff";
  }
  return "unknown";
}

JacobianMode parse_jacobian_mode(const std::string& name) {
  for (auto m : {JacobianMode::closed_form, JacobianMode::pt_curvature, JacobianMode::pt_only,
                 JacobianMode::finite_diff})
    if (to_string(m) == name) return m;
  throw ConfigError("unknown jacobian mode '" + name +
                    "' (expected closed_form, pt_curvature, pt_only or finite_diff)");
}

}  // namespace gekf
