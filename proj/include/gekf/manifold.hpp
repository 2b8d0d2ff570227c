#pragma once
// Partial pushforwards of the exponential map, the log differential, and the
// numerical oracles (finite differences, transport and Jacobi ODEs) that
// validate them.

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "gekf/geometry.hpp"

namespace gekf {

enum class JacobianMode { closed_form, pt_curvature, pt_only, finite_diff };

std::string to_string(JacobianMode mode);
JacobianMode parse_jacobian_mode(const std::string& name);

inline constexpr double kDefaultFdStep = 1e-5;

template <class S>
struct Jacobian {
  typename BasicGeometry<S>::Matrix map;
  JacobianMode mode;       // mode actually used
  bool fell_back = false;  // closed form unavailable, pt_curvature used instead
};

template <class S>
struct ExpResult {
  typename BasicGeometry<S>::Matrix point;
  bool beyond_injectivity = false;
};

/// exp with the injectivity warning flag.
template <class S>
ExpResult<S> exp_checked(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& base,
                         const typename BasicGeometry<S>::Vector& v) {
  return {g.exp(base, v), !g.within_injectivity(v)};
}

template <class S>
typename BasicGeometry<S>::Vector parallel_transport(const BasicGeometry<S>& g,
                                                     const typename BasicGeometry<S>::Matrix& base,
                                                     const typename BasicGeometry<S>::Vector& v,
                                                     const typename BasicGeometry<S>::Vector& w) {
  g.check_tangent(w, "parallel_transport");
  return g.transport(base, v) * w;
}

/// Central-difference estimates (J₁, J₂) of the exponential's pushforwards at v = log(from, to).
/// J₁ moves the base along geodesics and carries v by parallel transport.
template <class S>
std::pair<typename BasicGeometry<S>::Matrix, typename BasicGeometry<S>::Matrix> fd_exp_jacobians_at(
    const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
    const typename BasicGeometry<S>::Vector& v, const S& h) {
  using Matrix = typename BasicGeometry<S>::Matrix;
  using Vector = typename BasicGeometry<S>::Vector;
  const int m = g.dim();
  const Matrix to = g.exp(from, v);
  Matrix J1(m, m), J2(m, m);
  for (int i = 0; i < m; ++i) {
    const Vector e = Vector::Unit(m, i);
    const Vector plus2 = g.log(to, g.exp(from, Vector(v + h * e)));
    const Vector minus2 = g.log(to, g.exp(from, Vector(v - h * e)));
    J2.col(i) = (plus2 - minus2) / (2 * h);

    auto moved = [&](const S& s) {
      const Vector step = s * e;
      const Matrix x = g.exp(from, step);
      const Vector vs = g.transport(from, step) * v;
      return g.log(to, g.exp(x, vs));
    };
    J1.col(i) = (moved(h) - moved(-h)) / (2 * h);
  }
  return {J1, J2};
}

template <class S>
std::pair<typename BasicGeometry<S>::Matrix, typename BasicGeometry<S>::Matrix> fd_exp_jacobians(
    const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
    const typename BasicGeometry<S>::Matrix& to, const S& h = S(kDefaultFdStep)) {
  if (!(h >= S(1e-7) && h <= S(1e-3))) throw DimensionError("fd_exp_jacobians: step h must lie in [1e-7, 1e-3]");
  return fd_exp_jacobians_at(g, from, g.log(from, to), h);
}

/// J₂ = jt_from(to) at v = log(from, to).
template <class S>
Jacobian<S> jacobian_tangential_at(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
                                   const typename BasicGeometry<S>::Vector& v,
                                   JacobianMode mode = JacobianMode::closed_form, const S& h = S(kDefaultFdStep)) {
  using Matrix = typename BasicGeometry<S>::Matrix;
  const int m = g.dim();
  bool fell_back = false;
  if (mode == JacobianMode::closed_form) {
    if (auto J = g.tangential_closed_form(from, v)) return {*J, mode, false};
    mode = JacobianMode::pt_curvature;
    fell_back = true;
  }
  switch (mode) {
    case JacobianMode::pt_curvature: {
      const Matrix I = Matrix::Identity(m, m);
      return {g.transport(from, v) * (I + g.curvature_operator(from, v) / S(6)), mode, fell_back};
    }
    case JacobianMode::pt_only:
      return {g.transport(from, v), mode, false};
    case JacobianMode::finite_diff:
      return {fd_exp_jacobians_at(g, from, v, h).second, mode, false};
    default:
      break;
  }
  throw UnsupportedError("jacobian_tangential: unsupported mode");
}

template <class S>
Jacobian<S> jacobian_tangential(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
                                const typename BasicGeometry<S>::Matrix& to,
                                JacobianMode mode = JacobianMode::closed_form, const S& h = S(kDefaultFdStep)) {
  return jacobian_tangential_at(g, from, g.log(from, to), mode, h);
}

template <class S>
Jacobian<S> jacobian_tangential_inverse_at(const BasicGeometry<S>& g,
                                           const typename BasicGeometry<S>::Matrix& from,
                                           const typename BasicGeometry<S>::Vector& v,
                                           JacobianMode mode = JacobianMode::closed_form,
                                           const S& h = S(kDefaultFdStep)) {
  using std::abs;
  if (mode == JacobianMode::closed_form) {
    if (auto J = g.tangential_inverse_closed_form(from, v)) return {*J, mode, false};
  }
  Jacobian<S> J = jacobian_tangential_at(g, from, v, mode, h);
  Eigen::FullPivLU<typename BasicGeometry<S>::Matrix> lu(J.map);
  if (!lu.isInvertible() || abs(lu.rcond()) < S(1e-12))
    throw NumericalError("jacobian_tangential_inverse: tangential Jacobian is singular");
  J.map = lu.inverse();
  return J;
}

template <class S>
Jacobian<S> jacobian_tangential_inverse(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
                                        const typename BasicGeometry<S>::Matrix& to,
                                        JacobianMode mode = JacobianMode::closed_form,
                                        const S& h = S(kDefaultFdStep)) {
  return jacobian_tangential_inverse_at(g, from, g.log(from, to), mode, h);
}

/// J₁ = jp_from(to) at v = log(from, to). The curvature form is PT(w + ½R(v,w)v).
template <class S>
Jacobian<S> jacobian_positional_at(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
                                   const typename BasicGeometry<S>::Vector& v,
                                   JacobianMode mode = JacobianMode::closed_form, const S& h = S(kDefaultFdStep)) {
  using Matrix = typename BasicGeometry<S>::Matrix;
  const int m = g.dim();
  bool fell_back = false;
  if (mode == JacobianMode::closed_form) {
    if (auto J = g.positional_closed_form(from, v)) return {*J, mode, false};
    mode = JacobianMode::pt_curvature;
    fell_back = true;
  }
  switch (mode) {
    case JacobianMode::pt_curvature: {
      const Matrix I = Matrix::Identity(m, m);
      return {g.transport(from, v) * (I + g.curvature_operator(from, v) / S(2)), mode, fell_back};
    }
    case JacobianMode::pt_only:
      return {g.transport(from, v), mode, false};
    case JacobianMode::finite_diff:
      return {fd_exp_jacobians_at(g, from, v, h).first, mode, false};
    default:
      break;
  }
  throw UnsupportedError("jacobian_positional: unsupported mode");
}

template <class S>
Jacobian<S> jacobian_positional(const BasicGeometry<S>& g, const typename BasicGeometry<S>::Matrix& from,
                                const typename BasicGeometry<S>::Matrix& to,
                                JacobianMode mode = JacobianMode::closed_form, const S& h = S(kDefaultFdStep)) {
  return jacobian_positional_at(g, from, g.log(from, to), mode, h);
}

/// D_ξ ϑ_ξ(ζ) = −J₂⁻¹ J₁ at ξ = base, ζ = target.
template <class S>
typename BasicGeometry<S>::Matrix dlog_positional(const BasicGeometry<S>& g,
                                                  const typename BasicGeometry<S>::Matrix& base,
                                                  const typename BasicGeometry<S>::Matrix& target,
                                                  JacobianMode mode = JacobianMode::closed_form) {
  const auto v = g.log(base, target);
  return -jacobian_tangential_inverse_at(g, base, v, mode).map * jacobian_positional_at(g, base, v, mode).map;
}

/// Covariant central difference of ξ ↦ log(ξ, target) at base: the log at a moved base is
/// transported back to base along the connecting geodesic before differencing.
template <class S>
typename BasicGeometry<S>::Matrix fd_dlog_positional(const BasicGeometry<S>& g,
                                                     const typename BasicGeometry<S>::Matrix& base,
                                                     const typename BasicGeometry<S>::Matrix& target,
                                                     const S& h = S(kDefaultFdStep)) {
  using Matrix = typename BasicGeometry<S>::Matrix;
  using Vector = typename BasicGeometry<S>::Vector;
  const int m = g.dim();
  Matrix D(m, m);
  for (int i = 0; i < m; ++i) {
    auto pulled = [&](const S& s) {
      const Matrix x = g.exp(base, Vector(s * Vector::Unit(m, i)));
      const Vector back = g.log(x, base);
      return Vector(g.transport(x, back) * g.log(x, target));
    };
    D.col(i) = (pulled(h) - pulled(-h)) / (2 * h);
  }
  return D;
}

namespace detail {

template <class S, class F>
typename BasicGeometry<S>::Vector rk4(F&& f, typename BasicGeometry<S>::Vector y, const S& t1, int steps) {
  const S dt = t1 / S(steps);
  for (int k = 0; k < steps; ++k) {
    const auto k1 = f(y);
    const auto k2 = f(y + dt / 2 * k1);
    const auto k3 = f(y + dt / 2 * k2);
    const auto k4 = f(y + dt * k3);
    y += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return y;
}

}  // namespace detail

/// RK4 integration of the trivialized transport ODE ẇ = G w along exp(base, t v), t ∈ [0, 1].
template <class S>
typename BasicGeometry<S>::Vector pt_ode_oracle(const BasicGeometry<S>& g,
                                                const typename BasicGeometry<S>::Matrix& base,
                                                const typename BasicGeometry<S>::Vector& v,
                                                const typename BasicGeometry<S>::Vector& w, int steps) {
  using Vector = typename BasicGeometry<S>::Vector;
  if (steps < 1) throw DimensionError("pt_ode_oracle: steps must be positive");
  g.check_tangent(w, "pt_ode_oracle");
  const auto G = g.connection_generator(base, v);
  return detail::rk4<S>([&](const Vector& y) { return Vector(G * y); }, w, S(1), steps);
}

/// RK4 integration of the Jacobi equation D²J = R(γ̇, J)γ̇ along exp(base, t v) up to t.
/// In trivialized coordinates D_t j = ẏ − G j, giving ẏ = k + G j and k̇ = G k + R(v, j)v.
/// With J(0) = 0, DJ(0) = w the result at t = 1 is J₂ w; with J(0) = w, DJ(0) = 0 it is J₁ w.
template <class S>
typename BasicGeometry<S>::Vector jacobi_field_oracle(const BasicGeometry<S>& g,
                                                      const typename BasicGeometry<S>::Matrix& base,
                                                      const typename BasicGeometry<S>::Vector& v,
                                                      const typename BasicGeometry<S>::Vector& j0,
                                                      const typename BasicGeometry<S>::Vector& dj0, int steps,
                                                      const S& t = S(1)) {
  using Vector = typename BasicGeometry<S>::Vector;
  const int m = g.dim();
  g.check_tangent(j0, "jacobi_field_oracle");
  g.check_tangent(dj0, "jacobi_field_oracle");
  const auto G = g.connection_generator(base, v);
  const auto Rv = g.curvature_operator(base, v);
  Vector y(2 * m);
  y << j0, dj0;
  auto f = [&](const Vector& s) {
    Vector out(2 * m);
    out.head(m) = s.tail(m) + G * s.head(m);
    out.tail(m) = G * s.tail(m) + Rv * s.head(m);
    return out;
  };
  return detail::rk4<S>(f, y, t, steps).head(m);
}

enum class PushforwardKind { tangential, positional };

template <class S>
struct OrderFitRow {
  S radius;
  S error;
};

template <class S>
struct OrderFit {
  std::vector<OrderFitRow<S>> rows;
  double slope = 0;      // least-squares log-log slope; +inf when every error is zero
  double max_error = 0;
  bool exact = false;    // all errors zero (flat geometry)
};

/// Fits the log-log slope of ‖J_mode − J_fd‖_F against |v| for v = s·direction.
template <class S>
OrderFit<S> order_fit(const BasicGeometry<S>& g, PushforwardKind kind, JacobianMode mode,
                      const typename BasicGeometry<S>::Vector& direction, const std::vector<S>& radii, const S& h,
                      const typename BasicGeometry<S>::Matrix& base) {
  using std::log;
  OrderFit<S> fit;
  const auto dir = direction.normalized();
  for (const S& s : radii) {
    const auto v = (s * dir).eval();
    const auto fd = fd_exp_jacobians_at(g, base, v, h);
    const auto J = kind == PushforwardKind::tangential ? jacobian_tangential_at(g, base, v, mode, h).map
                                                       : jacobian_positional_at(g, base, v, mode, h).map;
    const auto& ref = kind == PushforwardKind::tangential ? fd.second : fd.first;
    fit.rows.push_back({s, (J - ref).norm()});
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : fit.rows) {
    fit.max_error = std::max(fit.max_error, static_cast<double>(r.error));
    if (!(r.error > S(0))) continue;
    const double x = static_cast<double>(log(r.radius)), y = static_cast<double>(log(r.error));
    sx += x, sy += y, sxx += x * x, sxy += x * y, ++n;
  }
  if (n < 2) {
    fit.exact = fit.max_error == 0;
    fit.slope = std::numeric_limits<double>::infinity();
  } else {
    fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  }
  return fit;
}

/// n log-spaced radii over [lo, hi].
template <class S>
std::vector<S> log_spaced(const S& lo, const S& hi, int n) {
  using std::exp;
  using std::log;
  std::vector<S> out;
  for (int i = 0; i < n; ++i) out.push_back(exp(log(lo) + (log(hi) - log(lo)) * S(i) / S(n - 1)));
  return out;
}

}  // namespace gekf
