#pragma once
// Closed forms for SO(3), SE(3) and SE₂(3), templated on the scalar type so the
// same code runs in double and in quad precision.
//
// All three groups are SE_K(3): a rotation plus K translation-like columns.
// Tangent coordinates are ordered (rotation, column 1, ..., column K), i.e.
// (rot, trans) for SE(3) and (rot, vel, pos) for SE₂(3).

#include <Eigen/Core>
#include <Eigen/LU>

#include <boost/math/constants/constants.hpp>

#include <cmath>
#include <limits>

#include "gekf/error.hpp"

namespace gekf::lie {

template <class S>
using Vec3 = Eigen::Matrix<S, 3, 1>;
template <class S>
using Mat3 = Eigen::Matrix<S, 3, 3>;

template <class S>
S pi() {
  return boost::math::constants::pi<S>();
}

/// Below this angle the trigonometric coefficients are summed as power series.
inline constexpr double kSeriesAngle = 1.0;
/// Logarithms closer than this to a half turn are rejected.
inline constexpr double kBranchMargin = 1e-6;

namespace detail {

// Sum over k of (-θ²)^k weight(k) / (2k + offset)!, to machine precision.
template <class S, class Weight>
S alternating_series(const S& theta2, int offset, Weight weight) {
  using std::abs;
  S fact = 1;
  for (int j = 2; j <= offset; ++j) fact *= S(j);
  S power = 1;
  S sum = weight(0) / fact;
  for (int k = 1; k < 80; ++k) {
    fact *= S(2 * k + offset - 1) * S(2 * k + offset);
    power *= -theta2;
    const S term = power * S(weight(k)) / fact;
    sum += term;
    if (abs(term) <= std::numeric_limits<S>::epsilon() * abs(sum)) break;
  }
  return sum;
}

}  // namespace detail

/// Scalar coefficients of the SO(3) closed forms at angle θ.
template <class S>
struct RotationCoefficients {
  S a;  // sin θ / θ
  S b;  // (1 − cos θ) / θ²
  S c;  // (θ − sin θ) / θ³
  S e;  // (θ² + 2 cos θ − 2) / (2θ⁴)
  S f;  // (2θ − 3 sin θ + θ cos θ) / (2θ⁵)

  explicit RotationCoefficients(const S& theta) {
    using std::cos;
    using std::sin;
    const S t2 = theta * theta;
    if (theta < S(kSeriesAngle)) {
      const auto one = [](int) { return 1; };
      a = detail::alternating_series<S>(t2, 1, one);
      b = detail::alternating_series<S>(t2, 2, one);
      c = detail::alternating_series<S>(t2, 3, one);
      e = detail::alternating_series<S>(t2, 4, one);
      f = detail::alternating_series<S>(t2, 5, [](int k) { return k + 1; });
    } else {
      const S s = sin(theta), co = cos(theta), h = sin(theta / 2);
      a = s / theta;
      b = 2 * h * h / t2;
      c = (theta - s) / (t2 * theta);
      e = (t2 + 2 * co - 2) / (2 * t2 * t2);
      f = (2 * theta - 3 * s + theta * co) / (2 * t2 * t2 * theta);
    }
  }
};

template <class S>
Mat3<S> hat3(const Vec3<S>& w) {
  Mat3<S> m;
  m << S(0), -w.z(), w.y(), w.z(), S(0), -w.x(), -w.y(), w.x(), S(0);
  return m;
}

template <class S>
Vec3<S> vee3(const Mat3<S>& m) {
  return Vec3<S>(m(2, 1), m(0, 2), m(1, 0));
}

template <class S>
Mat3<S> so3_exp(const Vec3<S>& phi) {
  const RotationCoefficients<S> k(phi.norm());
  const Mat3<S> P = hat3(phi);
  return Mat3<S>::Identity() + k.a * P + k.b * P * P;
}

/// Principal logarithm. Throws BranchError within kBranchMargin of a half turn.
template <class S>
Vec3<S> so3_log(const Mat3<S>& R) {
  using std::atan2;
  using std::sqrt;
  const S c = (R.trace() - 1) / 2;
  const Vec3<S> w(R(2, 1) - R(1, 2), R(0, 2) - R(2, 0), R(1, 0) - R(0, 1));
  const Vec3<S> half = w / 2;
  const S theta = atan2(half.norm(), c);
  if (theta >= pi<S>() - S(kBranchMargin))
    throw BranchError("so3_log: rotation angle at the cut locus (non-unique logarithm)");
  if (c > S(-0.5)) return half / RotationCoefficients<S>(theta).a;

  // Near a half turn the antisymmetric part is small; recover the axis from the symmetric part.
  const Mat3<S> sym = (R + R.transpose()) / 2 - c * Mat3<S>::Identity();
  int i = 0;
  sym.diagonal().maxCoeff(&i);
  Vec3<S> axis = sym.col(i) / sqrt(sym(i, i) * (1 - c));
  if (axis.dot(w) < 0) axis = -axis;
  return theta * axis.normalized();
}

template <class S>
Mat3<S> so3_left_jacobian(const Vec3<S>& phi) {
  const RotationCoefficients<S> k(phi.norm());
  const Mat3<S> P = hat3(phi);
  return Mat3<S>::Identity() + k.b * P + k.c * P * P;
}

/// Inverse left Jacobian. Throws NumericalError near |φ| = 2π.
template <class S>
Mat3<S> so3_left_jacobian_inv(const Vec3<S>& phi) {
  using std::abs;
  using std::sin;
  const S theta = phi.norm();
  const Mat3<S> P = hat3(phi);
  S d;
  if (theta < S(kSeriesAngle)) {
    const RotationCoefficients<S> k(theta);
    d = (k.b / 2 - k.c) / k.a;
  } else {
    const S h = sin(theta / 2);
    if (abs(h) < S(1e-8)) throw NumericalError("so3_left_jacobian_inv: singular at |v| = 2π");
    d = (1 - theta * sin(theta) / (4 * h * h)) / (theta * theta);
  }
  return Mat3<S>::Identity() - P / 2 + d * P * P;
}

/// Coupling block Q(φ, ρ) of the SE(3) left Jacobian.
template <class S>
Mat3<S> se3_coupling(const Vec3<S>& phi, const Vec3<S>& rho) {
  const RotationCoefficients<S> k(phi.norm());
  const Mat3<S> P = hat3(phi), T = hat3(rho);
  const Mat3<S> PT = P * T, TP = T * P, PTP = PT * P, PP = P * P;
  return T / 2 + k.c * (PT + TP + PTP) + k.e * (PP * T + TP * P - 3 * PTP) +
         k.f * (PTP * P + P * PTP);
}

/// SE_K(3). K = 0 is SO(3), K = 1 is SE(3), K = 2 is SE₂(3).
template <class S, int K>
struct SEK3 {
  static constexpr int kDim = 3 + 3 * K;
  static constexpr int kMat = 3 + K;
  using Scalar = S;
  using Tangent = Eigen::Matrix<S, kDim, 1>;
  using Element = Eigen::Matrix<S, kMat, kMat>;
  using Operator = Eigen::Matrix<S, kDim, kDim>;

  static Element identity() { return Element::Identity(); }

  static Element hat(const Tangent& x) {
    Element X = Element::Zero();
    X.template topLeftCorner<3, 3>() = hat3<S>(x.template head<3>());
    for (int i = 0; i < K; ++i) X.template block<3, 1>(0, 3 + i) = x.template segment<3>(3 + 3 * i);
    return X;
  }

  static Tangent vee(const Element& X) {
    Tangent x;
    x.template head<3>() = vee3<S>(X.template topLeftCorner<3, 3>());
    for (int i = 0; i < K; ++i) x.template segment<3>(3 + 3 * i) = X.template block<3, 1>(0, 3 + i);
    return x;
  }

  static Element exp(const Tangent& x) {
    const Vec3<S> phi = x.template head<3>();
    Element g = Element::Identity();
    g.template topLeftCorner<3, 3>() = so3_exp(phi);
    if constexpr (K > 0) {
      const Mat3<S> J = so3_left_jacobian(phi);
      for (int i = 0; i < K; ++i) g.template block<3, 1>(0, 3 + i) = J * x.template segment<3>(3 + 3 * i);
    }
    return g;
  }

  static Tangent log(const Element& g) {
    Tangent x;
    const Vec3<S> phi = so3_log<S>(g.template topLeftCorner<3, 3>());
    x.template head<3>() = phi;
    if constexpr (K > 0) {
      const Mat3<S> Jinv = so3_left_jacobian_inv(phi);
      for (int i = 0; i < K; ++i) x.template segment<3>(3 + 3 * i) = Jinv * g.template block<3, 1>(0, 3 + i);
    }
    return x;
  }

  static Element inverse(const Element& g) {
    Element inv = Element::Identity();
    const Mat3<S> Rt = g.template topLeftCorner<3, 3>().transpose();
    inv.template topLeftCorner<3, 3>() = Rt;
    for (int i = 0; i < K; ++i) inv.template block<3, 1>(0, 3 + i) = -Rt * g.template block<3, 1>(0, 3 + i);
    return inv;
  }

  /// Ad_g, with exp(Ad_g x) = g exp(x) g⁻¹.
  static Operator adjoint(const Element& g) {
    Operator A = Operator::Zero();
    const Mat3<S> R = g.template topLeftCorner<3, 3>();
    for (int i = 0; i <= K; ++i) A.template block<3, 3>(3 * i, 3 * i) = R;
    for (int i = 0; i < K; ++i)
      A.template block<3, 3>(3 + 3 * i, 0) = hat3<S>(g.template block<3, 1>(0, 3 + i)) * R;
    return A;
  }

  /// ad_x, with ad_x y = [x, y].
  static Operator ad(const Tangent& x) {
    Operator A = Operator::Zero();
    const Mat3<S> P = hat3<S>(x.template head<3>());
    for (int i = 0; i <= K; ++i) A.template block<3, 3>(3 * i, 3 * i) = P;
    for (int i = 0; i < K; ++i) A.template block<3, 3>(3 + 3 * i, 0) = hat3<S>(x.template segment<3>(3 + 3 * i));
    return A;
  }

  static Tangent bracket(const Tangent& x, const Tangent& y) { return ad(x) * y; }

  /// Σ ad_x^k / (k+1)!.
  static Operator left_jacobian(const Tangent& x) {
    const Vec3<S> phi = x.template head<3>();
    const Mat3<S> J = so3_left_jacobian(phi);
    Operator A = Operator::Zero();
    for (int i = 0; i <= K; ++i) A.template block<3, 3>(3 * i, 3 * i) = J;
    for (int i = 0; i < K; ++i)
      A.template block<3, 3>(3 + 3 * i, 0) = se3_coupling<S>(phi, x.template segment<3>(3 + 3 * i));
    return A;
  }

  static Operator left_jacobian_inv(const Tangent& x) {
    const Vec3<S> phi = x.template head<3>();
    const Mat3<S> Ji = so3_left_jacobian_inv(phi);
    Operator A = Operator::Zero();
    for (int i = 0; i <= K; ++i) A.template block<3, 3>(3 * i, 3 * i) = Ji;
    for (int i = 0; i < K; ++i)
      A.template block<3, 3>(3 + 3 * i, 0) = -Ji * se3_coupling<S>(phi, x.template segment<3>(3 + 3 * i)) * Ji;
    return A;
  }

  /// Restores an orthonormal rotation block and the exact bottom rows.
  static Element project(const Element& g) {
    Element out = Element::Identity();
    Mat3<S> R = g.template topLeftCorner<3, 3>();
    for (int it = 0; it < 3; ++it) R = R * (S(3) * Mat3<S>::Identity() - R.transpose() * R) / S(2);
    out.template topLeftCorner<3, 3>() = R;
    for (int i = 0; i < K; ++i) out.template block<3, 1>(0, 3 + i) = g.template block<3, 1>(0, 3 + i);
    return out;
  }

  /// ‖RᵀR − I‖_F plus the deviation of the bottom rows from their exact pattern.
  static S structure_error(const Element& g) {
    const Mat3<S> R = g.template topLeftCorner<3, 3>();
    S err = (R.transpose() * R - Mat3<S>::Identity()).norm();
    if constexpr (K > 0)
      err += (g.template bottomRows<K>() - Element::Identity().template bottomRows<K>()).norm();
    if (R.determinant() <= 0) err += 1;
    return err;
  }
};

template <class S>
using SO3 = SEK3<S, 0>;
template <class S>
using SE3 = SEK3<S, 1>;
template <class S>
using SE23 = SEK3<S, 2>;

}  // namespace gekf::lie
