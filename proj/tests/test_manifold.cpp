#include <gtest/gtest.h>

#include <boost/multiprecision/eigen.hpp>
#include <boost/multiprecision/float128.hpp>

#include <random>

#include "gekf/manifold.hpp"
#include "oracles.hpp"

using namespace gekf;
using quad = boost::multiprecision::float128;

namespace {

const std::vector<std::string> kGeometries = {"R4", "SO3", "SE3", "SE23"};

Matrix random_point(const Geometry& g, std::mt19937_64& rng, double radius = 2.0) {
  return g.exp(g.identity(), oracle::random_tangent(rng, g.dim(), radius));
}

}  // namespace

TEST(Manifold, BoxplusAxioms) {
  std::mt19937_64 rng(21);
  for (const auto& name : kGeometries)
    for (auto conv : {Trivialization::left, Trivialization::right}) {
      const auto g = make_geometry<double>(name, conv);
      for (int i = 0; i < 200; ++i) {
        const Matrix xi = random_point(*g, rng);
        const Vector u = oracle::random_tangent(rng, g->dim(), 0.5);
        const Matrix zeta = g->exp(xi, oracle::random_tangent(rng, g->dim(), 0.5));
        EXPECT_EQ(g->exp(xi, Vector::Zero(g->dim())), xi);
        EXPECT_LT((g->exp(xi, g->log(xi, zeta)) - zeta).norm(), 1e-9);
        EXPECT_LT((g->log(xi, g->exp(xi, u)) - u).norm(), 1e-9);
        EXPECT_EQ(g->log(xi, xi), Vector::Zero(g->dim()));
      }
    }
}

TEST(Manifold, EuclideanExpIsAddition) {
  const auto g = make_geometry<double>("R3");
  const Vector x = Eigen::Vector3d(1, 2, 3), v = Eigen::Vector3d(-1, 0.5, 2);
  EXPECT_EQ(g->exp(x, v), Matrix(x + v));
  EXPECT_EQ(g->transport(x, v), Matrix(Eigen::Matrix3d::Identity()));
  EXPECT_EQ(g->curvature(x, v, x, v), Vector::Zero(3));
}

TEST(Manifold, ExpBeyondInjectivityIsFlagged) {
  const auto g = make_geometry<double>("SO3");
  EXPECT_FALSE(exp_checked(*g, g->identity(), Vector(Eigen::Vector3d(1, 0, 0))).beyond_injectivity);
  EXPECT_TRUE(exp_checked(*g, g->identity(), Vector(Eigen::Vector3d(4, 0, 0))).beyond_injectivity);
}

TEST(Manifold, DimensionMismatchIsRejected) {
  const auto g = make_geometry<double>("SE3");
  EXPECT_THROW(g->exp(g->identity(), Vector::Zero(5)), DimensionError);
  EXPECT_THROW(g->log(Matrix::Identity(3, 3), g->identity()), DimensionError);
}

TEST(Manifold, CurvatureIsTrilinearAndAntisymmetric) {
  std::mt19937_64 rng(22);
  for (const auto& name : kGeometries) {
    const auto g = make_geometry<double>(name);
    const Matrix b = random_point(*g, rng);
    for (int i = 0; i < 20; ++i) {
      const Vector x = oracle::random_tangent(rng, g->dim(), 1), y = oracle::random_tangent(rng, g->dim(), 1),
                   z = oracle::random_tangent(rng, g->dim(), 1), w = oracle::random_tangent(rng, g->dim(), 1);
      EXPECT_LT((g->curvature(b, x, y, z) + g->curvature(b, y, x, z)).norm(), 1e-15);
      EXPECT_LT((g->curvature(b, x, y, Vector(2 * z + w)) - 2 * g->curvature(b, x, y, z) - g->curvature(b, x, y, w))
                    .norm(),
                1e-14);
      EXPECT_LT((g->curvature(b, Vector(x + w), y, z) - g->curvature(b, x, y, z) - g->curvature(b, w, y, z)).norm(),
                1e-14);
      EXPECT_LT((g->curvature_operator(b, x) * y - g->curvature(b, x, y, x)).norm(), 1e-14);
    }
  }
}

TEST(Manifold, TransportMatchesOdeOracle) {
  std::mt19937_64 rng(23);
  for (const auto& name : kGeometries)
    for (auto conv : {Trivialization::left, Trivialization::right}) {
      const auto g = make_geometry<double>(name, conv);
      const Vector v = oracle::random_tangent(rng, g->dim(), 1.0), w = oracle::random_tangent(rng, g->dim(), 1.0);
      EXPECT_LT((pt_ode_oracle(*g, g->identity(), v, w, 10000) - parallel_transport(*g, g->identity(), v, w)).norm(),
                1e-8);
      EXPECT_EQ(pt_ode_oracle(*g, g->identity(), Vector(Vector::Zero(g->dim())), w, 10), w);
    }
}

TEST(Manifold, TransportOdeConvergesAtFourthOrder) {
  const auto g = make_geometry<double>("SO3");
  const Vector v = Eigen::Vector3d(0.4, 1.1, -0.7), w = Eigen::Vector3d(1, 0, 0);
  const Vector exact = parallel_transport(*g, g->identity(), v, w);
  // Richardson-style ratio of successive errors under step halving.
  const double e1 = (pt_ode_oracle(*g, g->identity(), v, w, 4) - exact).norm();
  const double e2 = (pt_ode_oracle(*g, g->identity(), v, w, 8) - exact).norm();
  const double e3 = (pt_ode_oracle(*g, g->identity(), v, w, 16) - exact).norm();
  EXPECT_GE(std::log2(e1 / e2), 3.5);
  EXPECT_GE(std::log2(e2 / e3), 3.5);
}

TEST(Manifold, JacobiFieldReproducesPushforwards) {
  std::mt19937_64 rng(24);
  for (const auto& name : kGeometries)
    for (auto conv : {Trivialization::left, Trivialization::right}) {
      const auto g = make_geometry<double>(name, conv);
      for (int i = 0; i < 5; ++i) {
        const Matrix b = random_point(*g, rng);
        const Vector v = oracle::random_tangent(rng, g->dim(), 0.5), w = oracle::random_tangent(rng, g->dim(), 1.0);
        const Vector zero = Vector::Zero(g->dim());
        const Vector jt = jacobi_field_oracle(*g, b, v, zero, w, 2000);
        const Vector jp = jacobi_field_oracle(*g, b, v, w, zero, 2000);
        EXPECT_LT((jt - jacobian_tangential_at(*g, b, v).map * w).norm(), 1e-6);
        EXPECT_LT((jp - jacobian_positional_at(*g, b, v).map * w).norm(), 1e-6);
      }
    }
}

TEST(Manifold, CurvatureIsTheQuadraticJacobiCoefficient) {
  // J₂(s v) w = PT(w + s²/6 R(v,w)v) + O(s⁴): the curvature is recovered from the s² coefficient of
  // the transported-back finite-difference Jacobian.
  const auto g = make_geometry<double>("SO3");
  const Vector v = Eigen::Vector3d::UnitX(), w = Eigen::Vector3d::UnitY();
  const Matrix b = g->identity();
  auto coefficient = [&](double s) {
    const Vector sv = s * v;
    const Matrix fd = fd_exp_jacobians_at(*g, b, sv, 1e-5).second;
    const Vector back = g->transport(b, sv).transpose() * (fd * w);
    return Vector((back - w) * 6 / (s * s));
  };
  const Vector c = (4 * coefficient(0.05) - coefficient(0.1)) / 3;
  EXPECT_LT((c - g->curvature(b, v, w, v)).norm(), 1e-5);
}

TEST(Manifold, JacobiansAtCoincidentPointsAreIdentity) {
  for (const auto& name : kGeometries) {
    const auto g = make_geometry<double>(name);
    const Matrix I = Matrix::Identity(g->dim(), g->dim());
    const Matrix b = g->identity();
    for (auto mode : {JacobianMode::closed_form, JacobianMode::pt_curvature, JacobianMode::pt_only}) {
      EXPECT_LT((jacobian_tangential(*g, b, b, mode).map - I).norm(), 1e-15);
      EXPECT_LT((jacobian_positional(*g, b, b, mode).map - I).norm(), 1e-15);
      EXPECT_LT((jacobian_tangential_inverse(*g, b, b, mode).map - I).norm(), 1e-15);
    }
    const auto fd = fd_exp_jacobians(*g, b, b);
    EXPECT_LT((fd.first - I).norm(), 1e-9);
    EXPECT_LT((fd.second - I).norm(), 1e-9);
    EXPECT_LT((dlog_positional(*g, b, b) + I).norm(), 1e-15);
  }
}

TEST(Manifold, EuclideanJacobiansAreIdentity) {
  std::mt19937_64 rng(25);
  const auto g = make_geometry<double>("R5");
  const Matrix a = random_point(*g, rng), b = random_point(*g, rng);
  const Matrix I = Matrix::Identity(5, 5);
  for (auto mode : {JacobianMode::closed_form, JacobianMode::pt_curvature, JacobianMode::pt_only,
                    JacobianMode::finite_diff}) {
    EXPECT_LT((jacobian_tangential(*g, a, b, mode).map - I).norm(), 1e-9);
    EXPECT_LT((jacobian_positional(*g, a, b, mode).map - I).norm(), 1e-9);
  }
  EXPECT_EQ(dlog_positional(*g, a, b), Matrix(-I));
}

TEST(Manifold, SO3ClosedFormAgreesWithFiniteDifference) {
  const auto g = make_geometry<double>("SO3");
  const Matrix b = g->identity();
  const Matrix to = g->exp(b, Vector(Eigen::Vector3d(0.2, -0.1, 0.3)));
  const auto fd = fd_exp_jacobians(*g, b, to, 1e-5);
  EXPECT_LT((jacobian_tangential(*g, b, to).map - fd.second).norm(), 1e-7);
  EXPECT_LT((jacobian_positional(*g, b, to).map - fd.first).norm(), 1e-7);
  EXPECT_LT((jacobian_tangential_inverse(*g, b, to).map - fd.second.inverse()).norm(), 1e-8);
}

TEST(Manifold, LeftInverseIdentityOnSE3) {
  std::mt19937_64 rng(26);
  const auto g = make_geometry<double>("SE3", Trivialization::right);
  for (int i = 0; i < 100; ++i) {
    const Matrix a = random_point(*g, rng), b = g->exp(a, oracle::random_tangent(rng, 6, 0.5));
    for (auto mode : {JacobianMode::closed_form, JacobianMode::pt_curvature}) {
      const Matrix P =
          jacobian_tangential_inverse(*g, a, b, mode).map * jacobian_tangential(*g, a, b, mode).map;
      EXPECT_LT((P - Matrix::Identity(6, 6)).norm(), 1e-8);
    }
  }
}

TEST(Manifold, PositionalCurvatureFormAtModerateRadius) {
  std::mt19937_64 rng(27);
  const auto g = make_geometry<double>("SE23");
  const Matrix b = random_point(*g, rng);
  const Vector v = oracle::random_tangent(rng, 9, 1.0).normalized() * 0.3;
  const Matrix fd = fd_exp_jacobians_at(*g, b, v, 1e-5).first;
  const double err = (jacobian_positional_at(*g, b, v, JacobianMode::pt_curvature).map - fd).norm();
  // Quartic remainder with a small constant; the pt_only error is quadratic.
  EXPECT_LT(err, 0.3 * std::pow(0.3, 4));
  EXPECT_GT((jacobian_positional_at(*g, b, v, JacobianMode::pt_only).map - fd).norm(), 10 * err);
}

TEST(Manifold, JacobianCompositionIsNotAnInverseInGeneral) {
  const auto g = make_geometry<double>("SO3");
  const Matrix a = g->identity(), b = g->exp(a, Vector(Eigen::Vector3d(0.5, 0.4, -0.3)));
  const Matrix P = jacobian_tangential(*g, a, b).map * jacobian_tangential(*g, b, a).map;
  EXPECT_GT((P - Matrix::Identity(3, 3)).norm(), 1e-3);
}

TEST(Manifold, Lemma1CovariantDifferenceOfLog) {
  std::mt19937_64 rng(28);
  for (const auto& name : {"SO3", "SE3", "SE23"})
    for (auto conv : {Trivialization::left, Trivialization::right}) {
      const auto g = make_geometry<double>(name, conv);
      for (int i = 0; i < 20; ++i) {
        const Matrix b = random_point(*g, rng);
        const Matrix t = g->exp(b, oracle::random_tangent(rng, g->dim(), 0.3));
        EXPECT_LT((fd_dlog_positional(*g, b, t) - dlog_positional(*g, b, t)).norm(), 1e-6);
      }
    }
}

TEST(Manifold, FiniteDifferenceStepIsRangeChecked) {
  const auto g = make_geometry<double>("SO3");
  EXPECT_THROW(fd_exp_jacobians(*g, g->identity(), g->identity(), 1e-9), DimensionError);
}

TEST(Manifold, MissingClosedFormFallsBackToCurvatureMode) {
  // A geometry without closed forms reports the fallback.
  class Bare final : public BasicGeometry<double> {
   public:
    Bare() : BasicGeometry<double>({2, "bare", Trivialization::left}) {}
    Matrix identity() const override { return Matrix::Zero(2, 1); }
    double injectivity_radius() const override { return 1e9; }
    Matrix exp(const Matrix& b, const Vector& v) const override { return b + v; }
    Vector log(const Matrix& b, const Matrix& t) const override { return t - b; }
    Matrix transport(const Matrix&, const Vector&) const override { return Matrix::Identity(2, 2); }
    Vector curvature(const Matrix&, const Vector&, const Vector&, const Vector&) const override {
      return Vector::Zero(2);
    }
    Matrix connection_generator(const Matrix&, const Vector&) const override { return Matrix::Zero(2, 2); }
    int point_rows() const override { return 2; }
    int point_cols() const override { return 1; }
  } bare;
  const auto J = jacobian_tangential(bare, bare.identity(), bare.identity());
  EXPECT_TRUE(J.fell_back);
  EXPECT_EQ(J.mode, JacobianMode::pt_curvature);
}

TEST(Manifold, ApproximationOrderInQuadPrecision) {
  const auto radii = log_spaced<quad>(quad(1e-3), quad(1e-1), 7);
  for (const auto& name : {"SO3", "SE3", "SE23"}) {
    const auto g = make_geometry<quad>(name);
    BasicGeometry<quad>::Vector dir(g->dim());
    for (int i = 0; i < g->dim(); ++i) dir(i) = quad(0.3 + 0.11 * i) * ((i % 2) ? -1 : 1);
    const auto base = g->exp(g->identity(), BasicGeometry<quad>::Vector(dir * quad(0.5)));
    for (auto kind : {PushforwardKind::tangential, PushforwardKind::positional}) {
      EXPECT_GE(order_fit<quad>(*g, kind, JacobianMode::pt_curvature, dir, radii, quad(1e-7), base).slope, 3.5)
          << name;
      const double s = order_fit<quad>(*g, kind, JacobianMode::pt_only, dir, radii, quad(1e-7), base).slope;
      EXPECT_GE(s, 1.8) << name;
      EXPECT_LE(s, 2.5) << name;
    }
  }
}

TEST(Manifold, JacobianModeNamesRoundTrip) {
  for (auto m : {JacobianMode::closed_form, JacobianMode::pt_curvature, JacobianMode::pt_only,
                 JacobianMode::finite_diff})
    EXPECT_EQ(parse_jacobian_mode(to_string(m)), m);
  EXPECT_THROW(parse_jacobian_mode("nope"), ConfigError);
}
