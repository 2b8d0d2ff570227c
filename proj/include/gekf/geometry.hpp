#pragma once
// Geometries with the Cartan–Schouten (0)-connection: Euclidean ℝⁿ and the
// matrix groups SO(3), SE(3), SE₂(3) in either trivialization.
//
// Points are matrices (an n×1 column for ℝⁿ). Tangent vectors are coordinate
// vectors in the trivialization of the point they are attached to.

#include <Eigen/Core>

#include <cctype>
#include <limits>
#include <memory>
#include <optional>
#include <string>

#include "gekf/error.hpp"
#include "gekf/lie.hpp"

namespace gekf {

/// LEFT: ξ ⊞ u = ξ·exp(u). RIGHT: ξ ⊞ u = exp(u)·ξ.
enum class Trivialization { left, right };

enum class GeometryKind { euclidean, so3, se3, se23 };

struct GeometryDescriptor {
  int dim = 0;
  std::string name;
  Trivialization convention = Trivialization::left;
};

template <class S>
class BasicGeometry {
 public:
  using Scalar = S;
  using Matrix = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<S, Eigen::Dynamic, 1>;

  explicit BasicGeometry(GeometryDescriptor d) : desc_(std::move(d)) {}
  virtual ~BasicGeometry() = default;

  const GeometryDescriptor& descriptor() const { return desc_; }
  int dim() const { return desc_.dim; }
  const std::string& name() const { return desc_.name; }
  Trivialization convention() const { return desc_.convention; }

  virtual Matrix identity() const = 0;

  /// Radius of the normal neighbourhood in tangent coordinates; infinity if unbounded.
  virtual S injectivity_radius() const = 0;
  bool within_injectivity(const Vector& v) const { return v.norm() < injectivity_radius(); }

  virtual Matrix exp(const Matrix& base, const Vector& v) const = 0;
  virtual Vector log(const Matrix& base, const Matrix& target) const = 0;

  /// Matrix of parallel transport along t ↦ exp(base, t v), t ∈ [0, 1].
  virtual Matrix transport(const Matrix& base, const Vector& v) const = 0;

  /// R(x, y) z.
  virtual Vector curvature(const Matrix& base, const Vector& x, const Vector& y, const Vector& z) const = 0;

  /// Matrix of w ↦ R(v, w) v.
  virtual Matrix curvature_operator(const Matrix& base, const Vector& v) const {
    const int m = dim();
    Matrix M(m, m);
    for (int i = 0; i < m; ++i) M.col(i) = curvature(base, v, Vector::Unit(m, i), v);
    return M;
  }

  /// Trivialized connection along the geodesic exp(base, t v): parallel fields satisfy ẇ = G w.
  virtual Matrix connection_generator(const Matrix& base, const Vector& v) const = 0;

  virtual std::optional<Matrix> tangential_closed_form(const Matrix&, const Vector&) const { return std::nullopt; }
  virtual std::optional<Matrix> tangential_inverse_closed_form(const Matrix&, const Vector&) const {
    return std::nullopt;
  }
  virtual std::optional<Matrix> positional_closed_form(const Matrix&, const Vector&) const { return std::nullopt; }

  /// Re-projects a point onto the manifold after long composition chains.
  virtual Matrix project(const Matrix& point) const { return point; }
  /// Distance of a point from the structural constraints (0 for exact points).
  virtual S structure_error(const Matrix&) const { return S(0); }

  virtual int point_rows() const = 0;
  virtual int point_cols() const = 0;

  void check_point(const Matrix& p, const char* what) const {
    if (p.rows() != point_rows() || p.cols() != point_cols())
      throw DimensionError(std::string(what) + ": point of shape " + std::to_string(p.rows()) + "x" +
                           std::to_string(p.cols()) + " does not belong to " + name());
  }
  void check_tangent(const Vector& v, const char* what) const { require_dim(v.size(), dim(), what); }

 private:
  GeometryDescriptor desc_;
};

template <class S>
class EuclideanGeometry final : public BasicGeometry<S> {
 public:
  using typename BasicGeometry<S>::Matrix;
  using typename BasicGeometry<S>::Vector;

  explicit EuclideanGeometry(int n)
      : BasicGeometry<S>({n, "R" + std::to_string(n), Trivialization::left}) {
    if (n < 1) throw DimensionError("EuclideanGeometry: dimension must be >= 1");
  }

  Matrix identity() const override { return Matrix::Zero(this->dim(), 1); }
  S injectivity_radius() const override { return std::numeric_limits<S>::infinity(); }

  Matrix exp(const Matrix& base, const Vector& v) const override {
    this->check_point(base, "exp");
    this->check_tangent(v, "exp");
    return base + v;
  }
  Vector log(const Matrix& base, const Matrix& target) const override {
    this->check_point(base, "log");
    this->check_point(target, "log");
    return target - base;
  }
  Matrix transport(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "transport");
    return Matrix::Identity(this->dim(), this->dim());
  }
  Vector curvature(const Matrix&, const Vector& x, const Vector&, const Vector&) const override {
    this->check_tangent(x, "curvature");
    return Vector::Zero(this->dim());
  }
  Matrix curvature_operator(const Matrix&, const Vector&) const override {
    return Matrix::Zero(this->dim(), this->dim());
  }
  Matrix connection_generator(const Matrix&, const Vector&) const override {
    return Matrix::Zero(this->dim(), this->dim());
  }
  std::optional<Matrix> tangential_closed_form(const Matrix&, const Vector&) const override {
    return Matrix::Identity(this->dim(), this->dim());
  }
  std::optional<Matrix> tangential_inverse_closed_form(const Matrix&, const Vector&) const override {
    return Matrix::Identity(this->dim(), this->dim());
  }
  std::optional<Matrix> positional_closed_form(const Matrix&, const Vector&) const override {
    return Matrix::Identity(this->dim(), this->dim());
  }
  int point_rows() const override { return this->dim(); }
  int point_cols() const override { return 1; }
};

/// Matrix Lie group G with the (0)-connection. With σ = −1 for LEFT and +1 for RIGHT:
/// transport = exp(σ ½ ad_v) = Ad(exp(σ v / 2)), R(x,y)z = −¼[[x,y],z],
/// J₂ = Σ (σ ad_v)^k/(k+1)!, J₁ = ½(I + Ad(exp(σ v))).
template <class S, class G>
class LieGeometry final : public BasicGeometry<S> {
 public:
  using typename BasicGeometry<S>::Matrix;
  using typename BasicGeometry<S>::Vector;
  using Group = G;
  using Tangent = typename G::Tangent;
  using Element = typename G::Element;

  LieGeometry(std::string name, Trivialization conv) : BasicGeometry<S>({G::kDim, std::move(name), conv}) {}

  Matrix identity() const override { return G::identity(); }
  S injectivity_radius() const override { return lie::pi<S>(); }

  Matrix exp(const Matrix& base, const Vector& v) const override {
    this->check_point(base, "exp");
    this->check_tangent(v, "exp");
    const Element step = G::exp(Tangent(v));
    return left() ? Matrix(Element(base) * step) : Matrix(step * Element(base));
  }

  Vector log(const Matrix& base, const Matrix& target) const override {
    this->check_point(base, "log");
    this->check_point(target, "log");
    if (base == target) return Vector::Zero(this->dim());
    const Element inv = G::inverse(Element(base));
    return left() ? Vector(G::log(inv * Element(target))) : Vector(G::log(Element(target) * inv));
  }

  Matrix transport(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "transport");
    return G::adjoint(G::exp(sigma() * Tangent(v) / S(2)));
  }

  Vector curvature(const Matrix&, const Vector& x, const Vector& y, const Vector& z) const override {
    this->check_tangent(x, "curvature");
    this->check_tangent(y, "curvature");
    this->check_tangent(z, "curvature");
    return -G::bracket(G::bracket(Tangent(x), Tangent(y)), Tangent(z)) / S(4);
  }

  Matrix curvature_operator(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "curvature_operator");
    const typename G::Operator a = G::ad(Tangent(v));
    return a * a / S(4);
  }

  Matrix connection_generator(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "connection_generator");
    return sigma() * G::ad(Tangent(v)) / S(2);
  }

  std::optional<Matrix> tangential_closed_form(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "jacobian_tangential");
    return Matrix(G::left_jacobian(sigma() * Tangent(v)));
  }
  std::optional<Matrix> tangential_inverse_closed_form(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "jacobian_tangential_inverse");
    return Matrix(G::left_jacobian_inv(sigma() * Tangent(v)));
  }
  std::optional<Matrix> positional_closed_form(const Matrix&, const Vector& v) const override {
    this->check_tangent(v, "jacobian_positional");
    const typename G::Operator I = G::Operator::Identity();
    return Matrix((I + G::adjoint(G::exp(sigma() * Tangent(v)))) / S(2));
  }

  Matrix project(const Matrix& point) const override {
    this->check_point(point, "project");
    return G::project(Element(point));
  }
  S structure_error(const Matrix& point) const override {
    this->check_point(point, "structure_error");
    return G::structure_error(Element(point));
  }

  int point_rows() const override { return G::kMat; }
  int point_cols() const override { return G::kMat; }

 private:
  bool left() const { return this->convention() == Trivialization::left; }
  S sigma() const { return left() ? S(-1) : S(1); }
};

template <class S>
std::shared_ptr<const BasicGeometry<S>> make_geometry(GeometryKind kind, Trivialization conv, int euclidean_dim = 3) {
  switch (kind) {
    case GeometryKind::euclidean:
      return std::make_shared<EuclideanGeometry<S>>(euclidean_dim);
    case GeometryKind::so3:
      return std::make_shared<LieGeometry<S, lie::SO3<S>>>("SO3", conv);
    case GeometryKind::se3:
      return std::make_shared<LieGeometry<S, lie::SE3<S>>>("SE3", conv);
    case GeometryKind::se23:
      return std::make_shared<LieGeometry<S, lie::SE23<S>>>("SE23", conv);
  }
  throw UnsupportedError("make_geometry: unknown geometry kind");
}

/// Accepts "SO3", "SE3", "SE23", "R<n>" (e.g. "R3"), case-insensitive.
template <class S>
std::shared_ptr<const BasicGeometry<S>> make_geometry(const std::string& name,
                                                      Trivialization conv = Trivialization::left) {
  std::string n;
  for (char c : name) n += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (n == "SO3") return make_geometry<S>(GeometryKind::so3, conv);
  if (n == "SE3") return make_geometry<S>(GeometryKind::se3, conv);
  if (n == "SE23") return make_geometry<S>(GeometryKind::se23, conv);
  if (n.size() > 1 && n[0] == 'R') {
    try {
      size_t used = 0;
      const int dim = std::stoi(n.substr(1), &used);
      if (used == n.size() - 1) return make_geometry<S>(GeometryKind::euclidean, conv, dim);
    } catch (const std::logic_error&) {
    }
  }
  throw UnsupportedError("unknown geometry '" + name + "' (expected R<n>, SO3, SE3 or SE23)");
}

using Geometry = BasicGeometry<double>;
using GeometryPtr = std::shared_ptr<const Geometry>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace gekf
