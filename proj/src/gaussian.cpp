#include "gekf/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace gekf {

Matrix symmetrize(const Matrix& m) { return (m + m.transpose()) / 2; }

bool is_spd(const Matrix& m) {
  if (m.rows() != m.cols() || !m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(symmetrize(m));
  return llt.info() == Eigen::Success;
}

SpdRepair enforce_spd(const Matrix& cov) {
  SpdRepair out{symmetrize(cov), false};
  if (!out.cov.allFinite()) throw NumericalError("enforce_spd: covariance has non-finite entries");
  const double floor = 1e-12 * out.cov.trace() / out.cov.rows();
  // Every eigenvalue exceeds the floor iff Σ − floor·I is positive definite.
  Eigen::LLT<Matrix> shifted(out.cov - floor * Matrix::Identity(out.cov.rows(), out.cov.cols()));
  if (shifted.info() == Eigen::Success) return out;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.cov);
  Vector lambda = eig.eigenvalues().cwiseMax(floor);
  out.cov = symmetrize(eig.eigenvectors() * lambda.asDiagonal() * eig.eigenvectors().transpose());
  out.repaired = true;
  return out;
}

ConcentratedGaussian make_concentrated(const Geometry& g, Matrix ref, Vector mean, Matrix cov) {
  g.check_point(ref, "make_concentrated");
  g.check_tangent(mean, "make_concentrated");
  require_dim(cov.rows(), g.dim(), "make_concentrated covariance rows");
  require_dim(cov.cols(), g.dim(), "make_concentrated covariance cols");
  cov = symmetrize(cov);
  if (!is_spd(cov)) throw NumericalError("make_concentrated: covariance is not positive definite");
  return {std::move(ref), std::move(mean), std::move(cov)};
}

Matrix sample(const Geometry& g, const ConcentratedGaussian& cg, std::mt19937_64& rng) {
  Eigen::LLT<Matrix> llt(cg.cov);
  if (llt.info() != Eigen::Success) throw NumericalError("sample: covariance factorization failed");
  std::normal_distribution<double> normal;
  Vector n(g.dim());
  for (int i = 0; i < g.dim(); ++i) n(i) = normal(rng);
  return g.exp(cg.ref, Vector(cg.mean + llt.matrixL() * n));
}

Matrix sample(const Geometry& g, const ConcentratedGaussian& cg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(g, cg, rng);
}

Matrix covariance_pushforward(const Matrix& D, const Matrix& cov) {
  require_dim(D.cols(), cov.rows(), "covariance_pushforward");
  return symmetrize(D * cov * D.transpose());
}

ConcentratedGaussian reexpress(const Geometry& g, const ConcentratedGaussian& cg, const Matrix& new_ref,
                               JacobianMode mode) {
  g.check_point(new_ref, "reexpress");
  const Matrix mode_point = g.exp(cg.ref, cg.mean);
  const Vector mu2 = g.log(new_ref, mode_point);
  if (!g.within_injectivity(mu2)) throw BranchError("reexpress: new reference is outside the chart overlap");
  const Matrix D = jacobian_tangential_inverse_at(g, new_ref, mu2, mode).map *
                   jacobian_tangential_at(g, cg.ref, cg.mean, mode).map;
  return {new_ref, mu2, covariance_pushforward(D, cg.cov)};
}

double unnorm_log_density(const Geometry& g, const ConcentratedGaussian& cg, const Matrix& point) {
  const Vector d = g.log(cg.ref, point) - cg.mean;
  Eigen::LLT<Matrix> llt(cg.cov);
  if (llt.info() != Eigen::Success) throw NumericalError("unnorm_log_density: covariance is not SPD");
  return -0.5 * d.dot(llt.solve(d));
}

}  // namespace gekf
