#pragma once
// Independent reference computations for the unit tests. Nothing here uses the
// closed forms under test.

#include <Eigen/Dense>

#include <random>

namespace oracle {

/// Matrix exponential by scaling, Taylor series and repeated squaring.
inline Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  int squarings = 0;
  double norm = A.lpNorm<Eigen::Infinity>();
  while (norm > 0.25) norm /= 2, ++squarings;
  const Eigen::MatrixXd B = A / std::pow(2.0, squarings);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * B / k;
    sum += term;
  }
  for (int i = 0; i < squarings; ++i) sum = sum * sum;
  return sum;
}

/// Denman–Beavers square root.
inline Eigen::MatrixXd sqrtm(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd Y = A, Z = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  for (int i = 0; i < 60; ++i) {
    const Eigen::MatrixXd Yn = (Y + Z.inverse()) / 2;
    Z = (Z + Y.inverse()) / 2;
    Y = Yn;
  }
  return Y;
}

/// Principal matrix logarithm by inverse scaling and squaring.
inline Eigen::MatrixXd logm(const Eigen::MatrixXd& A) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd X = A;
  int roots = 0;
  while ((X - I).norm() > 0.1) X = sqrtm(X), ++roots;
  const Eigen::MatrixXd E = X - I;
  Eigen::MatrixXd power = E, sum = Eigen::MatrixXd::Zero(A.rows(), A.cols());
  for (int n = 1; n < 80; ++n) {
    sum += ((n % 2) ? 1.0 : -1.0) * power / n;
    power = power * E;
  }
  return sum * std::pow(2.0, roots);
}

/// Σ A^k/(k+1)!.
inline Eigen::MatrixXd phi1(const Eigen::MatrixXd& A) {
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  Eigen::MatrixXd sum = term;
  for (int k = 1; k < 60; ++k) {
    term = term * A / (k + 1);
    sum += term;
  }
  return sum;
}

/// Uniform direction scaled to a norm drawn uniformly in [0, radius].
inline Eigen::VectorXd random_tangent(std::mt19937_64& rng, int dim, double radius) {
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v(i) = n(rng);
  return v.normalized() * radius * u(rng);
}

inline Eigen::MatrixXd random_spd(std::mt19937_64& rng, int dim, double scale) {
  std::normal_distribution<double> n;
  Eigen::MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) A(i, j) = n(rng);
  return scale * (A * A.transpose() / dim + 0.1 * Eigen::MatrixXd::Identity(dim, dim));
}

}  // namespace oracle
