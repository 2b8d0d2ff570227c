#pragma once
// Concentrated Gaussians G_ref(μ, Σ): Gaussian densities in the normal chart at ref.

#include <cstdint>
#include <random>

#include "gekf/geometry.hpp"
#include "gekf/manifold.hpp"

namespace gekf {

struct ConcentratedGaussian {
  Matrix ref;
  Vector mean;
  Matrix cov;
};

/// Validates shapes, symmetrizes Σ and rejects non-SPD covariances.
ConcentratedGaussian make_concentrated(const Geometry& g, Matrix ref, Vector mean, Matrix cov);

Matrix symmetrize(const Matrix& m);
bool is_spd(const Matrix& m);

struct SpdRepair {
  Matrix cov;
  bool repaired = false;
};

/// Symmetrizes and floors eigenvalues at 1e-12·tr(Σ)/m.
SpdRepair enforce_spd(const Matrix& cov);

/// ref ⊞ (μ + L n), L the Cholesky factor of Σ, n standard normal drawn from rng.
Matrix sample(const Geometry& g, const ConcentratedGaussian& cg, std::mt19937_64& rng);
Matrix sample(const Geometry& g, const ConcentratedGaussian& cg, std::uint64_t seed);

/// D Σ Dᵀ, symmetrized.
Matrix covariance_pushforward(const Matrix& D, const Matrix& cov);

/// Re-expresses the distribution in the normal chart at new_ref around the shared mode ξ⋄ = ref ⊞ μ.
ConcentratedGaussian reexpress(const Geometry& g, const ConcentratedGaussian& cg, const Matrix& new_ref,
                               JacobianMode mode = JacobianMode::closed_form);

/// −½ (log(ref, ξ) − μ)ᵀ Σ⁻¹ (log(ref, ξ) − μ). The normalizer is never computed.
double unnorm_log_density(const Geometry& g, const ConcentratedGaussian& cg, const Matrix& point);

}  // namespace gekf
