#pragma once
// Geometric EKF and iterated EKF on manifolds, with the classical
// exponential-coordinate baselines and the update-only / reset-only ablations.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gekf/gaussian.hpp"
#include "gekf/geometry.hpp"
#include "gekf/manifold.hpp"

namespace gekf {

struct FilterState {
  Matrix estimate;
  Matrix cov;
  long k = 0;
};

/// ξₖ₊₁ = F(ξₖ, u) with combined process noise Q = Qᴾ + B Qᴵ Bᵀ in the state trivialization.
struct SystemModel {
  GeometryPtr geometry;
  std::function<Matrix(const Matrix& xi, const Vector& u)> F;
  /// Error-state transition A at (ξ̂, u); central differences of the error map when empty.
  std::function<Matrix(const Matrix& xi, const Vector& u)> A;
  /// Input Jacobian B at (ξ̂, u); required when Qᴵ is non-empty.
  std::function<Matrix(const Matrix& xi, const Vector& u)> B;
  int input_dim = 0;
  Matrix Q_P;  // m×m, may be empty (zero)
  Matrix Q_I;  // input_dim×input_dim, may be empty (zero)
  /// Diagnostic: transport Q by J₂⁻¹ to a supplied noise-free propagated state. Off by default.
  bool transport_process_noise = false;
};

/// y = h(ξ) on the output manifold, with C = Dh in (state, output) trivializations.
struct MeasurementModel {
  GeometryPtr state_geometry;
  GeometryPtr output_geometry;
  std::function<Matrix(const Matrix& xi)> h;
  /// Linearization at ξ; central differences of log(h(ξ), h(ξ ⊞ ε)) when empty.
  std::function<Matrix(const Matrix& xi)> C;
  Matrix R;
};

struct FilterVariant {
  std::string name = "gekf";
  bool geometric_update = true;  // R† correction and J₂⁻¹ prior transform
  bool geometric_reset = true;   // covariance reset through J₂
  bool iterated = false;
  int max_iters = 10;
  double iter_tol = 1e-8;
  JacobianMode jacobian_mode = JacobianMode::closed_form;
};

/// Presets: ekf, gekf, gitekf, itekf, gekf-update, gekf-reset, gitekf-update.
FilterVariant variant_from_name(const std::string& name);
const std::vector<std::string>& variant_names();

struct UpdateResult {
  Vector mean;       // μ⁺ in the chart at the linearization point
  Matrix cov;        // Σ⁺
  Matrix prior_cov;  // Σ†
  Matrix gain;
  Vector residual;   // log(h(ξ̌), y) on the output manifold
  double innovation_cond = 1;
  Matrix lin_point;
};

struct ResetResult {
  FilterState state;
  bool beyond_chart = false;
};

struct IteratedResult {
  FilterState state;
  UpdateResult last;
  int iterations = 0;               // relinearizations before |μⁱ| < iter_tol
  bool converged = false;
  std::vector<double> step_norms;   // |μⁱ| per pass
  bool beyond_chart = false;
};

struct TraceRecord {
  long k = 0;
  std::vector<double> estimate;  // column-major entries of ξ̂
  std::vector<double> cov_upper;
  Vector mean;                   // μ⁺ (empty when no measurement)
  int iterations = 0;
  double innovation_cond = 0;
  bool chart_warning = false;
  bool spd_repaired = false;
};

struct StepResult {
  FilterState state;
  TraceRecord trace;
};

/// Error-state transition by central differences of ε ↦ log(F(ξ̂), F(ξ̂ ⊞ ε, u)).
Matrix fd_error_transition(const SystemModel& model, const Matrix& xi, const Vector& u, double h = 1e-6);
/// C by central differences of ε ↦ log(h(ξ), h(ξ ⊞ ε)).
Matrix fd_measurement_jacobian(const MeasurementModel& model, const Matrix& xi, double h = 1e-6);

/// Prediction: ξ̂₊ = F(ξ̂, u), Σ₊ = A Σ Aᵀ + Q. noise_free_next feeds the diagnostic Q transport.
FilterState propagate(const FilterState& s, const Vector& u, const SystemModel& model,
                      const Matrix* noise_free_next = nullptr);

/// Kalman-gain update linearized at ξ̂ (Joseph form).
UpdateResult update(const FilterState& s, const Matrix& y, const MeasurementModel& model, bool geometric,
                    JacobianMode mode = JacobianMode::closed_form);

/// Update linearized at ξ̌ with the prior re-expressed there (Joseph form).
UpdateResult update_at(const FilterState& s, const Matrix& y, const MeasurementModel& model, const Matrix& lin_point,
                       bool geometric, JacobianMode mode = JacobianMode::closed_form);

/// Same quantities in information form: Σ⁺ = (Σ†⁻¹ + CᵀR†⁻¹C)⁻¹, μ⁺ = Σ⁺(Σ†⁻¹m + CᵀR†⁻¹r).
UpdateResult update_at_information(const FilterState& s, const Matrix& y, const MeasurementModel& model,
                                   const Matrix& lin_point, bool geometric,
                                   JacobianMode mode = JacobianMode::closed_form);

/// ξ̂ = ref ⊞ μ⁺; Σ = J₂ Σ⁺ J₂ᵀ when geometric, Σ⁺ otherwise.
ResetResult reset(const Geometry& g, const Matrix& ref, const Vector& mean, const Matrix& cov, bool geometric,
                  JacobianMode mode = JacobianMode::closed_form);

IteratedResult iterated_update(const FilterState& s, const Matrix& y, const MeasurementModel& model,
                               const FilterVariant& variant);

StepResult step(const FilterState& s, const Vector& u, const std::optional<Matrix>& y, const SystemModel& system,
                const MeasurementModel& measurement, const FilterVariant& variant);

}  // namespace gekf
