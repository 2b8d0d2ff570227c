#pragma once
// SE₂(3) inertial navigation: bias-free IMU dynamics, right-invariant SE(3)
// pose measurements and a Lissajous ground-truth generator.

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gekf/filter.hpp"

namespace gekf::ins {

using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Vec9 = Eigen::Matrix<double, 9, 1>;
using State = Eigen::Matrix<double, 5, 5>;  // [R v p; 0 1 0; 0 0 1]
using Pose = Eigen::Matrix4d;
using Mat9 = Eigen::Matrix<double, 9, 9>;

struct ImuSample {
  double t = 0;
  Vec3 omega = Vec3::Zero();
  Vec3 accel = Vec3::Zero();
};

struct PoseMeasurement {
  double t = 0;
  long k = 0;  // IMU index of the measurement instant
  Pose pose = Pose::Identity();
};

struct TrajectoryConfig {
  double duration = 60;
  double imu_rate = 200;
  double meas_rate = 10;
  Vec3 amplitude{20, 10, 4};
  Vec3 freq_ratio{1, 2, 3};
  Vec3 phase{0, 0, 0};
  double base_period = 30;
  double roll_amplitude = 0.1;   // rad
  double pitch_amplitude = 0.05; // rad
  Vec3 gravity{0, 0, -9.81};
  double gyro_std = 0.001;   // rad/s·√s
  double accel_std = 0.01;   // m/s²·√s
  Vec6 meas_std = (Vec6() << 0.4, 0.3, 0.2, 2.0, 1.0, 0.2).finished();
  Vec9 init_std = (Vec9() << 0.1, 0.1, 0.1, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0).finished();
  std::uint64_t seed = 1;

  /// Throws ConfigError on non-positive rates, non-integer rate ratio or negative stds.
  void validate() const;
  double dt() const { return 1 / imu_rate; }
  long imu_steps() const;   // IMU intervals over the duration
  long meas_every() const;  // IMU steps between measurements
};

/// ξₖ₊₁ = exp(δt(G−N)) ξₖ exp(δt(V+N)), both factors in closed form.
State ins_propagate(const State& xi, const Vec3& omega, const Vec3& accel, double dt,
                    const Vec3& gravity = Vec3(0, 0, -9.81));

/// Right factor exp(h(V+N)); h may be negative.
State input_factor(const Vec3& omega, const Vec3& accel, double h);

/// h(ξ) = [R p; 0 1].
Pose pose_of(const State& xi);
/// y = exp(ν̂)·h(ξ).
Pose ins_measure(const State& xi, const Vec6& nu);

/// C (6×9): state LEFT trivialization to output RIGHT trivialization.
Eigen::Matrix<double, 6, 9> measurement_jacobian(const State& xi);
/// Error transition A = Ad(exp(δt(V+N))⁻¹); independent of the state.
Mat9 error_transition(const Vec3& omega, const Vec3& accel, double dt);
/// Input Jacobian B (9×6) of ε ↦ log(F(ξ,u)⁻¹F(ξ,u+κ)) in κ = (κ_ω, κ_a).
Eigen::Matrix<double, 9, 6> input_jacobian(const Vec3& omega, const Vec3& accel, double dt);

struct TruthSample {
  State state = State::Identity();
  Vec3 omega = Vec3::Zero();  // body rate
  Vec3 accel = Vec3::Zero();  // specific force
};

/// Analytic Lissajous state with exactly differentiated body rate and specific force.
TruthSample lissajous_truth(const TrajectoryConfig& cfg, double t);

struct SimulatedRun {
  std::vector<State> truth;           // imu_steps()+1 states, truth[k] at t = k·dt
  std::vector<ImuSample> imu_clean;   // noise-free inputs
  std::vector<ImuSample> imu;         // noisy inputs, same length as truth
  std::vector<PoseMeasurement> meas;  // at k = meas_every, 2·meas_every, …
  State initial_estimate = State::Identity();
};

/// Truth, IMU and pose streams; deterministic per (cfg, seed).
SimulatedRun simulate_run(const TrajectoryConfig& cfg, std::uint64_t seed);

Matrix initial_covariance(const TrajectoryConfig& cfg);
SystemModel make_system_model(const TrajectoryConfig& cfg);
MeasurementModel make_measurement_model(const TrajectoryConfig& cfg);
/// Stacked (ω, a) input for the system model.
Vector input_vector(const ImuSample& s);

void write_truth_csv(std::ostream& os, const SimulatedRun& run, const TrajectoryConfig& cfg);
void write_imu_csv(std::ostream& os, const SimulatedRun& run);
void write_measurement_csv(std::ostream& os, const SimulatedRun& run);

}  // namespace gekf::ins
