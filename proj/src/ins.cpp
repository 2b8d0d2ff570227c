#include "gekf/ins.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <boost/math/quadrature/gauss.hpp>

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "gekf/lie.hpp"

namespace gekf::ins {

namespace {

using SE23 = lie::SE23<double>;
using SE3 = lie::SE3<double>;
using Mat3 = Eigen::Matrix3d;

Mat3 rot_x(double a) { return Eigen::AngleAxisd(a, Vec3::UnitX()).toRotationMatrix(); }
Mat3 rot_y(double a) { return Eigen::AngleAxisd(a, Vec3::UnitY()).toRotationMatrix(); }

// Γ₁(φ) = Σ φ^ᵏ/(k+1)!, Γ₂(φ) = Σ φ^ᵏ/(k+2)!.
void gamma12(const Vec3& phi, Mat3& g1, Mat3& g2) {
  const lie::RotationCoefficients<double> k(phi.norm());
  const Mat3 W = lie::hat3<double>(phi);
  const Mat3 W2 = W * W;
  g1 = Mat3::Identity() + k.b * W + k.c * W2;
  g2 = 0.5 * Mat3::Identity() + k.c * W + k.e * W2;
}

State gravity_factor(const Vec3& g, double dt) {
  State G = State::Identity();
  G.block<3, 1>(0, 3) = dt * g;
  G.block<3, 1>(0, 4) = -0.5 * dt * dt * g;
  G(3, 4) = -dt;
  return G;
}

void write_row(std::ostream& os, std::initializer_list<double> head, const double* data, int n) {
  char buf[32];
  bool first = true;
  auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    if (!first) os << ',';
    os << buf;
    first = false;
  };
  for (double v : head) put(v);
  for (int i = 0; i < n; ++i) put(data[i]);
  os << '\n';
}

}  // namespace

void TrajectoryConfig::validate() const {
  if (!(duration > 0)) throw ConfigError("trajectory.duration must be positive");
  if (!(imu_rate > 0) || !(meas_rate > 0)) throw ConfigError("trajectory rates must be positive");
  const double ratio = imu_rate / meas_rate;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 1)
    throw ConfigError("trajectory.imu_rate must be an integer multiple of trajectory.meas_rate");
  if (!(base_period > 0)) throw ConfigError("trajectory.base_period must be positive");
  if (gyro_std < 0 || accel_std < 0 || (meas_std.array() < 0).any() || (init_std.array() < 0).any())
    throw ConfigError("noise standard deviations must be non-negative");
  if (!amplitude.allFinite() || !gravity.allFinite() || !phase.allFinite() || !freq_ratio.allFinite())
    throw ConfigError("trajectory parameters must be finite");
}

long TrajectoryConfig::imu_steps() const { return std::lround(duration * imu_rate); }
long TrajectoryConfig::meas_every() const { return std::lround(imu_rate / meas_rate); }

State input_factor(const Vec3& omega, const Vec3& accel, double h) {
  Mat3 g1, g2;
  gamma12(h * omega, g1, g2);
  State U = State::Identity();
  U.topLeftCorner<3, 3>() = lie::so3_exp<double>(h * omega);
  U.block<3, 1>(0, 3) = h * g1 * accel;
  U.block<3, 1>(0, 4) = h * h * g2 * accel;
  U(3, 4) = h;
  return U;
}

State ins_propagate(const State& xi, const Vec3& omega, const Vec3& accel, double dt, const Vec3& gravity) {
  return gravity_factor(gravity, dt) * xi * input_factor(omega, accel, dt);
}

Pose pose_of(const State& xi) {
  Pose y = Pose::Identity();
  y.topLeftCorner<3, 3>() = xi.topLeftCorner<3, 3>();
  y.block<3, 1>(0, 3) = xi.block<3, 1>(0, 4);
  return y;
}

Pose ins_measure(const State& xi, const Vec6& nu) { return SE3::exp(nu) * pose_of(xi); }

Eigen::Matrix<double, 6, 9> measurement_jacobian(const State& xi) {
  const Mat3 R = xi.topLeftCorner<3, 3>();
  const Vec3 p = xi.block<3, 1>(0, 4);
  Eigen::Matrix<double, 6, 9> C = Eigen::Matrix<double, 6, 9>::Zero();
  C.block<3, 3>(0, 0) = R;
  C.block<3, 3>(3, 0) = lie::hat3<double>(p) * R;
  C.block<3, 3>(3, 6) = R;
  return C;
}

Mat9 error_transition(const Vec3& omega, const Vec3& accel, double dt) {
  // Υ is not in SE₂(3) (its (3,4) entry is δt), but conjugation by it maps the
  // algebra to itself; Υ⁻¹ = exp(−δt(V+N)).
  const State Ui = input_factor(omega, accel, -dt);
  const State U = input_factor(omega, accel, dt);
  Mat9 A;
  for (int i = 0; i < 9; ++i) A.col(i) = SE23::vee(Ui * SE23::hat(SE23::Tangent::Unit(i)) * U);
  return A;
}

Eigen::Matrix<double, 9, 6> input_jacobian(const Vec3& omega, const Vec3& accel, double dt) {
  // Υ⁻¹ dΥ = δt ∫₀¹ exp(−sX) dV exp(sX) ds with X = δt(V+N).
  using Quad = boost::math::quadrature::gauss<double, 8>;
  const auto& x = Quad::abscissa();
  const auto& w = Quad::weights();
  Eigen::Matrix<double, 9, 6> B = Eigen::Matrix<double, 9, 6>::Zero();
  for (size_t n = 0; n < x.size(); ++n) {
    for (double sign : {-1.0, 1.0}) {
      const double s = 0.5 * (1 + sign * x[n]);
      const State Ui = input_factor(omega, accel, -s * dt);
      const State U = input_factor(omega, accel, s * dt);
      for (int j = 0; j < 6; ++j) {
        State dV = State::Zero();
        if (j < 3)
          dV.topLeftCorner<3, 3>() = lie::hat3<double>(Vec3::Unit(j));
        else
          dV(j - 3, 3) = 1;
        B.col(j) += 0.5 * w[n] * dt * SE23::vee(Ui * dV * U);
      }
    }
  }
  return B;
}

TruthSample lissajous_truth(const TrajectoryConfig& cfg, double t) {
  const double w0 = 2 * M_PI / cfg.base_period;
  Vec3 p, v, acc;
  for (int i = 0; i < 3; ++i) {
    const double wi = cfg.freq_ratio(i) * w0;
    const double arg = wi * t + cfg.phase(i);
    p(i) = cfg.amplitude(i) * std::sin(arg);
    v(i) = cfg.amplitude(i) * wi * std::cos(arg);
    acc(i) = -cfg.amplitude(i) * wi * wi * std::sin(arg);
  }
  // Yaw follows the horizontal velocity; heading is held at zero when there is none.
  const double s2 = v(0) * v(0) + v(1) * v(1);
  Mat3 Rz = Mat3::Identity();
  double yaw_rate = 0;
  if (s2 > 1e-12) {
    const double s = std::sqrt(s2);
    Rz << v(0) / s, -v(1) / s, 0, v(1) / s, v(0) / s, 0, 0, 0, 1;
    yaw_rate = (v(0) * acc(1) - v(1) * acc(0)) / s2;
  }
  const double roll = cfg.roll_amplitude * std::sin(w0 * t);
  const double roll_rate = cfg.roll_amplitude * w0 * std::cos(w0 * t);
  const double pitch = cfg.pitch_amplitude * std::sin(2 * w0 * t);
  const double pitch_rate = cfg.pitch_amplitude * 2 * w0 * std::cos(2 * w0 * t);
  const Mat3 Rx = rot_x(roll), Ry = rot_y(pitch);
  const Mat3 R = Rz * Ry * Rx;

  TruthSample out;
  out.state.topLeftCorner<3, 3>() = R;
  out.state.block<3, 1>(0, 3) = v;
  out.state.block<3, 1>(0, 4) = p;
  out.omega = Rx.transpose() * Ry.transpose() * Vec3(0, 0, yaw_rate) + Rx.transpose() * Vec3(0, pitch_rate, 0) +
              Vec3(roll_rate, 0, 0);
  out.accel = R.transpose() * (acc - cfg.gravity);
  return out;
}

SimulatedRun simulate_run(const TrajectoryConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const long N = cfg.imu_steps();
  const double dt = cfg.dt();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;

  // Inputs are chosen from the increments of the analytic trajectory so that
  // rotation and velocity are reproduced exactly at every sample.
  std::vector<State> analytic(N + 2);
  for (long k = 0; k <= N + 1; ++k) analytic[k] = lissajous_truth(cfg, k * dt).state;

  SimulatedRun run;
  run.truth.reserve(N + 1);
  run.imu_clean.reserve(N + 1);
  run.imu.reserve(N + 1);

  Vec9 eps;
  for (int i = 0; i < 9; ++i) eps(i) = cfg.init_std(i) * normal(rng);

  run.truth.push_back(analytic[0]);
  for (long k = 0; k <= N; ++k) {
    const Mat3 Rk = analytic[k].topLeftCorner<3, 3>();
    const Mat3 Rn = analytic[k + 1].topLeftCorner<3, 3>();
    ImuSample s;
    s.t = k * dt;
    s.omega = lie::so3_log<double>(Mat3(Rk.transpose() * Rn)) / dt;
    Mat3 g1, g2;
    gamma12(dt * s.omega, g1, g2);
    const Vec3 dv = analytic[k + 1].block<3, 1>(0, 3) - analytic[k].block<3, 1>(0, 3) - dt * cfg.gravity;
    s.accel = (dt * g1).lu().solve(Rk.transpose() * dv);
    run.imu_clean.push_back(s);
    if (k < N) run.truth.push_back(SE23::project(ins_propagate(run.truth[k], s.omega, s.accel, dt, cfg.gravity)));
  }

  const double gyro_sd = cfg.gyro_std / std::sqrt(dt);
  const double accel_sd = cfg.accel_std / std::sqrt(dt);
  const long every = cfg.meas_every();
  for (long k = 0; k <= N; ++k) {
    ImuSample s = run.imu_clean[k];
    for (int i = 0; i < 3; ++i) s.omega(i) += gyro_sd * normal(rng);
    for (int i = 0; i < 3; ++i) s.accel(i) += accel_sd * normal(rng);
    run.imu.push_back(s);
    if (k > 0 && k % every == 0) {
      Vec6 nu;
      for (int i = 0; i < 6; ++i) nu(i) = cfg.meas_std(i) * normal(rng);
      run.meas.push_back({k * dt, k, ins_measure(run.truth[k], nu)});
    }
  }
  run.initial_estimate = run.truth[0] * SE23::exp(eps);
  return run;
}

Matrix initial_covariance(const TrajectoryConfig& cfg) { return Vector(cfg.init_std.cwiseAbs2()).asDiagonal(); }

Vector input_vector(const ImuSample& s) {
  Vector u(6);
  u << s.omega, s.accel;
  return u;
}

SystemModel make_system_model(const TrajectoryConfig& cfg) {
  cfg.validate();
  const double dt = cfg.dt();
  const Vec3 g = cfg.gravity;
  SystemModel m;
  m.geometry = make_geometry<double>("SE23", Trivialization::left);
  m.F = [dt, g](const Matrix& xi, const Vector& u) {
    return Matrix(ins_propagate(State(xi), u.head<3>(), u.tail<3>(), dt, g));
  };
  m.A = [dt](const Matrix&, const Vector& u) { return Matrix(error_transition(u.head<3>(), u.tail<3>(), dt)); };
  m.B = [dt](const Matrix&, const Vector& u) { return Matrix(input_jacobian(u.head<3>(), u.tail<3>(), dt)); };
  m.input_dim = 6;
  Vector qi(6);
  qi << Vec3::Constant(cfg.gyro_std * cfg.gyro_std / dt), Vec3::Constant(cfg.accel_std * cfg.accel_std / dt);
  m.Q_I = qi.asDiagonal();
  return m;
}

MeasurementModel make_measurement_model(const TrajectoryConfig& cfg) {
  MeasurementModel m;
  m.state_geometry = make_geometry<double>("SE23", Trivialization::left);
  m.output_geometry = make_geometry<double>("SE3", Trivialization::right);
  m.h = [](const Matrix& xi) { return Matrix(pose_of(State(xi))); };
  m.C = [](const Matrix& xi) { return Matrix(measurement_jacobian(State(xi))); };
  m.R = Vector(cfg.meas_std.cwiseAbs2()).asDiagonal();
  return m;
}

void write_truth_csv(std::ostream& os, const SimulatedRun& run, const TrajectoryConfig& cfg) {
  os << "t,r11,r12,r13,r21,r22,r23,r31,r32,r33,vx,vy,vz,px,py,pz\n";
  for (size_t k = 0; k < run.truth.size(); ++k) {
    const auto& x = run.truth[k];
    double row[15];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) row[3 * i + j] = x(i, j);
    for (int i = 0; i < 3; ++i) row[9 + i] = x(i, 3), row[12 + i] = x(i, 4);
    write_row(os, {static_cast<double>(k) * cfg.dt()}, row, 15);
  }
}

void write_imu_csv(std::ostream& os, const SimulatedRun& run) {
  os << "t,wx,wy,wz,ax,ay,az\n";
  for (const auto& s : run.imu) {
    double row[6] = {s.omega(0), s.omega(1), s.omega(2), s.accel(0), s.accel(1), s.accel(2)};
    write_row(os, {s.t}, row, 6);
  }
}

void write_measurement_csv(std::ostream& os, const SimulatedRun& run) {
  os << "t,k,r11,r12,r13,r21,r22,r23,r31,r32,r33,px,py,pz\n";
  for (const auto& m : run.meas) {
    double row[12];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) row[3 * i + j] = m.pose(i, j);
    for (int i = 0; i < 3; ++i) row[9 + i] = m.pose(i, 3);
    write_row(os, {m.t, static_cast<double>(m.k)}, row, 12);
  }
}

}  // namespace gekf::ins
