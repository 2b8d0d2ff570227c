#include "gekf/filter.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <map>

namespace gekf {

namespace {

struct Preset {
  bool geometric_update, geometric_reset, iterated;
};

const std::map<std::string, Preset>& presets() {
  static const std::map<std::string, Preset> table = {
      {"ekf", {false, false, false}},          {"gekf", {true, true, false}},
      {"gitekf", {true, true, true}},          {"itekf", {false, false, true}},
      {"gekf-update", {true, false, false}},   {"gekf-reset", {false, true, false}},
      {"gitekf-update", {true, false, true}},
  };
  return table;
}

void require_finite(const Matrix& m, const char* what) {
  if (!m.allFinite()) throw NumericalError(std::string(what) + ": non-finite entries");
}

// Quantities shared by the gain and information forms.
struct Linearization {
  Vector m;          // prior mean in the chart at ξ̌
  Matrix prior_cov;  // Σ†
  Matrix C;
  Matrix R_dag;      // R†
  Matrix pull;       // J₁⁻¹J₂ on the output manifold (identity when classical)
  Vector r;
};

Linearization linearize(const FilterState& s, const Matrix& y, const MeasurementModel& model, const Matrix& lin,
                        bool geometric, JacobianMode mode) {
  const Geometry& gs = *model.state_geometry;
  const Geometry& go = *model.output_geometry;
  gs.check_point(s.estimate, "update");
  go.check_point(y, "update");
  Linearization L;
  L.m = gs.log(lin, s.estimate);
  if (geometric && !L.m.isZero(0)) {
    const Matrix Ji = jacobian_tangential_inverse_at(gs, lin, L.m, mode).map;
    L.prior_cov = covariance_pushforward(Ji, s.cov);
  } else {
    L.prior_cov = s.cov;
  }
  const Matrix y_lin = model.h(lin);
  L.r = go.log(y_lin, y);
  L.C = model.C ? model.C(lin) : fd_measurement_jacobian(model, lin);
  require_dim(L.C.rows(), go.dim(), "measurement Jacobian rows");
  require_dim(L.C.cols(), gs.dim(), "measurement Jacobian cols");
  if (geometric) {
    const Matrix J1 = jacobian_positional_at(go, y_lin, L.r, mode).map;
    const Matrix J2 = jacobian_tangential_at(go, y_lin, L.r, mode).map;
    Eigen::FullPivLU<Matrix> lu(J1);
    if (!lu.isInvertible()) throw NumericalError("update: positional Jacobian is singular");
    L.pull = lu.solve(J2);
    L.R_dag = covariance_pushforward(L.pull, model.R);
  } else {
    L.pull = Matrix::Identity(go.dim(), go.dim());
    L.R_dag = model.R;
  }
  return L;
}

}  // namespace

FilterVariant variant_from_name(const std::string& name) {
  const auto it = presets().find(name);
  if (it == presets().end())
    throw ConfigError("unknown filter variant '" + name +
                      "' (expected ekf, gekf, gitekf, itekf, gekf-update, gekf-reset or gitekf-update)");
  FilterVariant v;
  v.name = name;
  v.geometric_update = it->second.geometric_update;
  v.geometric_reset = it->second.geometric_reset;
  v.iterated = it->second.iterated;
  return v;
}

const std::vector<std::string>& variant_names() {
  static const std::vector<std::string> names = {"ekf",         "gekf",        "gitekf",       "itekf",
                                                 "gekf-update", "gekf-reset",  "gitekf-update"};
  return names;
}

Matrix fd_error_transition(const SystemModel& model, const Matrix& xi, const Vector& u, double h) {
  const Geometry& g = *model.geometry;
  const Matrix next = model.F(xi, u);
  const int m = g.dim();
  Matrix A(m, m);
  for (int i = 0; i < m; ++i) {
    const Vector e = h * Vector::Unit(m, i);
    A.col(i) = (g.log(next, model.F(g.exp(xi, e), u)) - g.log(next, model.F(g.exp(xi, Vector(-e)), u))) / (2 * h);
  }
  return A;
}

Matrix fd_measurement_jacobian(const MeasurementModel& model, const Matrix& xi, double h) {
  const Geometry& gs = *model.state_geometry;
  const Geometry& go = *model.output_geometry;
  const Matrix y = model.h(xi);
  Matrix C(go.dim(), gs.dim());
  for (int i = 0; i < gs.dim(); ++i) {
    const Vector e = h * Vector::Unit(gs.dim(), i);
    C.col(i) = (go.log(y, model.h(gs.exp(xi, e))) - go.log(y, model.h(gs.exp(xi, Vector(-e))))) / (2 * h);
  }
  return C;
}

FilterState propagate(const FilterState& s, const Vector& u, const SystemModel& model, const Matrix* noise_free_next) {
  const Geometry& g = *model.geometry;
  g.check_point(s.estimate, "propagate");
  require_dim(s.cov.rows(), g.dim(), "propagate covariance");
  const Matrix next = g.project(model.F(s.estimate, u));
  const Matrix A = model.A ? model.A(s.estimate, u) : fd_error_transition(model, s.estimate, u);
  require_finite(A, "propagate: transition Jacobian");
  Matrix Q = Matrix::Zero(g.dim(), g.dim());
  if (model.Q_P.size() > 0) Q += model.Q_P;
  if (model.Q_I.size() > 0) {
    if (!model.B) throw UnsupportedError("propagate: input noise given without an input Jacobian");
    Q += covariance_pushforward(model.B(s.estimate, u), model.Q_I);
  }
  if (model.transport_process_noise && noise_free_next) {
    const Matrix Ji = jacobian_tangential_inverse(g, next, *noise_free_next).map;
    Q = covariance_pushforward(Ji, Q);
  }
  FilterState out{next, symmetrize(A * s.cov * A.transpose() + Q), s.k + 1};
  require_finite(out.cov, "propagate: covariance");
  return out;
}

UpdateResult update_at(const FilterState& s, const Matrix& y, const MeasurementModel& model, const Matrix& lin_point,
                       bool geometric, JacobianMode mode) {
  const Linearization L = linearize(s, y, model, lin_point, geometric, mode);
  const Matrix S = symmetrize(L.C * L.prior_cov * L.C.transpose() + L.R_dag);
  Eigen::LLT<Matrix> llt(S);
  if (llt.info() != Eigen::Success || !S.allFinite())
    throw NumericalError("update: innovation covariance is not invertible");
  const double rcond = llt.rcond();
  if (!(rcond > 1e-15))
    throw NumericalError("update: innovation covariance is ill-conditioned (condition number " +
                         std::to_string(1 / rcond) + ")");
  const Matrix K = llt.solve(L.C * L.prior_cov).transpose();
  const int m = static_cast<int>(L.m.size());
  const Matrix IKC = Matrix::Identity(m, m) - K * L.C;

  UpdateResult out;
  out.mean = L.m + K * (L.r - L.C * L.m);
  out.cov = symmetrize(IKC * L.prior_cov * IKC.transpose() + K * L.R_dag * K.transpose());
  out.prior_cov = L.prior_cov;
  out.gain = K;
  out.residual = L.r;
  out.innovation_cond = 1 / rcond;
  out.lin_point = lin_point;
  require_finite(out.cov, "update: posterior covariance");
  return out;
}

UpdateResult update(const FilterState& s, const Matrix& y, const MeasurementModel& model, bool geometric,
                    JacobianMode mode) {
  return update_at(s, y, model, s.estimate, geometric, mode);
}

UpdateResult update_at_information(const FilterState& s, const Matrix& y, const MeasurementModel& model,
                                   const Matrix& lin_point, bool geometric, JacobianMode mode) {
  const Linearization L = linearize(s, y, model, lin_point, geometric, mode);
  Eigen::LLT<Matrix> prior(L.prior_cov), noise(L.R_dag);
  if (prior.info() != Eigen::Success || noise.info() != Eigen::Success)
    throw NumericalError("update_at_information: covariance is not SPD");
  const int m = static_cast<int>(L.m.size());
  const Matrix info = prior.solve(Matrix::Identity(m, m)) + L.C.transpose() * noise.solve(L.C);
  Eigen::LLT<Matrix> post(symmetrize(info));
  if (post.info() != Eigen::Success) throw NumericalError("update_at_information: information matrix is not SPD");

  UpdateResult out;
  out.cov = symmetrize(post.solve(Matrix::Identity(m, m)));
  out.mean = out.cov * (prior.solve(L.m) + L.C.transpose() * noise.solve(Vector(L.pull * L.r)));
  out.prior_cov = L.prior_cov;
  out.gain = out.cov * L.C.transpose() * noise.solve(Matrix::Identity(L.R_dag.rows(), L.R_dag.cols()));
  out.residual = L.r;
  out.innovation_cond = 1 / post.rcond();
  out.lin_point = lin_point;
  return out;
}

ResetResult reset(const Geometry& g, const Matrix& ref, const Vector& mean, const Matrix& cov, bool geometric,
                  JacobianMode mode) {
  ResetResult out;
  out.beyond_chart = !g.within_injectivity(mean);
  out.state.estimate = g.project(g.exp(ref, mean));
  out.state.cov = geometric ? covariance_pushforward(jacobian_tangential_at(g, ref, mean, mode).map, cov)
                            : symmetrize(cov);
  return out;
}

IteratedResult iterated_update(const FilterState& s, const Matrix& y, const MeasurementModel& model,
                               const FilterVariant& variant) {
  if (variant.max_iters < 1) throw ConfigError("iterated_update: max_iters must be >= 1");
  const Geometry& g = *model.state_geometry;
  IteratedResult out;
  Matrix lin = s.estimate;
  for (int i = 0; i < variant.max_iters; ++i) {
    out.last = update_at(s, y, model, lin, variant.geometric_update, variant.jacobian_mode);
    const double n = out.last.mean.norm();
    out.step_norms.push_back(n);
    out.iterations = i;
    if (n < variant.iter_tol) {
      out.converged = true;
      break;
    }
    const auto& t = out.step_norms;
    if (i >= 3 && t[i] > t[i - 1] && t[i - 1] > t[i - 2] && t[i - 2] > t[i - 3])
      throw DivergenceError("iterated_update: step norm grew for 3 consecutive iterations", t);
    if (i + 1 == variant.max_iters) break;
    lin = g.project(g.exp(lin, out.last.mean));
  }
  ResetResult r = reset(g, lin, out.last.mean, out.last.cov, variant.geometric_reset, variant.jacobian_mode);
  out.state = std::move(r.state);
  out.state.k = s.k;
  out.beyond_chart = r.beyond_chart;
  return out;
}

StepResult step(const FilterState& s, const Vector& u, const std::optional<Matrix>& y, const SystemModel& system,
                const MeasurementModel& measurement, const FilterVariant& variant) {
  StepResult out;
  FilterState pred = propagate(s, u, system);
  TraceRecord& tr = out.trace;
  if (y) {
    if (variant.iterated) {
      IteratedResult it = iterated_update(pred, *y, measurement, variant);
      out.state = std::move(it.state);
      tr.mean = it.last.mean;
      tr.iterations = it.iterations;
      tr.innovation_cond = it.last.innovation_cond;
      tr.chart_warning = it.beyond_chart;
    } else {
      UpdateResult up = update(pred, *y, measurement, variant.geometric_update, variant.jacobian_mode);
      ResetResult r =
          reset(*system.geometry, pred.estimate, up.mean, up.cov, variant.geometric_reset, variant.jacobian_mode);
      out.state = std::move(r.state);
      tr.mean = up.mean;
      tr.innovation_cond = up.innovation_cond;
      tr.chart_warning = r.beyond_chart;
    }
    out.state.k = pred.k;
  } else {
    out.state = std::move(pred);
  }
  SpdRepair fix = enforce_spd(out.state.cov);
  out.state.cov = std::move(fix.cov);
  tr.spd_repaired = fix.repaired;
  tr.k = out.state.k;
  tr.estimate.assign(out.state.estimate.data(), out.state.estimate.data() + out.state.estimate.size());
  for (int j = 0; j < out.state.cov.cols(); ++j)
    for (int i = 0; i <= j; ++i) tr.cov_upper.push_back(out.state.cov(i, j));
  return out;
}

}  // namespace gekf
