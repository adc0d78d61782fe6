#include "lqfleet/controller.hpp"

#include <cmath>
#include <string>

#include "lqfleet/errors.hpp"

namespace lqfleet {

namespace {

// Copy the lower triangle over the upper one so downstream row/column sums
// agree bitwise. spd_solve of a symmetric system is symmetric only up to
// rounding.
void mirror_lower(Matrix& m) {
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < i; ++j) m(j, i) = m(i, j);
}

Vector row_sums(const Matrix& m) {
  Vector out(m.rows(), 0.0);
  for (int i = 0; i < m.rows(); ++i) {
    double sum = 0.0;
    for (int j = 0; j < m.cols(); ++j) sum += m(i, j);
    out[i] = sum;
  }
  return out;
}

}  // namespace

StepOperators step_operators(const Matrix& P_next, StepMode mode, double c_t,
                             const FleetModel& fleet, const CostSpec& cost) {
  const int m = fleet.m_tot();
  const Matrix BtP = matmul(transpose(fleet.B), P_next);
  StepOperators ops;
  ops.omega = symmetrize(cost.R + matmul(BtP, fleet.B));

  switch (mode.kind) {
    case Mode::None: {
      ops.gamma_mat = spd_solve(ops.omega, Matrix::identity(m));
      mirror_lower(ops.gamma_mat);
      ops.gamma_vec.assign(m, 0.0);
      break;
    }
    case Mode::Hard: {
      if (m == 1) {
        // Single input: the constraint determines u outright. The formulas
        // reduce to Γ = 0, γ = c, but evaluating them leaves cancellation
        // noise, so pin the exact values.
        if (ops.omega(0, 0) <= 0.0) {
          throw NotPositiveDefinite("step_operators: omega not positive");
        }
        ops.gamma_mat = Matrix(1, 1);
        ops.gamma_vec = {c_t};
        break;
      }
      Matrix omega_inv = spd_solve(ops.omega, Matrix::identity(m));
      mirror_lower(omega_inv);
      const Vector y = row_sums(omega_inv);  // Ω⁻¹ 1
      double denom = 0.0;
      for (double v : y) denom += v;  // 1ᵀ Ω⁻¹ 1
      if (denom <= 1e-14) {
        throw DegenerateConstraint("step_operators: 1'inv(omega)1 = " + std::to_string(denom));
      }
      ops.gamma_mat = omega_inv - (1.0 / denom) * outer(y, y);
      ops.gamma_vec = (c_t / denom) * y;
      break;
    }
    case Mode::Soft: {
      Matrix pi = ops.omega;
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) pi(i, j) += mode.eta;
      ops.pi = pi;
      ops.gamma_mat = spd_solve(pi, Matrix::identity(m));
      mirror_lower(ops.gamma_mat);
      ops.gamma_vec = (mode.eta * c_t) * row_sums(ops.gamma_mat);  // eta c_t Π⁻¹ 1
      break;
    }
  }
  return ops;
}

GainSchedule backward_pass(const Scenario& scenario) {
  scenario.validate();
  const FleetModel& fleet = scenario.fleet;
  const CostSpec& cost = scenario.cost;
  const int T = scenario.horizon;
  const Matrix At = transpose(fleet.A);
  const Matrix Bt = transpose(fleet.B);

  GainSchedule out;
  out.schedule = scenario.schedule;
  out.P.resize(T + 1);
  out.s.resize(T + 1);
  out.q.assign(T + 1, 0.0);
  out.K.resize(T);
  out.d.resize(T);

  const Vector& rT = cost.refs[T];
  out.P[T] = symmetrize(cost.Q_T);
  out.s[T] = -1.0 * matvec(cost.Q_T, rT);
  out.q[T] = dot(rT, matvec(cost.Q_T, rT));

  for (int t = T - 1; t >= 0; --t) {
    const Matrix& P_next = out.P[t + 1];
    const Vector& s_next = out.s[t + 1];
    const StepMode mode = scenario.schedule.modes[t];
    const double c_t = scenario.schedule.targets[t];

    const StepOperators ops = step_operators(P_next, mode, c_t, fleet, cost);
    const Matrix BtP = matmul(Bt, P_next);
    const Matrix M = matmul(BtP, fleet.A);  // Bᵀ P_{t+1} A
    const Vector Bts = matvec(Bt, s_next);

    out.K[t] = matmul(ops.gamma_mat, M);
    out.d[t] = ops.gamma_vec - matvec(ops.gamma_mat, Bts);

    out.P[t] = symmetrize(cost.Q + matmul(At, matmul(P_next, fleet.A)) -
                          matmul(transpose(M), out.K[t]));
    // s_t = Aᵀ(s_{t+1} + P_{t+1} B d_t) - Q r_t, with P_{t+1} B = BtPᵀ
    out.s[t] = matvec(At, s_next + matvec(transpose(BtP), out.d[t])) -
               matvec(cost.Q, cost.refs[t]);

    // Value-function constant. The state-independent remainder of the Bellman
    // step is γᵀΩγ + 2 s_{t+1}ᵀB γ - s_{t+1}ᵀB Γ Bᵀs_{t+1} under a hard or
    // absent constraint, and eta c² - γᵀΠγ + the same s-terms when the
    // total-input penalty is folded into the curvature.
    const Vector& r_t = cost.refs[t];
    double q_t = out.q[t + 1] + dot(r_t, matvec(cost.Q, r_t)) + trace_product(fleet.W, P_next);
    q_t += 2.0 * dot(Bts, ops.gamma_vec);
    q_t -= dot(Bts, matvec(ops.gamma_mat, Bts));
    if (mode.kind == Mode::Soft) {
      q_t += mode.eta * c_t * c_t;
      q_t -= dot(ops.gamma_vec, matvec(*ops.pi, ops.gamma_vec));
    } else {
      q_t += dot(ops.gamma_vec, matvec(ops.omega, ops.gamma_vec));
    }
    out.q[t] = q_t;

    if (!all_finite(out.P[t]) || !all_finite(out.s[t]) || !std::isfinite(out.q[t])) {
      throw NonFiniteRecursion("backward_pass: non-finite value terms at step " +
                               std::to_string(t));
    }
  }
  return out;
}

Vector control_at(const GainSchedule& schedule, int t, const Vector& x) {
  if (t < 0 || t >= schedule.horizon()) {
    throw IndexOutOfRange("control_at: step " + std::to_string(t) + " outside [0, " +
                          std::to_string(schedule.horizon() - 1) + "]");
  }
  if (static_cast<int>(x.size()) != schedule.K[t].cols()) {
    throw DimensionMismatch("control_at: state length " + std::to_string(x.size()));
  }
  return schedule.d[t] - matvec(schedule.K[t], x);
}

double predicted_cost(const GainSchedule& schedule, const Vector& x0) {
  if (static_cast<int>(x0.size()) != schedule.P[0].rows()) {
    throw DimensionMismatch("predicted_cost: state length " + std::to_string(x0.size()));
  }
  return dot(x0, matvec(schedule.P[0], x0)) + 2.0 * dot(schedule.s[0], x0) + schedule.q[0];
}

}  // namespace lqfleet
