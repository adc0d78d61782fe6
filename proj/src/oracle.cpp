#include "lqfleet/oracle.hpp"

#include <cmath>
#include <string>

#include "lqfleet/errors.hpp"
#include "lqfleet/simulator.hpp"

namespace lqfleet {

namespace {

// Adds 2*w (the ½zᵀHz convention doubles quadratic coefficients) times the
// given block of a PSD weight into H at (row0, col0).
void add_weight_block(Matrix& H, const Matrix& weight, int row0, int col0, double factor) {
  for (int i = 0; i < weight.rows(); ++i)
    for (int j = 0; j < weight.cols(); ++j) H(row0 + i, col0 + j) += factor * weight(i, j);
}

}  // namespace

StackedQP build_stacked_qp(const Scenario& scenario) {
  scenario.validate();
  const int T = scenario.horizon;
  const int m = scenario.fleet.m_tot();
  const int n = scenario.fleet.n_tot();
  const int dim = T * m + T * n;

  StackedQP qp;
  qp.n_u = m;
  qp.n_x = n;
  qp.horizon = T;
  qp.hard_row.assign(T, -1);
  qp.H = Matrix(dim, dim);
  qp.g.assign(dim, 0.0);

  auto u_off = [&](int t) { return t * m; };
  auto x_off = [&](int t) { return T * m + (t - 1) * n; };  // t in [1, T]

  // Objective. x_0 is fixed, so its stage cost is a constant and is omitted.
  for (int t = 0; t < T; ++t) {
    add_weight_block(qp.H, scenario.cost.R, u_off(t), u_off(t), 2.0);
    if (t >= 1) {
      add_weight_block(qp.H, scenario.cost.Q, x_off(t), x_off(t), 2.0);
      const Vector qr = matvec(scenario.cost.Q, scenario.cost.refs[t]);
      for (int i = 0; i < n; ++i) qp.g[x_off(t) + i] -= 2.0 * qr[i];
    }
    const StepMode mode = scenario.schedule.modes[t];
    if (mode.kind == Mode::Soft) {
      const double c = scenario.schedule.targets[t];
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) qp.H(u_off(t) + i, u_off(t) + j) += 2.0 * mode.eta;
        qp.g[u_off(t) + i] -= 2.0 * mode.eta * c;
      }
    }
  }
  add_weight_block(qp.H, scenario.cost.Q_T, x_off(T), x_off(T), 2.0);
  {
    const Vector qr = matvec(scenario.cost.Q_T, scenario.cost.refs[T]);
    for (int i = 0; i < n; ++i) qp.g[x_off(T) + i] -= 2.0 * qr[i];
  }

  int n_hard = 0;
  for (int t = 0; t < T; ++t)
    if (scenario.schedule.modes[t].kind == Mode::Hard) ++n_hard;

  const int n_rows = T * n + n_hard;
  qp.E = Matrix(n_rows, dim);
  qp.e.assign(n_rows, 0.0);

  // Dynamics rows: x_{t+1} - A x_t - B u_t = 0 (with A x_0 moved to the rhs).
  for (int t = 0; t < T; ++t) {
    const int row0 = t * n;
    for (int i = 0; i < n; ++i) {
      qp.E(row0 + i, x_off(t + 1) + i) = 1.0;
      for (int j = 0; j < m; ++j) qp.E(row0 + i, u_off(t) + j) = -scenario.fleet.B(i, j);
    }
    if (t == 0) {
      const Vector ax0 = matvec(scenario.fleet.A, scenario.x0);
      for (int i = 0; i < n; ++i) qp.e[row0 + i] = ax0[i];
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) qp.E(row0 + i, x_off(t) + j) = -scenario.fleet.A(i, j);
    }
  }

  // Total-input rows at hard steps.
  int row = T * n;
  for (int t = 0; t < T; ++t) {
    if (scenario.schedule.modes[t].kind != Mode::Hard) continue;
    for (int j = 0; j < m; ++j) qp.E(row, u_off(t) + j) = 1.0;
    qp.e[row] = scenario.schedule.targets[t];
    qp.hard_row[t] = row;
    ++row;
  }
  return qp;
}

KKTSolution solve_kkt(const StackedQP& qp) {
  const int dim = qp.H.rows();
  const int n_rows = qp.E.rows();
  const int total = dim + n_rows;

  Matrix kkt(total, total);
  Vector rhs(total, 0.0);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) kkt(i, j) = qp.H(i, j);
    rhs[i] = -qp.g[i];
  }
  for (int r = 0; r < n_rows; ++r) {
    for (int j = 0; j < dim; ++j) {
      kkt(dim + r, j) = qp.E(r, j);
      kkt(j, dim + r) = qp.E(r, j);
    }
    rhs[dim + r] = qp.e[r];
  }

  Vector solution;
  try {
    solution = lu_solve(kkt, rhs);
  } catch (const SingularMatrix& err) {
    throw SingularKKT(std::string("solve_kkt: ") + err.what());
  }

  KKTSolution sol;
  sol.z.assign(solution.begin(), solution.begin() + dim);
  sol.multipliers.assign(solution.begin() + dim, solution.end());
  return sol;
}

Vector qp_input(const StackedQP& qp, const KKTSolution& sol, int t) {
  if (t < 0 || t >= qp.horizon) throw IndexOutOfRange("qp_input: step out of range");
  const int off = t * qp.n_u;
  return Vector(sol.z.begin() + off, sol.z.begin() + off + qp.n_u);
}

Vector qp_state(const StackedQP& qp, const KKTSolution& sol, int t) {
  if (t < 1 || t > qp.horizon) throw IndexOutOfRange("qp_state: step out of range");
  const int off = qp.horizon * qp.n_u + (t - 1) * qp.n_x;
  return Vector(sol.z.begin() + off, sol.z.begin() + off + qp.n_x);
}

double qp_hard_multiplier(const StackedQP& qp, const KKTSolution& sol, int t) {
  if (t < 0 || t >= qp.horizon || qp.hard_row[t] < 0) {
    throw IndexOutOfRange("qp_hard_multiplier: no hard constraint at step " + std::to_string(t));
  }
  return sol.multipliers[qp.hard_row[t]];
}

std::vector<Matrix> unconstrained_riccati(const Scenario& scenario) {
  const Matrix& A = scenario.fleet.A;
  const Matrix& B = scenario.fleet.B;
  const Matrix At = transpose(A);
  const Matrix Bt = transpose(B);
  const int T = scenario.horizon;

  std::vector<Matrix> P(T + 1);
  P[T] = symmetrize(scenario.cost.Q_T);
  for (int t = T - 1; t >= 0; --t) {
    const Matrix BtP = matmul(Bt, P[t + 1]);
    const Matrix gain_curvature = symmetrize(scenario.cost.R + matmul(BtP, B));
    const Matrix M = matmul(BtP, A);
    const Matrix X = spd_solve(gain_curvature, M);
    P[t] = symmetrize(scenario.cost.Q + matmul(At, matmul(P[t + 1], A)) -
                      matmul(transpose(M), X));
    if (!all_finite(P[t])) {
      throw NonFiniteRecursion("unconstrained_riccati: non-finite P at step " +
                               std::to_string(t));
    }
  }
  return P;
}

DeviationReport open_loop_compare(const Scenario& scenario, const GainSchedule& schedule) {
  const TrajectoryRecord rec = rollout_deterministic(scenario, schedule);
  const StackedQP qp = build_stacked_qp(scenario);
  const KKTSolution sol = solve_kkt(qp);

  DeviationReport report;
  for (int t = 0; t < scenario.horizon; ++t) {
    const Vector u_qp = qp_input(qp, sol, t);
    report.max_input_deviation =
        std::max(report.max_input_deviation, max_abs(rec.inputs[t] - u_qp));
    const Vector x_qp = qp_state(qp, sol, t + 1);
    report.max_state_deviation =
        std::max(report.max_state_deviation, max_abs(rec.states[t + 1] - x_qp));
  }
  return report;
}

}  // namespace lqfleet
