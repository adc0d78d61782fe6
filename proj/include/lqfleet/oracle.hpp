#pragma once

#include "lqfleet/controller.hpp"

namespace lqfleet {

// Full-horizon deterministic (w ≡ 0) verification problem, written as
//   minimize ½ zᵀH z + gᵀz   subject to   E z = e
// over z = (u_0..u_{T-1}, x_1..x_T). Dynamics are equality rows; hard
// total-input steps add one row each; soft steps fold their penalty into
// H and g. The initial state is eliminated into the right-hand side.
struct StackedQP {
  Matrix H;
  Vector g;
  Matrix E;
  Vector e;
  int n_u = 0;          // m_tot: width of one input block
  int n_x = 0;          // n_tot: width of one state block
  int horizon = 0;      // T
  std::vector<int> hard_row;  // per step: row index of the sum constraint, -1 if none
};

StackedQP build_stacked_qp(const Scenario& scenario);

struct KKTSolution {
  Vector z;
  Vector multipliers;  // dynamics rows first, then hard sum rows in step order
};

// Solves [H Eᵀ; E 0][z; λ] = [-g; e] by dense LU. Throws SingularKKT.
KKTSolution solve_kkt(const StackedQP& qp);

Vector qp_input(const StackedQP& qp, const KKTSolution& sol, int t);
Vector qp_state(const StackedQP& qp, const KKTSolution& sol, int t);  // t in [1, T]
// Multiplier of the total-input row at step t. Throws IndexOutOfRange when
// the step has no hard constraint.
double qp_hard_multiplier(const StackedQP& qp, const KKTSolution& sol, int t);

// Textbook unconstrained Riccati recursion
//   P_t = Q + AᵀP_{t+1}A - AᵀP_{t+1}B (R + BᵀP_{t+1}B)⁻¹ BᵀP_{t+1}A,
// P_T = Q_T, written directly from the formula and sharing nothing with the
// controller's backward pass.
std::vector<Matrix> unconstrained_riccati(const Scenario& scenario);

struct DeviationReport {
  double max_input_deviation = 0.0;
  double max_state_deviation = 0.0;

  double max_deviation() const {
    return max_input_deviation > max_state_deviation ? max_input_deviation
                                                     : max_state_deviation;
  }
};

// Rolls out the synthesized policy with w ≡ 0 and compares the trajectory
// against the stacked-QP optimum. With additive noise and no input bounds the
// feedback gains are noise-independent (noise enters the value function only
// through its constant term), so agreement here certifies the gains.
DeviationReport open_loop_compare(const Scenario& scenario, const GainSchedule& schedule);

}  // namespace lqfleet
