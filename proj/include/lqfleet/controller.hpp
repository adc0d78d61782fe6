#pragma once

#include <optional>

#include "lqfleet/model.hpp"

namespace lqfleet {

// Per-step operators of the constrained Bellman minimization
// min_u |u|²_Ω + 2uᵀf(x), optionally subject to 1ᵀu = c_t or with the
// quadratic total-input penalty folded into the curvature:
//   omega     = R + Bᵀ P_{t+1} B                      (always SPD)
//   pi        = omega + eta 11ᵀ                       (Soft mode only)
//   gamma_mat = response operator: u* = -gamma_mat f + gamma_vec
//   gamma_vec = feedforward offset
// In Hard mode gamma_mat annihilates 1 (1ᵀ gamma_mat = 0) and
// 1ᵀ gamma_vec = c_t, which is what makes the constraint hold pathwise.
struct StepOperators {
  Matrix omega;
  std::optional<Matrix> pi;
  Matrix gamma_mat;
  Vector gamma_vec;
};

StepOperators step_operators(const Matrix& P_next, StepMode mode, double c_t,
                             const FleetModel& fleet, const CostSpec& cost);

// Backward-pass outputs. Value function V_t(x) = xᵀP[t]x + 2 s[t]ᵀx + q[t];
// realized policy u_t = -K[t] x_t + d[t].
struct GainSchedule {
  std::vector<Matrix> P;  // T+1 entries, each n_tot², symmetric PSD
  std::vector<Vector> s;  // T+1 entries, each n_tot
  Vector q;               // T+1 entries
  std::vector<Matrix> K;  // T entries, each m_tot x n_tot
  std::vector<Vector> d;  // T entries, each m_tot
  ConstraintSchedule schedule;  // the modes/targets this was synthesized for

  int horizon() const { return static_cast<int>(K.size()); }
};

// Synthesizes the constrained optimal policy for the scenario: initializes
// P_T = Q_T, s_T = -Q_T r_T, q_T = r_Tᵀ Q_T r_T and recurses backward with
// per-step operators chosen by the constraint mode. Throws NonFiniteRecursion
// if the recursion leaves the representable range.
GainSchedule backward_pass(const Scenario& scenario);

// u_t = -K[t] x + d[t]. Throws IndexOutOfRange / DimensionMismatch.
Vector control_at(const GainSchedule& schedule, int t, const Vector& x);

// Expected total cost from x0 under the synthesized policy:
// x0ᵀ P_0 x0 + 2 s_0ᵀ x0 + q_0.
double predicted_cost(const GainSchedule& schedule, const Vector& x0);

}  // namespace lqfleet
