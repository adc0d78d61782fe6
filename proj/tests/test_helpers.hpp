#pragma once

#include <random>

#include "lqfleet/model.hpp"

namespace lqfleet::testing {

// Scalar-agent scenario with identical per-agent parameters and constant
// references; the workhorse for hand-checked examples.
inline Scenario scalar_scenario(int n_agents, int T, double a, double b, double q, double r,
                                double q_terminal, double ref, double noise_var = 0.0) {
  Scenario scenario;
  std::vector<Matrix> a_blocks(n_agents, Matrix(1, 1, {a}));
  std::vector<Matrix> b_blocks(n_agents, Matrix(1, 1, {b}));
  scenario.fleet = make_fleet(a_blocks, b_blocks,
                              Matrix::diagonal(Vector(n_agents, noise_var)));
  scenario.horizon = T;
  scenario.cost.Q = q * Matrix::identity(n_agents);
  scenario.cost.R = r * Matrix::identity(n_agents);
  scenario.cost.Q_T = q_terminal * Matrix::identity(n_agents);
  scenario.cost.refs.assign(T + 1, Vector(n_agents, ref));
  scenario.schedule.modes.assign(T, StepMode{Mode::None, 0.0});
  scenario.schedule.targets.assign(T, 0.0);
  scenario.x0.assign(n_agents, 0.0);
  return scenario;
}

inline void set_all_modes(Scenario& scenario, StepMode mode, double target) {
  scenario.schedule.modes.assign(scenario.horizon, mode);
  scenario.schedule.targets.assign(scenario.horizon, target);
}

}  // namespace lqfleet::testing
