#pragma once

#include <cstdint>
#include <random>

#include "lqfleet/controller.hpp"

namespace lqfleet {

// Zero-mean Gaussian draws with covariance W. The PSD factor is computed
// once at construction; a diagonal W short-circuits to per-coordinate
// scaling. Throws NotPSD when W has an eigenvalue below -1e-8 relative.
class NoiseSampler {
 public:
  explicit NoiseSampler(const Matrix& W);

  Vector draw(std::mt19937_64& rng) const;
  bool is_zero() const { return zero_; }

 private:
  bool zero_ = false;
  bool diagonal_ = false;
  Vector scale_;   // sqrt of the diagonal, diagonal case
  Matrix factor_;  // V sqrt(Λ), general case
};

// i-th per-path seed for a Monte Carlo batch: the i-th output of a SplitMix64
// stream started at base_seed. Counter-based, so any subset of paths can be
// generated independently and in any order.
std::uint64_t path_seed(std::uint64_t base_seed, int path_index);

struct TrajectoryRecord {
  std::vector<Vector> states;  // T+1 entries
  std::vector<Vector> inputs;  // T entries
  Vector step_costs;           // T+1 entries; index T is the terminal cost
  Vector residuals;            // T entries; 1ᵀu_t - c_t
  double total_cost = 0.0;

  Vector total_inputs() const;  // 1ᵀu_t per step
};

// One closed-loop rollout under the synthesized policy with noise drawn from
// the scenario's W, reproducible from the seed.
TrajectoryRecord rollout(const Scenario& scenario, const GainSchedule& schedule,
                         std::uint64_t seed);

// Same rollout with w ≡ 0 (no RNG consumed).
TrajectoryRecord rollout_deterministic(const Scenario& scenario, const GainSchedule& schedule);

struct MonteCarloSummary {
  int n_paths = 0;
  double mean_cost = 0.0;
  double cost_std_error = 0.0;        // sample std / sqrt(n_paths)
  double max_abs_hard_residual = 0.0;  // over all paths and Hard steps
  Vector mean_abs_residual;            // per step, over all paths
  Vector mean_total_input;             // per step, over all paths
  // Mean per-class state-of-charge trajectory (first state coordinate of each
  // agent), length T+1. class1 is empty when the scenario has a single class.
  Vector mean_soc_class0;
  Vector mean_soc_class1;

  bool operator==(const MonteCarloSummary&) const = default;
};

// n_paths independent rollouts with seeds path_seed(base_seed, i). Paths run
// OpenMP-parallel into a per-path buffer that is reduced in path order, so
// the summary is bit-identical for any worker count.
MonteCarloSummary monte_carlo(const Scenario& scenario, const GainSchedule& schedule,
                              int n_paths, std::uint64_t base_seed);
// Plain-loop reference implementation kept for testing and benchmarking.
MonteCarloSummary monte_carlo_serial(const Scenario& scenario, const GainSchedule& schedule,
                                     int n_paths, std::uint64_t base_seed);

}  // namespace lqfleet
