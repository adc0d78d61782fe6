#include "lqfleet/simulator.hpp"

#include <cmath>
#include <string>

#include "lqfleet/errors.hpp"

namespace lqfleet {

NoiseSampler::NoiseSampler(const Matrix& W) {
  if (W.rows() != W.cols()) throw DimensionMismatch("NoiseSampler: W not square");
  const int n = W.rows();
  const double scale = max_abs(W);
  if (scale == 0.0) {
    zero_ = true;
    return;
  }

  bool diagonal = true;
  for (int i = 0; i < n && diagonal; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && W(i, j) != 0.0) {
        diagonal = false;
        break;
      }

  if (diagonal) {
    diagonal_ = true;
    scale_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double v = W(i, i);
      if (v < -1e-8 * std::max(1.0, scale)) {
        throw NotPSD("NoiseSampler: negative variance on diagonal of W");
      }
      scale_[i] = std::sqrt(std::max(v, 0.0));
    }
    return;
  }

  const SymmetricEigen eig = symmetric_eigen(W);
  const double lmax = std::max(eig.values.back(), 0.0);
  if (eig.values.front() < -1e-8 * std::max(1.0, lmax)) {
    throw NotPSD("NoiseSampler: W has eigenvalue " + std::to_string(eig.values.front()));
  }
  factor_ = eig.vectors;
  for (int j = 0; j < n; ++j) {
    const double root = std::sqrt(std::max(eig.values[j], 0.0));
    for (int i = 0; i < n; ++i) factor_(i, j) *= root;
  }
}

Vector NoiseSampler::draw(std::mt19937_64& rng) const {
  if (zero_) {
    return Vector();  // caller treats empty as "no noise"
  }
  std::normal_distribution<double> unit(0.0, 1.0);
  if (diagonal_) {
    Vector w(scale_.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = scale_[i] * unit(rng);
    return w;
  }
  Vector z(factor_.cols());
  for (double& v : z) v = unit(rng);
  return matvec(factor_, z);
}

std::uint64_t path_seed(std::uint64_t base_seed, int path_index) {
  // SplitMix64 output #path_index of the stream seeded at base_seed.
  std::uint64_t z = base_seed + (static_cast<std::uint64_t>(path_index) + 1) *
                                    0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Vector TrajectoryRecord::total_inputs() const {
  Vector out(inputs.size(), 0.0);
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    double sum = 0.0;
    for (double u : inputs[t]) sum += u;
    out[t] = sum;
  }
  return out;
}

namespace {

TrajectoryRecord run_rollout(const Scenario& scenario, const GainSchedule& schedule,
                             const NoiseSampler* noise, std::uint64_t seed) {
  const int T = scenario.horizon;
  if (schedule.horizon() != T) {
    throw DimensionMismatch("rollout: schedule horizon differs from scenario");
  }
  std::mt19937_64 rng(seed);

  TrajectoryRecord rec;
  rec.states.reserve(T + 1);
  rec.inputs.reserve(T);
  rec.step_costs.resize(T + 1);
  rec.residuals.resize(T);
  rec.states.push_back(scenario.x0);

  Vector x = scenario.x0;
  for (int t = 0; t < T; ++t) {
    const Vector u = control_at(schedule, t, x);
    double total = 0.0;
    for (double ui : u) total += ui;
    rec.residuals[t] = total - scenario.schedule.targets[t];
    rec.step_costs[t] = stage_cost(x, u, t, scenario.cost, scenario.schedule);

    Vector next = matvec(scenario.fleet.A, x) + matvec(scenario.fleet.B, u);
    if (noise != nullptr && !noise->is_zero()) {
      const Vector w = noise->draw(rng);
      for (std::size_t i = 0; i < next.size(); ++i) next[i] += w[i];
    }
    if (!all_finite(next)) {
      throw NonFiniteState("rollout: non-finite state at step " + std::to_string(t + 1));
    }
    rec.inputs.push_back(u);
    rec.states.push_back(next);
    x = std::move(next);
  }
  rec.step_costs[T] = terminal_cost(rec.states[T], scenario.cost);
  rec.total_cost = 0.0;
  for (double c : rec.step_costs) rec.total_cost += c;
  return rec;
}

// Per-path statistics buffered for order-independent aggregation.
struct PathStats {
  double total_cost = 0.0;
  double max_hard_residual = 0.0;
  Vector abs_residual;   // T
  Vector total_input;    // T
  Vector soc_sum0;       // T+1, summed over class-0 agents
  Vector soc_sum1;       // T+1
};

PathStats path_stats(const Scenario& scenario, const GainSchedule& schedule,
                     const NoiseSampler& noise, std::uint64_t seed, int n_class1) {
  const TrajectoryRecord rec = run_rollout(scenario, schedule, &noise, seed);
  const int T = scenario.horizon;
  PathStats st;
  st.total_cost = rec.total_cost;
  st.abs_residual.resize(T);
  st.total_input = rec.total_inputs();
  for (int t = 0; t < T; ++t) {
    st.abs_residual[t] = std::abs(rec.residuals[t]);
    if (scenario.schedule.modes[t].kind == Mode::Hard) {
      st.max_hard_residual = std::max(st.max_hard_residual, st.abs_residual[t]);
    }
  }
  st.soc_sum0.assign(T + 1, 0.0);
  if (n_class1 > 0) st.soc_sum1.assign(T + 1, 0.0);
  const int n_agents = scenario.fleet.n_agents();
  for (int i = 0; i < n_agents; ++i) {
    const int cls = scenario.agent_class.empty() ? 0 : scenario.agent_class[i];
    Vector& dst = (cls == 0) ? st.soc_sum0 : st.soc_sum1;
    const int off = scenario.fleet.state_offset(i);
    for (int t = 0; t <= T; ++t) dst[t] += rec.states[t][off];
  }
  return st;
}

MonteCarloSummary reduce_paths(const std::vector<PathStats>& stats, int T, int n_class0,
                               int n_class1) {
  MonteCarloSummary sum;
  sum.n_paths = static_cast<int>(stats.size());
  const double n = static_cast<double>(sum.n_paths);

  double mean = 0.0;
  bool all_equal = true;
  for (const PathStats& st : stats) {
    mean += st.total_cost;
    all_equal = all_equal && st.total_cost == stats[0].total_cost;
  }
  mean /= n;
  double var = 0.0;
  for (const PathStats& st : stats) {
    const double d = st.total_cost - mean;
    var += d * d;
  }
  sum.mean_cost = mean;
  sum.cost_std_error =
      (sum.n_paths > 1 && !all_equal) ? std::sqrt(var / (n - 1.0)) / std::sqrt(n) : 0.0;

  sum.mean_abs_residual.assign(T, 0.0);
  sum.mean_total_input.assign(T, 0.0);
  sum.mean_soc_class0.assign(T + 1, 0.0);
  if (n_class1 > 0) sum.mean_soc_class1.assign(T + 1, 0.0);
  for (const PathStats& st : stats) {
    sum.max_abs_hard_residual = std::max(sum.max_abs_hard_residual, st.max_hard_residual);
    for (int t = 0; t < T; ++t) {
      sum.mean_abs_residual[t] += st.abs_residual[t];
      sum.mean_total_input[t] += st.total_input[t];
    }
    for (int t = 0; t <= T; ++t) {
      sum.mean_soc_class0[t] += st.soc_sum0[t];
      if (n_class1 > 0) sum.mean_soc_class1[t] += st.soc_sum1[t];
    }
  }
  for (int t = 0; t < T; ++t) {
    sum.mean_abs_residual[t] /= n;
    sum.mean_total_input[t] /= n;
  }
  for (int t = 0; t <= T; ++t) {
    sum.mean_soc_class0[t] /= n * std::max(n_class0, 1);
    if (n_class1 > 0) sum.mean_soc_class1[t] /= n * n_class1;
  }
  return sum;
}

void class_counts(const Scenario& scenario, int* n_class0, int* n_class1) {
  *n_class0 = 0;
  *n_class1 = 0;
  if (scenario.agent_class.empty()) {
    *n_class0 = scenario.fleet.n_agents();
    return;
  }
  for (int cls : scenario.agent_class) (cls == 0 ? *n_class0 : *n_class1) += 1;
}

}  // namespace

TrajectoryRecord rollout(const Scenario& scenario, const GainSchedule& schedule,
                         std::uint64_t seed) {
  const NoiseSampler noise(scenario.fleet.W);
  return run_rollout(scenario, schedule, &noise, seed);
}

TrajectoryRecord rollout_deterministic(const Scenario& scenario, const GainSchedule& schedule) {
  return run_rollout(scenario, schedule, nullptr, 0);
}

MonteCarloSummary monte_carlo(const Scenario& scenario, const GainSchedule& schedule, int n_paths,
                              std::uint64_t base_seed) {
  if (n_paths < 1) throw ValidationError("monte_carlo: n_paths must be >= 1");
  const NoiseSampler noise(scenario.fleet.W);
  int n_class0 = 0, n_class1 = 0;
  class_counts(scenario, &n_class0, &n_class1);

  std::vector<PathStats> stats(n_paths);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_paths; ++i) {
    stats[i] = path_stats(scenario, schedule, noise, path_seed(base_seed, i), n_class1);
  }
  return reduce_paths(stats, scenario.horizon, n_class0, n_class1);
}

MonteCarloSummary monte_carlo_serial(const Scenario& scenario, const GainSchedule& schedule,
                                     int n_paths, std::uint64_t base_seed) {
  if (n_paths < 1) throw ValidationError("monte_carlo: n_paths must be >= 1");
  const NoiseSampler noise(scenario.fleet.W);
  int n_class0 = 0, n_class1 = 0;
  class_counts(scenario, &n_class0, &n_class1);

  std::vector<PathStats> stats(n_paths);
  for (int i = 0; i < n_paths; ++i) {
    stats[i] = path_stats(scenario, schedule, noise, path_seed(base_seed, i), n_class1);
  }
  return reduce_paths(stats, scenario.horizon, n_class0, n_class1);
}

}  // namespace lqfleet
