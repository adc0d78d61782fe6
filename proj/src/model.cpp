#include "lqfleet/model.hpp"

#include <cmath>
#include <random>

#include "lqfleet/errors.hpp"

namespace lqfleet {

int FleetModel::n_tot() const {
  int n = 0;
  for (const auto& [dx, du] : agent_dims) n += dx;
  return n;
}

int FleetModel::m_tot() const {
  int m = 0;
  for (const auto& [dx, du] : agent_dims) m += du;
  return m;
}

int FleetModel::state_offset(int agent) const {
  int off = 0;
  for (int i = 0; i < agent; ++i) off += agent_dims[i].first;
  return off;
}

FleetModel make_fleet(const std::vector<Matrix>& A_blocks, const std::vector<Matrix>& B_blocks,
                      const Matrix& W) {
  if (A_blocks.size() != B_blocks.size()) {
    throw DimensionMismatch("make_fleet: A and B block counts differ");
  }
  FleetModel fleet;
  for (std::size_t i = 0; i < A_blocks.size(); ++i) {
    if (A_blocks[i].rows() != A_blocks[i].cols()) {
      throw DimensionMismatch("make_fleet: A block " + std::to_string(i) + " not square");
    }
    if (B_blocks[i].rows() != A_blocks[i].rows()) {
      throw DimensionMismatch("make_fleet: B block " + std::to_string(i) + " row mismatch");
    }
    fleet.agent_dims.emplace_back(A_blocks[i].rows(), B_blocks[i].cols());
  }
  fleet.A = block_diag(A_blocks);
  fleet.B = block_diag(B_blocks);
  fleet.W = W;
  if (W.rows() != fleet.A.rows() || W.cols() != fleet.A.cols()) {
    throw DimensionMismatch("make_fleet: W shape does not match stacked state");
  }
  return fleet;
}

std::vector<std::string> Scenario::validate() const {
  const int n = fleet.n_tot();
  const int m = fleet.m_tot();
  auto fail = [](const std::string& what) { throw ValidationError("scenario: " + what); };

  if (horizon <= 0) fail("empty horizon (T must be >= 1)");
  if (fleet.agent_dims.empty()) fail("no agents");
  if (fleet.A.rows() != n || fleet.A.cols() != n) fail("A is not n_tot x n_tot");
  if (fleet.B.rows() != n || fleet.B.cols() != m) fail("B is not n_tot x m_tot");
  if (fleet.W.rows() != n || fleet.W.cols() != n) fail("W is not n_tot x n_tot");
  if (!all_finite(fleet.A) || !all_finite(fleet.B) || !all_finite(fleet.W)) {
    fail("non-finite entry in system matrices");
  }
  if (cost.Q.rows() != n || cost.Q.cols() != n) fail("Q is not n_tot x n_tot");
  if (cost.Q_T.rows() != n || cost.Q_T.cols() != n) fail("Q_T is not n_tot x n_tot");
  if (cost.R.rows() != m || cost.R.cols() != m) fail("R is not m_tot x m_tot");
  if (static_cast<int>(cost.refs.size()) != horizon + 1) {
    fail("refs must have T+1 entries, got " + std::to_string(cost.refs.size()));
  }
  for (const Vector& r : cost.refs) {
    if (static_cast<int>(r.size()) != n) fail("reference vector with wrong length");
    if (!all_finite(r)) fail("non-finite reference entry");
  }
  if (schedule.horizon() != horizon) fail("schedule length differs from horizon");
  if (static_cast<int>(schedule.targets.size()) != horizon) fail("targets length differs from horizon");
  for (int t = 0; t < horizon; ++t) {
    if (!std::isfinite(schedule.targets[t])) fail("non-finite constraint target");
    if (schedule.modes[t].kind == Mode::Soft && schedule.modes[t].eta < 0.0) {
      fail("negative soft penalty eta at step " + std::to_string(t));
    }
  }
  if (static_cast<int>(x0.size()) != n) fail("x0 length differs from n_tot");
  if (!all_finite(x0)) fail("non-finite initial state");
  if (!agent_class.empty() && static_cast<int>(agent_class.size()) != fleet.n_agents()) {
    fail("agent_class length differs from agent count");
  }

  if (min_eigenvalue_symmetric(symmetrize(fleet.W)) < -1e-8) fail("W not positive semidefinite");
  if (min_eigenvalue_symmetric(symmetrize(cost.Q)) < -1e-8) fail("Q not positive semidefinite");
  if (min_eigenvalue_symmetric(symmetrize(cost.Q_T)) < -1e-8) fail("Q_T not positive semidefinite");
  try {
    spd_solve(cost.R, Matrix::identity(m));
  } catch (const NotPositiveDefinite&) {
    fail("R not positive definite");
  }

  // Aggregate feasibility of hard targets is only warned about, never enforced.
  std::vector<std::string> warnings;
  if (u_min && u_max) {
    const double lo = *u_min * m;
    const double hi = *u_max * m;
    for (int t = 0; t < horizon; ++t) {
      if (schedule.modes[t].kind != Mode::Hard) continue;
      const double c = schedule.targets[t];
      if (c < lo || c > hi) {
        warnings.push_back("hard target c_" + std::to_string(t) + " = " + std::to_string(c) +
                           " outside aggregate input range [" + std::to_string(lo) + ", " +
                           std::to_string(hi) + "]");
      }
    }
  }
  return warnings;
}

SolarProfile synthetic_solar(int T, double peak_kw, int daylight_start, int daylight_end) {
  if (daylight_start < 0 || daylight_start >= daylight_end || daylight_end > T) {
    throw InvalidWindow("synthetic_solar: need 0 <= start < end <= T");
  }
  if (peak_kw < 0.0) throw InvalidWindow("synthetic_solar: negative peak");
  SolarProfile profile;
  profile.samples.assign(T, 0.0);
  const double width = static_cast<double>(daylight_end - daylight_start);
  for (int t = daylight_start; t < daylight_end; ++t) {
    profile.samples[t] = peak_kw * std::sin(M_PI * (t - daylight_start) / width);
  }
  return profile;
}

ConstraintSchedule schedule_from_profile(const SolarProfile& profile, StepMode off_mode) {
  ConstraintSchedule schedule;
  schedule.targets = profile.samples;
  schedule.modes.reserve(profile.samples.size());
  for (double c : profile.samples) {
    schedule.modes.push_back(c != 0.0 ? StepMode{Mode::Hard, 0.0} : off_mode);
  }
  return schedule;
}

SampledFleet sample_fleet(int n_agents, std::uint64_t seed, const FleetParams& params) {
  if (n_agents < 1) throw ValidationError("sample_fleet: need at least one agent");
  if (params.class_soc_targets.empty()) {
    throw ValidationError("sample_fleet: need at least one class target");
  }

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> a_dist(params.a_min, params.a_max);
  std::uniform_real_distribution<double> soc_dist(params.initial_soc_min,
                                                  params.initial_soc_max);

  SampledFleet out;
  std::vector<Matrix> a_blocks, b_blocks;
  a_blocks.reserve(n_agents);
  b_blocks.reserve(n_agents);
  out.x0.resize(n_agents);
  out.target.resize(n_agents);
  out.agent_class.resize(n_agents);

  // Even class split; earlier classes absorb the remainder.
  const int k = static_cast<int>(params.class_soc_targets.size());
  std::vector<int> class_of(n_agents);
  int idx = 0;
  for (int c = 0; c < k; ++c) {
    const int count = n_agents / k + (c < n_agents % k ? 1 : 0);
    for (int j = 0; j < count; ++j) class_of[idx++] = c;
  }

  for (int i = 0; i < n_agents; ++i) {
    // one uniform draw for A_i, one for the initial SoC, in agent order
    a_blocks.push_back(Matrix(1, 1, {a_dist(rng)}));
    b_blocks.push_back(Matrix(1, 1, {1.0}));
    out.x0[i] = soc_dist(rng) * params.capacity_kwh;
    out.agent_class[i] = class_of[i];
    out.target[i] = params.class_soc_targets[class_of[i]] * params.capacity_kwh;
  }
  out.fleet = make_fleet(a_blocks, b_blocks,
                         Matrix::diagonal(Vector(n_agents, params.noise_variance)));
  return out;
}

double stage_cost(const Vector& x, const Vector& u, int t, const CostSpec& cost,
                  const ConstraintSchedule& schedule) {
  if (t < 0 || t >= schedule.horizon()) throw IndexOutOfRange("stage_cost: step out of range");
  const Vector& r = cost.refs[t];
  if (x.size() != r.size()) throw DimensionMismatch("stage_cost: state length");
  const Vector dx = x - r;
  double value = dot(dx, matvec(cost.Q, dx)) + dot(u, matvec(cost.R, u));
  const StepMode& mode = schedule.modes[t];
  if (mode.kind == Mode::Soft) {
    double total = 0.0;
    for (double ui : u) total += ui;
    const double residual = total - schedule.targets[t];
    value += mode.eta * residual * residual;
  }
  return value;
}

double terminal_cost(const Vector& x, const CostSpec& cost) {
  const Vector& r = cost.refs.back();
  if (x.size() != r.size()) throw DimensionMismatch("terminal_cost: state length");
  const Vector dx = x - r;
  return dot(dx, matvec(cost.Q_T, dx));
}

}  // namespace lqfleet
