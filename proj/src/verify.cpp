#include "lqfleet/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "lqfleet/controller.hpp"
#include "lqfleet/errors.hpp"
#include "lqfleet/oracle.hpp"
#include "lqfleet/simulator.hpp"

namespace lqfleet {

namespace {

Matrix random_psd(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  Matrix l(n, n);
  for (double& v : l.data()) v = entry(rng);
  return symmetrize((1.0 / n) * matmul(l, transpose(l)));
}

double frobenius(const Matrix& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

}  // namespace

Scenario random_instance(std::uint64_t seed, ModePolicy policy) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> agents_dist(1, 5);
  std::uniform_int_distribution<int> dim_dist(1, 2);
  std::uniform_int_distribution<int> horizon_dist(1, 10);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  std::uniform_real_distribution<double> a_norm(0.3, 1.2);
  std::uniform_real_distribution<double> r_diag(0.1, 2.0);
  std::uniform_real_distribution<double> w_diag(0.0, 0.5);
  std::uniform_real_distribution<double> target(-2.0, 2.0);
  std::uniform_real_distribution<double> eta_dist(0.0, 5.0);
  std::uniform_int_distribution<int> mode_dist(0, 2);

  const int n_agents = agents_dist(rng);
  const int T = horizon_dist(rng);

  std::vector<Matrix> a_blocks, b_blocks;
  for (int i = 0; i < n_agents; ++i) {
    const int dx = dim_dist(rng);
    const int du = dim_dist(rng);
    Matrix a(dx, dx);
    for (double& v : a.data()) v = entry(rng);
    const double norm = frobenius(a);
    if (norm > 0.0) a = (a_norm(rng) / norm) * a;  // spectral radius <= 1.2
    Matrix b(dx, du);
    for (double& v : b.data()) v = entry(rng);
    a_blocks.push_back(std::move(a));
    b_blocks.push_back(std::move(b));
  }

  Scenario scenario;
  {
    int n_tot = 0;
    for (const Matrix& a : a_blocks) n_tot += a.rows();
    Vector w(n_tot);
    for (double& v : w) v = w_diag(rng);
    scenario.fleet = make_fleet(a_blocks, b_blocks, Matrix::diagonal(w));
  }
  const int n = scenario.fleet.n_tot();
  const int m = scenario.fleet.m_tot();

  scenario.horizon = T;
  scenario.seed = seed;
  scenario.cost.Q = random_psd(n, rng);
  scenario.cost.Q_T = random_psd(n, rng);
  {
    Vector r(m);
    for (double& v : r) v = r_diag(rng);
    scenario.cost.R = Matrix::diagonal(r);
  }
  scenario.cost.refs.resize(T + 1);
  for (Vector& ref : scenario.cost.refs) {
    ref.resize(n);
    for (double& v : ref) v = entry(rng);
  }
  scenario.x0.resize(n);
  for (double& v : scenario.x0) v = entry(rng);

  scenario.schedule.modes.resize(T);
  scenario.schedule.targets.resize(T);
  for (int t = 0; t < T; ++t) {
    scenario.schedule.targets[t] = target(rng);
    switch (policy) {
      case ModePolicy::HardOnly:
        scenario.schedule.modes[t] = {Mode::Hard, 0.0};
        break;
      case ModePolicy::NoneOnly:
        scenario.schedule.modes[t] = {Mode::None, 0.0};
        break;
      case ModePolicy::SoftOnly:
        scenario.schedule.modes[t] = {Mode::Soft, eta_dist(rng)};
        break;
      case ModePolicy::Mixed: {
        const int kind = mode_dist(rng);
        if (kind == 0) {
          scenario.schedule.modes[t] = {Mode::Hard, 0.0};
        } else if (kind == 1) {
          scenario.schedule.modes[t] = {Mode::Soft, eta_dist(rng)};
        } else {
          scenario.schedule.modes[t] = {Mode::None, 0.0};
        }
        break;
      }
    }
  }
  return scenario;
}

namespace {

struct InstanceResult {
  double open_loop_deviation = 0.0;
  double hard_row_sum = 0.0;
  double gamma_target_error = 0.0;
  double idempotence_error = 0.0;
  double min_P_eigenvalue = 0.0;
  double multiplier_error = 0.0;
  std::uint64_t seed = 0;
  std::string failure;  // empty when the instance passed
};

InstanceResult check_instance(std::uint64_t seed, ModePolicy policy,
                              const VerifyTolerances& tol) {
  InstanceResult res;
  res.seed = seed;
  const Scenario scenario = random_instance(seed, policy);
  const GainSchedule schedule = backward_pass(scenario);

  const DeviationReport dev = open_loop_compare(scenario, schedule);
  res.open_loop_deviation = dev.max_deviation();

  res.min_P_eigenvalue = min_eigenvalue_symmetric(schedule.P[0]);
  for (int t = 1; t <= scenario.horizon; ++t) {
    res.min_P_eigenvalue =
        std::min(res.min_P_eigenvalue, min_eigenvalue_symmetric(schedule.P[t]));
  }

  // Projection algebra at hard steps, recomputed from the stored P sequence.
  const int m = scenario.fleet.m_tot();
  for (int t = 0; t < scenario.horizon; ++t) {
    if (scenario.schedule.modes[t].kind != Mode::Hard) continue;
    const double c_t = scenario.schedule.targets[t];
    const StepOperators ops =
        step_operators(schedule.P[t + 1], scenario.schedule.modes[t], c_t, scenario.fleet,
                       scenario.cost);
    double row_sum_inf = 0.0;
    double gamma_sum = 0.0;
    for (int j = 0; j < m; ++j) {
      double col = 0.0;
      for (int i = 0; i < m; ++i) col += ops.gamma_mat(i, j);
      row_sum_inf = std::max(row_sum_inf, std::abs(col));
    }
    for (double v : ops.gamma_vec) gamma_sum += v;
    res.hard_row_sum = std::max(res.hard_row_sum, row_sum_inf);
    res.gamma_target_error =
        std::max(res.gamma_target_error,
                 std::abs(gamma_sum - c_t) / std::max(1.0, std::abs(c_t)));

    const Matrix gog = matmul(ops.gamma_mat, matmul(ops.omega, ops.gamma_mat));
    const double denom = std::max(max_abs(ops.gamma_mat), 1e-300);
    res.idempotence_error =
        std::max(res.idempotence_error, max_abs(gog - ops.gamma_mat) / denom);
  }

  // Sum-row multipliers: the stacked solution carries twice the per-step
  // multiplier-over-two because the stacked objective is ½-scaled.
  bool any_hard = false;
  for (int t = 0; t < scenario.horizon; ++t)
    any_hard = any_hard || scenario.schedule.modes[t].kind == Mode::Hard;
  if (any_hard) {
    const StackedQP qp = build_stacked_qp(scenario);
    const KKTSolution sol = solve_kkt(qp);
    const TrajectoryRecord rec = rollout_deterministic(scenario, schedule);
    const Matrix Bt = transpose(scenario.fleet.B);
    for (int t = 0; t < scenario.horizon; ++t) {
      if (scenario.schedule.modes[t].kind != Mode::Hard) continue;
      const Vector f = matvec(matmul(Bt, schedule.P[t + 1]),
                              matvec(scenario.fleet.A, rec.states[t])) +
                       matvec(Bt, schedule.s[t + 1]);
      const Vector omega_inv_one =
          spd_solve(symmetrize(scenario.cost.R + matmul(matmul(Bt, schedule.P[t + 1]),
                                                        scenario.fleet.B)),
                    Vector(m, 1.0));
      double denom = 0.0, num = 0.0;
      for (int i = 0; i < m; ++i) denom += omega_inv_one[i];
      num = dot(omega_inv_one, f);
      const double half_lambda_dp = -(num + scenario.schedule.targets[t]) / denom;
      const double half_lambda_qp = 0.5 * qp_hard_multiplier(qp, sol, t);
      res.multiplier_error =
          std::max(res.multiplier_error, std::abs(half_lambda_qp - half_lambda_dp) /
                                             std::max(1.0, std::abs(half_lambda_dp)));
    }
  }

  if (res.open_loop_deviation > tol.open_loop) {
    res.failure = "open-loop deviation " + std::to_string(res.open_loop_deviation);
  } else if (res.hard_row_sum > tol.hard_row_sum) {
    res.failure = "projection row sum " + std::to_string(res.hard_row_sum);
  } else if (res.gamma_target_error > tol.gamma_target) {
    res.failure = "gamma target error " + std::to_string(res.gamma_target_error);
  } else if (res.idempotence_error > tol.idempotence) {
    res.failure = "idempotence error " + std::to_string(res.idempotence_error);
  } else if (res.min_P_eigenvalue < tol.min_eigenvalue) {
    res.failure = "P eigenvalue " + std::to_string(res.min_P_eigenvalue);
  } else if (res.multiplier_error > tol.multiplier) {
    res.failure = "multiplier error " + std::to_string(res.multiplier_error);
  }
  return res;
}

}  // namespace

VerificationReport run_verification(int count, std::uint64_t base_seed, ModePolicy policy,
                                    const VerifyTolerances& tol) {
  VerificationReport report;
  report.instances = count;
  if (count <= 0) return report;

  std::vector<InstanceResult> results(count);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < count; ++i) {
    results[i] = check_instance(path_seed(base_seed, i), policy, tol);
  }

  report.min_P_eigenvalue = results[0].min_P_eigenvalue;
  for (const InstanceResult& res : results) {
    if (res.open_loop_deviation > report.max_open_loop_deviation) {
      report.max_open_loop_deviation = res.open_loop_deviation;
      report.worst_deviation_seed = res.seed;
    }
    report.max_hard_row_sum = std::max(report.max_hard_row_sum, res.hard_row_sum);
    report.max_gamma_target_error =
        std::max(report.max_gamma_target_error, res.gamma_target_error);
    report.max_idempotence_error =
        std::max(report.max_idempotence_error, res.idempotence_error);
    report.min_P_eigenvalue = std::min(report.min_P_eigenvalue, res.min_P_eigenvalue);
    report.max_multiplier_error = std::max(report.max_multiplier_error, res.multiplier_error);
    if (!res.failure.empty()) {
      report.failures.push_back("instance seed " + std::to_string(res.seed) + ": " +
                                res.failure);
    }
  }
  return report;
}

}  // namespace lqfleet
