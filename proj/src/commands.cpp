#include "lqfleet/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "lqfleet/controller.hpp"
#include "lqfleet/errors.hpp"
#include "lqfleet/oracle.hpp"
#include "lqfleet/scenario_io.hpp"
#include "lqfleet/simulator.hpp"
#include "lqfleet/verify.hpp"
#include "lqfleet/version.hpp"

namespace lqfleet {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigParseError("cannot create output directory: " + dir.string());
}

std::string file_hash(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return "";
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a_hex(bytes);
}

void print_warnings(const std::vector<std::string>& warnings) {
  for (const std::string& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

Scenario make_bench_scenario(int T, int n_agents) {
  ScenarioConfig cfg;
  cfg.agents = n_agents;
  cfg.seed = 99991;
  cfg.horizon = T;
  cfg.mode = "hard";
  cfg.solar.type = "synthetic";
  cfg.solar.peak_kw = 50.0;
  cfg.solar.daylight_start = T / 4;
  cfg.solar.daylight_end = std::max(T / 4 + 1, 3 * T / 4);
  return build_scenario(cfg, ".");
}

double median_of(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const std::size_t n = samples.size();
  return n % 2 == 1 ? samples[n / 2] : 0.5 * (samples[n / 2 - 1] + samples[n / 2]);
}

}  // namespace

double median_backward_pass_seconds(int T, int n_agents, int reps) {
  const Scenario scenario = make_bench_scenario(T, n_agents);
  backward_pass(scenario);  // warmup
  std::vector<double> samples;
  samples.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const GainSchedule schedule = backward_pass(scenario);
    const auto stop = std::chrono::steady_clock::now();
    if (schedule.horizon() != T) throw NumericalError("bench: bad schedule");
    samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return median_of(std::move(samples));
}

double median_kkt_seconds(int T, int n_agents, int reps) {
  const Scenario scenario = make_bench_scenario(T, n_agents);
  const StackedQP qp = build_stacked_qp(scenario);
  solve_kkt(qp);  // warmup
  std::vector<double> samples;
  samples.reserve(reps);
  for (int r = 0; r < reps; ++r) {
    const auto start = std::chrono::steady_clock::now();
    const KKTSolution sol = solve_kkt(qp);
    const auto stop = std::chrono::steady_clock::now();
    if (sol.z.empty()) throw NumericalError("bench: empty KKT solution");
    samples.push_back(std::chrono::duration<double>(stop - start).count());
  }
  return median_of(std::move(samples));
}

int cmd_synthesize(const SynthesizeOptions& opt) {
  const Scenario scenario = load_scenario(opt.scenario_file);
  print_warnings(scenario.validate());
  ensure_dir(opt.out_dir);

  const GainSchedule schedule = backward_pass(scenario);
  write_gain_csvs(opt.out_dir, schedule);

  double min_eig = 0.0;
  for (int t = 0; t <= schedule.horizon(); ++t) {
    min_eig = std::min(min_eig, min_eigenvalue_symmetric(schedule.P[t]));
  }
  std::printf("synthesized %d steps, min P eigenvalue %.3e\n", schedule.horizon(), min_eig);

  RunManifest manifest;
  manifest.command = "synthesize";
  manifest.scenario_path = opt.scenario_file.string();
  manifest.scenario_hash = file_hash(opt.scenario_file);
  manifest.seed = scenario.seed;
  manifest.outputs = {"value_function.csv", "gains.csv", "pt_min_eig.csv"};
  write_manifest(opt.out_dir, manifest);
  return 0;
}

int cmd_simulate(const SimulateOptions& opt) {
  const Scenario scenario = load_scenario(opt.scenario_file);
  print_warnings(scenario.validate());
  ensure_dir(opt.out_dir);

  const std::uint64_t seed = opt.seed.value_or(scenario.seed);
  const GainSchedule schedule = backward_pass(scenario);
  const MonteCarloSummary summary = monte_carlo(scenario, schedule, opt.paths, seed);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.scenario_path = opt.scenario_file.string();
  manifest.scenario_hash = file_hash(opt.scenario_file);
  manifest.seed = seed;

  write_mean_trajectory_csv(opt.out_dir / "mean_trajectory.csv", scenario, summary);
  write_summary_csv(opt.out_dir / "summary.csv", summary);
  manifest.outputs = {"mean_trajectory.csv", "summary.csv"};

  const int dump = std::min(opt.dump_paths, opt.paths);
  for (int i = 0; i < dump; ++i) {
    const TrajectoryRecord rec = rollout(scenario, schedule, path_seed(seed, i));
    char name[32];
    std::snprintf(name, sizeof(name), "path_%03d.csv", i);
    write_trajectory_csv(opt.out_dir / name, scenario, rec);
    manifest.outputs.push_back(name);
  }

  std::printf("simulated %d paths: mean cost %.6g (se %.3g), max hard residual %.3e\n",
              summary.n_paths, summary.mean_cost, summary.cost_std_error,
              summary.max_abs_hard_residual);
  write_manifest(opt.out_dir, manifest);
  return 0;
}

int cmd_verify(const VerifyOptions& opt) {
  if (opt.count == 0) {
    std::printf("warning: verification count is 0; nothing checked\n");
    std::printf("verify: PASS (trivially, 0 instances)\n");
    return 0;
  }
  const VerificationReport report = run_verification(opt.count, opt.seed, ModePolicy::Mixed);
  std::printf("verified %d random instances (seed %llu)\n", report.instances,
              static_cast<unsigned long long>(opt.seed));
  std::printf("  max open-loop deviation (vs stacked KKT): %.3e (worst seed %llu)\n",
              report.max_open_loop_deviation,
              static_cast<unsigned long long>(report.worst_deviation_seed));
  std::printf("  max hard-step ||1'Gamma||_inf:            %.3e\n", report.max_hard_row_sum);
  std::printf("  max hard-step |1'gamma - c| (rel):        %.3e\n",
              report.max_gamma_target_error);
  std::printf("  max ||G O G - G||_inf / ||G||_inf:        %.3e\n",
              report.max_idempotence_error);
  std::printf("  min P eigenvalue:                         %.3e\n", report.min_P_eigenvalue);
  std::printf("  max sum-row multiplier mismatch (rel):    %.3e\n",
              report.max_multiplier_error);
  for (const std::string& failure : report.failures) {
    std::printf("  FAIL %s\n", failure.c_str());
  }
  std::printf("verify: %s\n", report.passed() ? "PASS" : "FAIL");
  return report.passed() ? 0 : 3;
}

int cmd_bench(const BenchOptions& opt) {
  if (opt.t_list.empty() || opt.n_list.empty()) {
    throw ConfigParseError("bench: --t-list and --n-list must be nonempty");
  }
  ensure_dir(opt.out_dir);

  std::string csv = "solver,T,N,reps,median_seconds\n";
  for (int T : opt.t_list) {
    for (int N : opt.n_list) {
      const double secs = median_backward_pass_seconds(T, N, opt.reps);
      csv += "dp," + std::to_string(T) + "," + std::to_string(N) + "," +
             std::to_string(opt.reps) + "," + format_double(secs) + "\n";
      std::printf("dp   T=%-5d N=%-4d median %.6f s\n", T, N, secs);
    }
    // Cubic-in-T baseline at a deliberately small fleet; the stacked system
    // is T(m+n)+Tn wide, so moderate N already means a huge dense LU.
    const int kkt_dim = T * (2 * opt.kkt_agents) + T * opt.kkt_agents;
    if (kkt_dim <= 4000) {
      const double secs = median_kkt_seconds(T, opt.kkt_agents, opt.reps);
      csv += "kkt," + std::to_string(T) + "," + std::to_string(opt.kkt_agents) + "," +
             std::to_string(opt.reps) + "," + format_double(secs) + "\n";
      std::printf("kkt  T=%-5d N=%-4d median %.6f s\n", T, opt.kkt_agents, secs);
    } else {
      std::printf("kkt  T=%-5d skipped (KKT dimension %d too large)\n", T, kkt_dim);
    }
  }

  std::ofstream out(opt.out_dir / "bench.csv", std::ios::binary);
  out << csv;

  RunManifest manifest;
  manifest.command = "bench";
  manifest.outputs = {"bench.csv"};
  write_manifest(opt.out_dir, manifest);
  return 0;
}

int cmd_demo(const DemoOptions& opt) {
  const ScenarioConfig cfg = demo_config(opt.variant, opt.eta, opt.seed);
  const Scenario scenario = build_scenario(cfg, ".");
  ensure_dir(opt.out_dir);

  const GainSchedule schedule = backward_pass(scenario);
  const MonteCarloSummary summary = monte_carlo(scenario, schedule, opt.paths, opt.seed);
  const TrajectoryRecord rep_path = rollout(scenario, schedule, path_seed(opt.seed, 0));

  {
    std::ofstream out(opt.out_dir / "scenario.json", std::ios::binary);
    out << serialize_scenario_config(cfg);
  }
  write_mean_trajectory_csv(opt.out_dir / "mean_trajectory.csv", scenario, summary);
  write_summary_csv(opt.out_dir / "summary.csv", summary);
  write_trajectory_csv(opt.out_dir / "path_000.csv", scenario, rep_path);

  // Metrics: the negative-peak and tracking quantities are computed on the
  // Monte Carlo mean trajectory so reruns with one seed are deterministic.
  const int T = scenario.horizon;
  double most_negative = summary.mean_total_input.empty() ? 0.0 : summary.mean_total_input[0];
  for (double v : summary.mean_total_input) most_negative = std::min(most_negative, v);

  double target0 = 0.0, target1 = 0.0;
  for (int i = 0; i < scenario.fleet.n_agents(); ++i) {
    const double tgt = scenario.cost.refs.back()[scenario.fleet.state_offset(i)];
    if (scenario.agent_class[i] == 0) target0 = tgt;
    if (scenario.agent_class[i] == 1) target1 = tgt;
  }
  int night_steps = 0;
  double night_err0 = 0.0, night_err1 = 0.0;
  for (int t = 0; t < T; ++t) {
    if (scenario.schedule.targets[t] != 0.0) continue;
    ++night_steps;
    night_err0 += std::abs(summary.mean_soc_class0[t] - target0);
    night_err1 += std::abs(summary.mean_soc_class1[t] - target1);
  }
  if (night_steps > 0) {
    night_err0 /= night_steps;
    night_err1 /= night_steps;
  }

  std::string metrics = "metric,value\n";
  metrics += "max_abs_hard_residual," + format_double(summary.max_abs_hard_residual) + "\n";
  metrics += "most_negative_total_power," + format_double(most_negative) + "\n";
  metrics +=
      "terminal_soc_error_class0," +
      format_double(std::abs(summary.mean_soc_class0[T] - target0)) + "\n";
  metrics +=
      "terminal_soc_error_class1," +
      format_double(std::abs(summary.mean_soc_class1[T] - target1)) + "\n";
  metrics += "offgen_tracking_error_class0," + format_double(night_err0) + "\n";
  metrics += "offgen_tracking_error_class1," + format_double(night_err1) + "\n";
  {
    std::ofstream out(opt.out_dir / "metrics.csv", std::ios::binary);
    out << metrics;
  }

  std::printf("demo '%s' (eta %.3g, seed %llu, %d paths)\n", opt.variant.c_str(), opt.eta,
              static_cast<unsigned long long>(opt.seed), opt.paths);
  std::printf("  max hard residual:          %.3e\n", summary.max_abs_hard_residual);
  std::printf("  most negative total power:  %.4f kW\n", most_negative);
  std::printf("  terminal SoC error (a/b):   %.3f / %.3f kWh\n",
              std::abs(summary.mean_soc_class0[T] - target0),
              std::abs(summary.mean_soc_class1[T] - target1));

  RunManifest manifest;
  manifest.command = "demo:" + opt.variant;
  manifest.seed = opt.seed;
  manifest.outputs = {"scenario.json", "mean_trajectory.csv", "summary.csv", "path_000.csv",
                      "metrics.csv"};
  write_manifest(opt.out_dir, manifest);
  return 0;
}

}  // namespace lqfleet
