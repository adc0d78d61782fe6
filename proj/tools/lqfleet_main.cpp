#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqfleet/commands.hpp"
#include "lqfleet/errors.hpp"
#include "lqfleet/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"lqfleet: constrained linear-quadratic control of battery fleets"};
  app.set_version_flag("--version", lqfleet::kVersion);
  app.require_subcommand(1);

  lqfleet::SynthesizeOptions synth_opt;
  CLI::App* synth = app.add_subcommand("synthesize", "Synthesize gains for a scenario file");
  synth->add_option("--scenario", synth_opt.scenario_file, "Scenario JSON file")->required();
  synth->add_option("--out", synth_opt.out_dir, "Output directory")->required();

  lqfleet::SimulateOptions sim_opt;
  CLI::App* sim = app.add_subcommand("simulate", "Synthesize then run Monte Carlo rollouts");
  sim->add_option("--scenario", sim_opt.scenario_file, "Scenario JSON file")->required();
  sim->add_option("--paths", sim_opt.paths, "Number of Monte Carlo paths")
      ->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_opt.seed, "Noise base seed (default: scenario seed)");
  sim->add_option("--out", sim_opt.out_dir, "Output directory")->required();
  sim->add_option("--dump-paths", sim_opt.dump_paths, "Per-path trajectory CSVs to write");

  lqfleet::VerifyOptions verify_opt;
  CLI::App* verify = app.add_subcommand("verify", "Randomized DP-vs-QP verification campaign");
  verify->add_option("--count", verify_opt.count, "Number of random instances")
      ->check(CLI::NonNegativeNumber);
  verify->add_option("--seed", verify_opt.seed, "Campaign base seed");

  lqfleet::BenchOptions bench_opt;
  CLI::App* bench = app.add_subcommand("bench", "Backward-pass and KKT timing sweeps");
  bench->add_option("--t-list", bench_opt.t_list, "Horizons to time (comma separated)")
      ->required()
      ->delimiter(',');
  bench->add_option("--n-list", bench_opt.n_list, "Fleet sizes to time (comma separated)")
      ->required()
      ->delimiter(',');
  bench->add_option("--reps", bench_opt.reps, "Repetitions per point")
      ->check(CLI::PositiveNumber);
  bench->add_option("--kkt-agents", bench_opt.kkt_agents, "Fleet size for the KKT baseline");
  bench->add_option("--out", bench_opt.out_dir, "Output directory")->required();

  lqfleet::DemoOptions demo_opt;
  CLI::App* demo = app.add_subcommand("demo", "Residential-battery demand-response demo");
  demo->add_option("--variant", demo_opt.variant, "hard | intermittent | switched")->required();
  demo->add_option("--eta", demo_opt.eta, "Soft penalty weight (switched variant)");
  demo->add_option("--seed", demo_opt.seed, "Fleet/noise seed");
  demo->add_option("--paths", demo_opt.paths, "Monte Carlo paths")->check(CLI::PositiveNumber);
  demo->add_option("--out", demo_opt.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (synth->parsed()) return lqfleet::cmd_synthesize(synth_opt);
    if (sim->parsed()) return lqfleet::cmd_simulate(sim_opt);
    if (verify->parsed()) return lqfleet::cmd_verify(verify_opt);
    if (bench->parsed()) return lqfleet::cmd_bench(bench_opt);
    if (demo->parsed()) return lqfleet::cmd_demo(demo_opt);
  } catch (const lqfleet::InputError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  } catch (const lqfleet::NumericalError& err) {
    std::fprintf(stderr, "numerical error: %s\n", err.what());
    return 2;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 2;
  }
  return 0;
}
