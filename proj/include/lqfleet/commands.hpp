#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lqfleet {

// Command implementations behind the CLI, callable in-process from tests.
// They throw InputError / NumericalError subclasses; the CLI maps those to
// exit codes 1 and 2. A nonzero return means a verification failure (3).

struct SynthesizeOptions {
  std::filesystem::path scenario_file;
  std::filesystem::path out_dir;
};
int cmd_synthesize(const SynthesizeOptions& opt);

struct SimulateOptions {
  std::filesystem::path scenario_file;
  int paths = 100;
  std::optional<std::uint64_t> seed;  // defaults to the scenario seed
  std::filesystem::path out_dir;
  int dump_paths = 1;
};
int cmd_simulate(const SimulateOptions& opt);

struct VerifyOptions {
  int count = 100;
  std::uint64_t seed = 1;
};
int cmd_verify(const VerifyOptions& opt);

struct BenchOptions {
  std::vector<int> t_list;
  std::vector<int> n_list;
  int reps = 5;
  std::filesystem::path out_dir;
  int kkt_agents = 2;  // KKT baseline fleet size; dense LU only pays at small N
};
int cmd_bench(const BenchOptions& opt);

struct DemoOptions {
  std::string variant = "hard";  // hard | intermittent | switched
  double eta = 1.0;
  std::uint64_t seed = 2024;
  int paths = 100;
  std::filesystem::path out_dir;
};
int cmd_demo(const DemoOptions& opt);

// Timing primitives used by `bench` and the scaling checks: median wall time
// over `reps` runs of one backward pass / one stacked-KKT solve on an
// all-hard scalar-agent scenario of the given size.
double median_backward_pass_seconds(int T, int n_agents, int reps);
double median_kkt_seconds(int T, int n_agents, int reps);

}  // namespace lqfleet
