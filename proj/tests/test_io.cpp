#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "lqfleet/commands.hpp"
#include "lqfleet/errors.hpp"
#include "lqfleet/scenario_io.hpp"
#include "lqfleet/simulator.hpp"

using namespace lqfleet;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lqfleet_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary);
  out << text;
}

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string first_line(const fs::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  return line;
}

const char* kScenarioJson = R"({
  "agents": 4,
  "seed": 11,
  "horizon": 6,
  "mode": "switched",
  "eta": 1.5,
  "input_weight": 0.02,
  "solar": {"type": "synthetic", "peak_kw": 12.0, "daylight": [2, 5]}
})";

}  // namespace

TEST_SUITE("io") {

TEST_CASE("scenario config parses and builds consistently") {
  const ScenarioConfig cfg = parse_scenario_config(kScenarioJson);
  CHECK(cfg.agents == 4);
  CHECK(cfg.eta == 1.5);
  CHECK(cfg.solar.daylight_end == 5);

  const Scenario scenario = build_scenario(cfg, ".");
  CHECK(scenario.validate().empty());
  CHECK(scenario.fleet.n_tot() == 4);
  CHECK(scenario.horizon == 6);
  CHECK(scenario.cost.R(0, 0) == 0.02);
  // daylight [2,5): t=2 hits sin(0)=0, so hard steps are 3 and 4
  CHECK(scenario.schedule.modes[2].kind == Mode::Soft);
  CHECK(scenario.schedule.modes[3].kind == Mode::Hard);
  CHECK(scenario.schedule.modes[4].kind == Mode::Hard);
  CHECK(scenario.schedule.modes[0].kind == Mode::Soft);
  CHECK(scenario.schedule.modes[0].eta == 1.5);
}

TEST_CASE("config round trip is identical") {
  const ScenarioConfig cfg = parse_scenario_config(kScenarioJson);
  const ScenarioConfig again = parse_scenario_config(serialize_scenario_config(cfg));
  CHECK(cfg == again);
}

TEST_CASE("malformed configs name the offending field") {
  CHECK_THROWS_WITH_AS(parse_scenario_config("{"), doctest::Contains("not valid JSON"),
                       ConfigParseError);
  CHECK_THROWS_WITH_AS(parse_scenario_config(R"({"seed":1,"horizon":3,"mode":"hard",
      "solar":{"type":"synthetic","peak_kw":1,"daylight":[0,2]}})"),
                       doctest::Contains("agents"), ConfigParseError);
  CHECK_THROWS_WITH_AS(parse_scenario_config(R"({"agents":"fifty","seed":1,"horizon":3,
      "mode":"hard","solar":{"type":"synthetic","peak_kw":1,"daylight":[0,2]}})"),
                       doctest::Contains("agents"), ConfigParseError);
  CHECK_THROWS_WITH_AS(parse_scenario_config(R"({"agents":2,"seed":1,"horizon":3,
      "mode":"sometimes","solar":{"type":"synthetic","peak_kw":1,"daylight":[0,2]}})"),
                       doctest::Contains("mode"), ConfigParseError);
  CHECK_THROWS_WITH_AS(parse_scenario_config(R"({"agents":2,"seed":1,"horizon":3,
      "mode":"hard","solar":{"type":"ftp"}})"),
                       doctest::Contains("solar.type"), ConfigParseError);
}

TEST_CASE("solar csv parsing") {
  const fs::path dir = fresh_dir("solar");
  write_text(dir / "solar.csv",
             "hour,kw\n"
             "0,0.0\n"
             "\n"
             "1, 5.5\n"
             "2,11.0\n"
             "3,0\n");
  const SolarProfile profile = read_solar_csv(dir / "solar.csv", "kw", 4);
  REQUIRE(profile.horizon() == 4);
  CHECK(profile.samples[1] == 5.5);
  CHECK(profile.samples[2] == 11.0);

  // truncation to horizon
  const SolarProfile shorter = read_solar_csv(dir / "solar.csv", "kw", 2);
  CHECK(shorter.horizon() == 2);

  CHECK_THROWS_WITH_AS(read_solar_csv(dir / "solar.csv", "mw", 4),
                       doctest::Contains("column 'mw'"), ConfigParseError);
  CHECK_THROWS_WITH_AS(read_solar_csv(dir / "solar.csv", "kw", 9),
                       doctest::Contains("horizon"), ConfigParseError);

  write_text(dir / "bad.csv", "kw\n1.0\nxyz\n");
  CHECK_THROWS_WITH_AS(read_solar_csv(dir / "bad.csv", "kw", 0),
                       doctest::Contains("non-numeric"), ConfigParseError);
}

TEST_CASE("csv-backed scenario uses the file profile") {
  const fs::path dir = fresh_dir("csvscn");
  write_text(dir / "gen.csv", "kw\n0\n3.5\n0\n");
  write_text(dir / "scn.json", R"({
    "agents": 2, "seed": 3, "horizon": 3, "mode": "intermittent",
    "solar": {"type": "csv", "path": "gen.csv", "column": "kw"}
  })");
  const Scenario scenario = load_scenario(dir / "scn.json");
  CHECK(scenario.schedule.targets[1] == 3.5);
  CHECK(scenario.schedule.modes[1].kind == Mode::Hard);
  CHECK(scenario.schedule.modes[0].kind == Mode::None);
}

TEST_CASE("trajectory csv headers are stable") {
  const ScenarioConfig cfg = parse_scenario_config(R"({
    "agents": 2, "seed": 5, "horizon": 3, "mode": "hard",
    "solar": {"type": "synthetic", "peak_kw": 4.0, "daylight": [0, 3]}
  })");
  const Scenario scenario = build_scenario(cfg, ".");
  const GainSchedule schedule = backward_pass(scenario);
  const TrajectoryRecord rec = rollout(scenario, schedule, 1);
  const MonteCarloSummary summary = monte_carlo(scenario, schedule, 3, 1);

  const fs::path dir = fresh_dir("headers");
  write_trajectory_csv(dir / "path.csv", scenario, rec);
  write_mean_trajectory_csv(dir / "mean.csv", scenario, summary);
  write_summary_csv(dir / "summary.csv", summary);
  write_gain_csvs(dir, schedule);

  CHECK(first_line(dir / "path.csv") ==
        "t,state_0,state_1,input_0,input_1,total_input,c,mode,residual,step_cost");
  CHECK(first_line(dir / "mean.csv") ==
        "t,mean_soc_class0,mean_soc_class1,mean_total_input,mean_abs_residual,c,mode");
  CHECK(first_line(dir / "summary.csv") ==
        "n_paths,mean_cost,cost_std_error,max_abs_hard_residual");
  CHECK(first_line(dir / "value_function.csv") == "t,q,s_norm,P_diag_0,P_diag_1");
  CHECK(first_line(dir / "gains.csv") == "t,row,d,K_0,K_1");
  CHECK(first_line(dir / "pt_min_eig.csv") == "t,min_eigenvalue");

  // terminal row carries states and terminal cost only
  std::ifstream in(dir / "path.csv");
  std::string line, last;
  while (std::getline(in, line))
    if (!line.empty()) last = line;
  CHECK(last.rfind("3,", 0) == 0);
  CHECK(last.find("terminal") != std::string::npos);
}

TEST_CASE("synthesize and simulate commands write reproducible outputs") {
  const fs::path dir = fresh_dir("cmds");
  write_text(dir / "scn.json", kScenarioJson);

  SynthesizeOptions synth;
  synth.scenario_file = dir / "scn.json";
  synth.out_dir = dir / "synth_a";
  CHECK(cmd_synthesize(synth) == 0);
  CHECK(fs::exists(dir / "synth_a" / "value_function.csv"));
  CHECK(fs::exists(dir / "synth_a" / "run_manifest.json"));

  synth.out_dir = dir / "synth_b";
  CHECK(cmd_synthesize(synth) == 0);
  for (const char* name : {"value_function.csv", "gains.csv", "pt_min_eig.csv"}) {
    CHECK(read_text(dir / "synth_a" / name) == read_text(dir / "synth_b" / name));
  }

  SimulateOptions sim;
  sim.scenario_file = dir / "scn.json";
  sim.paths = 5;
  sim.out_dir = dir / "sim_a";
  CHECK(cmd_simulate(sim) == 0);
  sim.out_dir = dir / "sim_b";
  CHECK(cmd_simulate(sim) == 0);
  for (const char* name : {"mean_trajectory.csv", "summary.csv", "path_000.csv"}) {
    CHECK(read_text(dir / "sim_a" / name) == read_text(dir / "sim_b" / name));
  }

  const std::string manifest = read_text(dir / "sim_a" / "run_manifest.json");
  CHECK(manifest.find("\"command\": \"simulate\"") != std::string::npos);
  CHECK(manifest.find("mean_trajectory.csv") != std::string::npos);
  CHECK(manifest.find("\"scenario_hash\"") != std::string::npos);
}

TEST_CASE("verify command handles the empty campaign") {
  VerifyOptions opt;
  opt.count = 0;
  CHECK(cmd_verify(opt) == 0);
}

TEST_CASE("zero-horizon scenarios are rejected as empty") {
  const ScenarioConfig cfg = parse_scenario_config(R"({
    "agents": 2, "seed": 1, "horizon": 0, "mode": "hard",
    "solar": {"type": "synthetic", "peak_kw": 1.0, "daylight": [0, 1]}
  })");
  CHECK_THROWS_WITH_AS(build_scenario(cfg, "."), doctest::Contains("empty horizon"),
                       ValidationError);
}

TEST_CASE("bench command writes the timing table") {
  const fs::path dir = fresh_dir("bench");
  BenchOptions opt;
  opt.t_list = {4, 8};
  opt.n_list = {2};
  opt.reps = 2;
  opt.out_dir = dir;
  CHECK(cmd_bench(opt) == 0);
  const std::string csv = read_text(dir / "bench.csv");
  CHECK(csv.rfind("solver,T,N,reps,median_seconds\n", 0) == 0);
  CHECK(csv.find("dp,4,2,2,") != std::string::npos);
  CHECK(csv.find("dp,8,2,2,") != std::string::npos);
  CHECK(csv.find("kkt,4,2,2,") != std::string::npos);
  CHECK(csv.find("kkt,8,2,2,") != std::string::npos);
}

TEST_CASE("format_double round-trips") {
  for (const double v : {0.0, 1.0, -3.25, 1.0 / 3.0, 2.5e-17, 123456789.123456789}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("fnv1a is stable") {
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("solar") == fnv1a_hex("solar"));
  CHECK(fnv1a_hex("solar") != fnv1a_hex("solam"));
}

}  // TEST_SUITE
