#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "lqfleet/controller.hpp"
#include "lqfleet/simulator.hpp"

namespace lqfleet {

// Raw scenario file contents, before any sampling. Kept separate from the
// built Scenario so files round-trip: parse -> serialize -> parse is
// identical.
struct SolarSource {
  std::string type;  // "synthetic" | "csv"
  double peak_kw = 0.0;
  int daylight_start = 0;
  int daylight_end = 0;
  std::string path;    // csv only
  std::string column;  // csv only

  bool operator==(const SolarSource&) const = default;
};

struct ScenarioConfig {
  int agents = 0;
  std::uint64_t seed = 0;
  int horizon = 0;
  double state_weight = 1.0;
  double input_weight = 0.01;
  double terminal_weight = 1.0;
  double noise_variance = 3.0;
  double capacity_kwh = 80.0;
  std::vector<double> class_soc_targets = {0.80, 0.40};
  std::vector<double> initial_soc_range = {0.40, 0.60};
  std::vector<double> a_range = {0.96, 0.99};
  std::string mode = "hard";  // "hard" | "intermittent" | "switched"
  double eta = 1.0;
  SolarSource solar;
  std::optional<double> u_min;
  std::optional<double> u_max;

  bool operator==(const ScenarioConfig&) const = default;
};

ScenarioConfig parse_scenario_config(const std::string& json_text);
ScenarioConfig load_scenario_config(const std::filesystem::path& file);
std::string serialize_scenario_config(const ScenarioConfig& config);

// Builds the full scenario: samples the fleet from config.seed, materializes
// the solar profile (CSV paths resolve relative to base_dir) and derives the
// constraint schedule from the configured mode.
Scenario build_scenario(const ScenarioConfig& config, const std::filesystem::path& base_dir);

Scenario load_scenario(const std::filesystem::path& file);

// Canonical demand-response scenario: 50 batteries, 24 h, synthetic solar.
// variant must be "hard", "intermittent" or "switched".
ScenarioConfig demo_config(const std::string& variant, double eta, std::uint64_t seed);

// Solar CSV: one header row, one row per hour. Blank lines are skipped;
// non-numeric cells in the selected column are an error. Reads at least
// `horizon` rows when horizon > 0 and truncates to it.
SolarProfile read_solar_csv(const std::filesystem::path& file, const std::string& column,
                            int horizon);

// --- CSV writers (headers are stable; plot scripts depend on them) ---

void write_trajectory_csv(const std::filesystem::path& file, const Scenario& scenario,
                          const TrajectoryRecord& record);
void write_mean_trajectory_csv(const std::filesystem::path& file, const Scenario& scenario,
                               const MonteCarloSummary& summary);
void write_summary_csv(const std::filesystem::path& file, const MonteCarloSummary& summary);
void write_gain_csvs(const std::filesystem::path& out_dir, const GainSchedule& schedule);

struct RunManifest {
  std::string command;
  std::string scenario_path;  // empty for built-in scenarios
  std::string scenario_hash;  // FNV-1a 64 of the scenario file bytes
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;
};

// Writes run_manifest.json (adds a timestamp field; everything else is
// reproducible input state).
void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest);

std::string fnv1a_hex(const std::string& bytes);
std::string format_double(double v);  // shortest round-trip decimal

}  // namespace lqfleet
