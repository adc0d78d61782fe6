#include "lqfleet/scenario_io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lqfleet/errors.hpp"
#include "lqfleet/version.hpp"

namespace lqfleet {

using nlohmann::json;

namespace {

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigParseError("cannot open file: " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& file, const std::string& contents) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw ConfigParseError("cannot write file: " + file.string());
  out << contents;
}

template <typename T>
T require(const json& j, const std::string& field) {
  if (!j.contains(field)) throw ConfigParseError("missing field '" + field + "'");
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigParseError("field '" + field + "' has the wrong type");
  }
}

template <typename T>
T optional_or(const json& j, const std::string& field, T fallback) {
  if (!j.contains(field)) return fallback;
  try {
    return j.at(field).get<T>();
  } catch (const json::exception&) {
    throw ConfigParseError("field '" + field + "' has the wrong type");
  }
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

ScenarioConfig parse_scenario_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& err) {
    throw ConfigParseError(std::string("scenario file is not valid JSON: ") + err.what());
  }

  ScenarioConfig cfg;
  cfg.agents = require<int>(j, "agents");
  cfg.seed = require<std::uint64_t>(j, "seed");
  cfg.horizon = require<int>(j, "horizon");
  cfg.state_weight = optional_or(j, "state_weight", cfg.state_weight);
  cfg.input_weight = optional_or(j, "input_weight", cfg.input_weight);
  cfg.terminal_weight = optional_or(j, "terminal_weight", cfg.terminal_weight);
  cfg.noise_variance = optional_or(j, "noise_variance", cfg.noise_variance);
  cfg.capacity_kwh = optional_or(j, "capacity_kwh", cfg.capacity_kwh);
  cfg.class_soc_targets =
      optional_or(j, "class_soc_targets", cfg.class_soc_targets);
  cfg.initial_soc_range = optional_or(j, "initial_soc_range", cfg.initial_soc_range);
  cfg.a_range = optional_or(j, "a_range", cfg.a_range);
  cfg.mode = require<std::string>(j, "mode");
  cfg.eta = optional_or(j, "eta", cfg.eta);
  if (j.contains("u_min")) cfg.u_min = require<double>(j, "u_min");
  if (j.contains("u_max")) cfg.u_max = require<double>(j, "u_max");

  if (!j.contains("solar")) throw ConfigParseError("missing field 'solar'");
  const json& solar = j.at("solar");
  cfg.solar.type = require<std::string>(solar, "type");
  if (cfg.solar.type == "synthetic") {
    cfg.solar.peak_kw = require<double>(solar, "peak_kw");
    const auto daylight = require<std::vector<int>>(solar, "daylight");
    if (daylight.size() != 2) throw ConfigParseError("field 'daylight' needs two entries");
    cfg.solar.daylight_start = daylight[0];
    cfg.solar.daylight_end = daylight[1];
  } else if (cfg.solar.type == "csv") {
    cfg.solar.path = require<std::string>(solar, "path");
    cfg.solar.column = require<std::string>(solar, "column");
  } else {
    throw ConfigParseError("field 'solar.type' must be 'synthetic' or 'csv'");
  }

  if (cfg.mode != "hard" && cfg.mode != "intermittent" && cfg.mode != "switched") {
    throw ConfigParseError("field 'mode' must be 'hard', 'intermittent' or 'switched'");
  }
  if (cfg.initial_soc_range.size() != 2) {
    throw ConfigParseError("field 'initial_soc_range' needs two entries");
  }
  if (cfg.a_range.size() != 2) throw ConfigParseError("field 'a_range' needs two entries");
  return cfg;
}

ScenarioConfig load_scenario_config(const std::filesystem::path& file) {
  return parse_scenario_config(read_file(file));
}

std::string serialize_scenario_config(const ScenarioConfig& cfg) {
  json j;
  j["agents"] = cfg.agents;
  j["seed"] = cfg.seed;
  j["horizon"] = cfg.horizon;
  j["state_weight"] = cfg.state_weight;
  j["input_weight"] = cfg.input_weight;
  j["terminal_weight"] = cfg.terminal_weight;
  j["noise_variance"] = cfg.noise_variance;
  j["capacity_kwh"] = cfg.capacity_kwh;
  j["class_soc_targets"] = cfg.class_soc_targets;
  j["initial_soc_range"] = cfg.initial_soc_range;
  j["a_range"] = cfg.a_range;
  j["mode"] = cfg.mode;
  j["eta"] = cfg.eta;
  if (cfg.solar.type == "synthetic") {
    j["solar"] = {{"type", "synthetic"},
                  {"peak_kw", cfg.solar.peak_kw},
                  {"daylight", {cfg.solar.daylight_start, cfg.solar.daylight_end}}};
  } else {
    j["solar"] = {{"type", "csv"}, {"path", cfg.solar.path}, {"column", cfg.solar.column}};
  }
  if (cfg.u_min) j["u_min"] = *cfg.u_min;
  if (cfg.u_max) j["u_max"] = *cfg.u_max;
  return j.dump(2) + "\n";
}

SolarProfile read_solar_csv(const std::filesystem::path& file, const std::string& column,
                            int horizon) {
  std::istringstream in(read_file(file));
  std::string line;
  int line_no = 0;
  int col_index = -1;
  SolarProfile profile;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;  // skip blank lines
    const std::vector<std::string> cells = split_csv_line(line);
    if (col_index < 0) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (cells[i] == column) col_index = static_cast<int>(i);
      }
      if (col_index < 0) {
        throw ConfigParseError("solar csv: column '" + column + "' not found in header");
      }
      continue;
    }
    if (static_cast<int>(cells.size()) <= col_index) {
      throw ConfigParseError("solar csv: line " + std::to_string(line_no) + " too short");
    }
    const std::string& cell = cells[col_index];
    double value = 0.0;
    const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), value);
    if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
      throw ConfigParseError("solar csv: non-numeric cell '" + cell + "' at line " +
                             std::to_string(line_no));
    }
    if (!std::isfinite(value)) {
      throw ConfigParseError("solar csv: non-finite value at line " + std::to_string(line_no));
    }
    profile.samples.push_back(value);
  }

  if (col_index < 0) throw ConfigParseError("solar csv: no header row");
  if (horizon > 0) {
    if (static_cast<int>(profile.samples.size()) < horizon) {
      throw ConfigParseError("solar csv: " + std::to_string(profile.samples.size()) +
                             " rows but horizon needs " + std::to_string(horizon));
    }
    profile.samples.resize(horizon);
  }
  return profile;
}

Scenario build_scenario(const ScenarioConfig& cfg, const std::filesystem::path& base_dir) {
  if (cfg.horizon <= 0) throw ValidationError("scenario: empty horizon (T must be >= 1)");
  FleetParams params;
  params.capacity_kwh = cfg.capacity_kwh;
  params.class_soc_targets = cfg.class_soc_targets;
  params.initial_soc_min = cfg.initial_soc_range[0];
  params.initial_soc_max = cfg.initial_soc_range[1];
  params.a_min = cfg.a_range[0];
  params.a_max = cfg.a_range[1];
  params.noise_variance = cfg.noise_variance;

  SampledFleet sampled = sample_fleet(cfg.agents, cfg.seed, params);

  SolarProfile profile;
  if (cfg.solar.type == "synthetic") {
    profile = synthetic_solar(cfg.horizon, cfg.solar.peak_kw, cfg.solar.daylight_start,
                              cfg.solar.daylight_end);
  } else {
    profile = read_solar_csv(base_dir / cfg.solar.path, cfg.solar.column, cfg.horizon);
  }

  Scenario scenario;
  scenario.fleet = std::move(sampled.fleet);
  scenario.horizon = cfg.horizon;
  scenario.x0 = std::move(sampled.x0);
  scenario.seed = cfg.seed;
  scenario.agent_class = std::move(sampled.agent_class);
  scenario.u_min = cfg.u_min;
  scenario.u_max = cfg.u_max;

  const int n = scenario.fleet.n_tot();
  const int m = scenario.fleet.m_tot();
  scenario.cost.Q = cfg.state_weight * Matrix::identity(n);
  scenario.cost.R = cfg.input_weight * Matrix::identity(m);
  scenario.cost.Q_T = cfg.terminal_weight * Matrix::identity(n);
  scenario.cost.refs.assign(cfg.horizon + 1, sampled.target);

  if (cfg.mode == "hard") {
    scenario.schedule.targets = profile.samples;
    scenario.schedule.modes.assign(cfg.horizon, StepMode{Mode::Hard, 0.0});
  } else if (cfg.mode == "intermittent") {
    scenario.schedule = schedule_from_profile(profile, StepMode{Mode::None, 0.0});
  } else {
    scenario.schedule = schedule_from_profile(profile, StepMode{Mode::Soft, cfg.eta});
  }
  return scenario;
}

Scenario load_scenario(const std::filesystem::path& file) {
  const ScenarioConfig cfg = load_scenario_config(file);
  return build_scenario(cfg, file.parent_path());
}

ScenarioConfig demo_config(const std::string& variant, double eta, std::uint64_t seed) {
  if (variant != "hard" && variant != "intermittent" && variant != "switched") {
    throw ConfigParseError("demo variant must be 'hard', 'intermittent' or 'switched'");
  }
  ScenarioConfig cfg;
  cfg.agents = 50;
  cfg.seed = seed;
  cfg.horizon = 24;
  cfg.mode = variant;
  cfg.eta = eta;
  cfg.solar.type = "synthetic";
  // Peak sized so the window delivers clearly more energy than the fleet
  // needs to hold its targets against self-discharge; that surplus is what
  // forces the anticipatory discharge the intermittent strategy exhibits.
  cfg.solar.peak_kw = 150.0;
  cfg.solar.daylight_start = 6;
  cfg.solar.daylight_end = 18;
  return cfg;
}

namespace {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::Hard:
      return "hard";
    case Mode::Soft:
      return "soft";
    case Mode::None:
      return "none";
  }
  return "?";
}

}  // namespace

void write_trajectory_csv(const std::filesystem::path& file, const Scenario& scenario,
                          const TrajectoryRecord& record) {
  const int T = scenario.horizon;
  const int n = scenario.fleet.n_tot();
  const int m = scenario.fleet.m_tot();
  std::ostringstream out;
  out << "t";
  for (int i = 0; i < n; ++i) out << ",state_" << i;
  for (int j = 0; j < m; ++j) out << ",input_" << j;
  out << ",total_input,c,mode,residual,step_cost\n";

  const Vector totals = record.total_inputs();
  for (int t = 0; t <= T; ++t) {
    out << t;
    for (int i = 0; i < n; ++i) out << "," << format_double(record.states[t][i]);
    if (t < T) {
      for (int j = 0; j < m; ++j) out << "," << format_double(record.inputs[t][j]);
      out << "," << format_double(totals[t]);
      out << "," << format_double(scenario.schedule.targets[t]);
      out << "," << mode_name(scenario.schedule.modes[t].kind);
      out << "," << format_double(record.residuals[t]);
    } else {
      for (int j = 0; j < m; ++j) out << ",";
      out << ",,,terminal,";
    }
    out << "," << format_double(record.step_costs[t]) << "\n";
  }
  write_file(file, out.str());
}

void write_mean_trajectory_csv(const std::filesystem::path& file, const Scenario& scenario,
                               const MonteCarloSummary& summary) {
  const int T = scenario.horizon;
  std::ostringstream out;
  out << "t,mean_soc_class0,mean_soc_class1,mean_total_input,mean_abs_residual,c,mode\n";
  for (int t = 0; t <= T; ++t) {
    out << t << "," << format_double(summary.mean_soc_class0[t]) << ",";
    if (!summary.mean_soc_class1.empty()) out << format_double(summary.mean_soc_class1[t]);
    if (t < T) {
      out << "," << format_double(summary.mean_total_input[t]);
      out << "," << format_double(summary.mean_abs_residual[t]);
      out << "," << format_double(scenario.schedule.targets[t]);
      out << "," << mode_name(scenario.schedule.modes[t].kind);
    } else {
      out << ",,,,terminal";
    }
    out << "\n";
  }
  write_file(file, out.str());
}

void write_summary_csv(const std::filesystem::path& file, const MonteCarloSummary& summary) {
  std::ostringstream out;
  out << "n_paths,mean_cost,cost_std_error,max_abs_hard_residual\n";
  out << summary.n_paths << "," << format_double(summary.mean_cost) << ","
      << format_double(summary.cost_std_error) << ","
      << format_double(summary.max_abs_hard_residual) << "\n";
  write_file(file, out.str());
}

void write_gain_csvs(const std::filesystem::path& out_dir, const GainSchedule& schedule) {
  const int T = schedule.horizon();
  const int n = schedule.P[0].rows();
  const int m = T > 0 ? schedule.K[0].rows() : 0;

  {
    std::ostringstream out;
    out << "t,q,s_norm";
    for (int i = 0; i < n; ++i) out << ",P_diag_" << i;
    out << "\n";
    for (int t = 0; t <= T; ++t) {
      double s_norm = 0.0;
      for (double v : schedule.s[t]) s_norm += v * v;
      out << t << "," << format_double(schedule.q[t]) << ","
          << format_double(std::sqrt(s_norm));
      for (int i = 0; i < n; ++i) out << "," << format_double(schedule.P[t](i, i));
      out << "\n";
    }
    write_file(out_dir / "value_function.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "t,row,d";
    for (int i = 0; i < n; ++i) out << ",K_" << i;
    out << "\n";
    for (int t = 0; t < T; ++t) {
      for (int r = 0; r < m; ++r) {
        out << t << "," << r << "," << format_double(schedule.d[t][r]);
        for (int i = 0; i < n; ++i) out << "," << format_double(schedule.K[t](r, i));
        out << "\n";
      }
    }
    write_file(out_dir / "gains.csv", out.str());
  }
  {
    std::ostringstream out;
    out << "t,min_eigenvalue\n";
    for (int t = 0; t <= T; ++t) {
      out << t << "," << format_double(min_eigenvalue_symmetric(schedule.P[t])) << "\n";
    }
    write_file(out_dir / "pt_min_eig.csv", out.str());
  }
}

void write_manifest(const std::filesystem::path& out_dir, const RunManifest& manifest) {
  json j;
  j["command"] = manifest.command;
  j["scenario_path"] = manifest.scenario_path;
  j["scenario_hash"] = manifest.scenario_hash;
  j["seed"] = manifest.seed;
  j["version"] = manifest.version.empty() ? kVersion : manifest.version;
  j["outputs"] = manifest.outputs;

  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::tm tm_utc{};
  gmtime_r(&now, &tm_utc);
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
  j["timestamp"] = stamp;

  write_file(out_dir / "run_manifest.json", j.dump(2) + "\n");
}

}  // namespace lqfleet
