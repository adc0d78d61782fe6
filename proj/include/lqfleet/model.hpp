#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lqfleet/linalg.hpp"

namespace lqfleet {

// Per-step constraint on the total input 1ᵀu_t.
enum class Mode { Hard, Soft, None };

struct StepMode {
  Mode kind = Mode::None;
  double eta = 0.0;  // penalty weight, used when kind == Soft

  bool operator==(const StepMode&) const = default;
};

struct ConstraintSchedule {
  std::vector<StepMode> modes;  // length T
  Vector targets;               // length T; target total input c_t (kW), defined for every t

  int horizon() const { return static_cast<int>(modes.size()); }
  bool operator==(const ConstraintSchedule&) const = default;
};

// Block-diagonal N-agent system x_{t+1} = A x_t + B u_t + w_t.
struct FleetModel {
  std::vector<std::pair<int, int>> agent_dims;  // (state_dim, input_dim) per agent
  Matrix A;  // n_tot x n_tot
  Matrix B;  // n_tot x m_tot
  Matrix W;  // n_tot x n_tot noise covariance, PSD

  int n_agents() const { return static_cast<int>(agent_dims.size()); }
  int n_tot() const;
  int m_tot() const;
  // offset of agent i's state block within the stacked state
  int state_offset(int agent) const;
};

// Assembles the fleet matrices from per-agent blocks.
FleetModel make_fleet(const std::vector<Matrix>& A_blocks, const std::vector<Matrix>& B_blocks,
                      const Matrix& W);

struct CostSpec {
  Matrix Q;    // n_tot², PSD
  Matrix R;    // m_tot², PD
  Matrix Q_T;  // n_tot², PSD
  std::vector<Vector> refs;  // r_0 .. r_T, each n_tot
};

struct Scenario {
  FleetModel fleet;
  CostSpec cost;
  ConstraintSchedule schedule;
  int horizon = 0;  // T
  Vector x0;        // n_tot, kWh in the demand-response setting
  std::uint64_t seed = 0;

  // Reporting metadata: class label per agent (0-based). Empty means one class.
  std::vector<int> agent_class;
  // Optional per-agent input bounds; used only for aggregate feasibility warnings.
  std::optional<double> u_min;
  std::optional<double> u_max;

  // Throws ValidationError naming the violated invariant; returns warnings
  // (e.g. hard targets outside the aggregate input range).
  std::vector<std::string> validate() const;
};

struct SolarProfile {
  Vector samples;  // kW per hour, length T

  int horizon() const { return static_cast<int>(samples.size()); }
};

// Half-sine generation bump: zero outside [start,end), peak_kw at the window
// midpoint. Stand-in for a measured irradiance-driven profile.
SolarProfile synthetic_solar(int T, double peak_kw, int daylight_start, int daylight_end);

// Hard wherever the profile is nonzero (the active set {t : c_t != 0}),
// off_mode elsewhere; targets copied from the profile.
ConstraintSchedule schedule_from_profile(const SolarProfile& profile, StepMode off_mode);

// Randomized residential-battery fleet: scalar agents with
// A_i ~ U[0.96, 0.99], B_i = 1, noise variance 3 (kWh)², initial state
// uniform in 40..60% of 80 kWh capacity. Agents split evenly into class 0
// (target 80% = 64 kWh) and class 1 (target 40% = 32 kWh). The defaults are
// the residential-battery setting; scenario files may override them.
struct FleetParams {
  double capacity_kwh = 80.0;
  std::vector<double> class_soc_targets = {0.80, 0.40};
  double initial_soc_min = 0.40;
  double initial_soc_max = 0.60;
  double a_min = 0.96;
  double a_max = 0.99;
  double noise_variance = 3.0;
};

struct SampledFleet {
  FleetModel fleet;
  Vector x0;
  Vector target;                 // per-state reference level, constant in time
  std::vector<int> agent_class;  // class index per agent
};
SampledFleet sample_fleet(int n_agents, std::uint64_t seed, const FleetParams& params = {});

// Stage cost |x - r_t|²_Q + |u|²_R, plus eta (1ᵀu - c_t)² when mode[t] is Soft.
double stage_cost(const Vector& x, const Vector& u, int t, const CostSpec& cost,
                  const ConstraintSchedule& schedule);
// Terminal cost |x - r_T|²_{Q_T}.
double terminal_cost(const Vector& x, const CostSpec& cost);

}  // namespace lqfleet
