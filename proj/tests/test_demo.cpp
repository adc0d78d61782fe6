#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lqfleet/controller.hpp"
#include "lqfleet/errors.hpp"
#include "lqfleet/scenario_io.hpp"
#include "lqfleet/simulator.hpp"

using namespace lqfleet;

namespace {

struct DemoRun {
  Scenario scenario;
  MonteCarloSummary summary;
};

DemoRun run_variant(const std::string& variant, double eta) {
  DemoRun run;
  run.scenario = build_scenario(demo_config(variant, eta, 2024), ".");
  const GainSchedule schedule = backward_pass(run.scenario);
  run.summary = monte_carlo(run.scenario, schedule, 40, 2024);
  return run;
}

double most_negative_total(const MonteCarloSummary& summary) {
  double worst = summary.mean_total_input[0];
  for (double v : summary.mean_total_input) worst = std::min(worst, v);
  return worst;
}

// Mean absolute SoC error over the steps without generation, per class.
double night_error(const DemoRun& run, int cls) {
  const Vector& soc =
      cls == 0 ? run.summary.mean_soc_class0 : run.summary.mean_soc_class1;
  const double target = cls == 0 ? 64.0 : 32.0;
  double err = 0.0;
  int count = 0;
  for (int t = 0; t < run.scenario.horizon; ++t) {
    if (run.scenario.schedule.targets[t] != 0.0) continue;
    err += std::abs(soc[t] - target);
    ++count;
  }
  return err / count;
}

}  // namespace

TEST_SUITE("demo") {

TEST_CASE("demand-response variants reproduce the qualitative comparisons") {
  const DemoRun hard = run_variant("hard", 1.0);
  const DemoRun intermittent = run_variant("intermittent", 1.0);
  const DemoRun switched = run_variant("switched", 1.0);

  // Hard residuals at solver precision in every variant.
  CHECK(hard.summary.max_abs_hard_residual <= 1e-9 * 150.0);
  CHECK(intermittent.summary.max_abs_hard_residual <= 1e-9 * 150.0);
  CHECK(switched.summary.max_abs_hard_residual <= 1e-9 * 150.0);

  // Classes diverge toward their 64 / 32 kWh targets under the full-horizon
  // hard constraint.
  const int T = hard.scenario.horizon;
  CHECK(hard.summary.mean_soc_class0[T] > hard.summary.mean_soc_class1[T] + 20.0);

  // Releasing the constraint at night tracks the class targets better.
  CHECK(night_error(intermittent, 0) < night_error(hard, 0));
  CHECK(night_error(intermittent, 1) < night_error(hard, 1));

  // The intermittent strategy discharges sharply around the window edges;
  // switching to a soft constraint removes that negative power peak.
  CHECK(most_negative_total(intermittent.summary) < -50.0);
  CHECK(most_negative_total(switched.summary) >
        most_negative_total(intermittent.summary) + 50.0);
}

TEST_CASE("demo config is the documented fleet") {
  const ScenarioConfig cfg = demo_config("hard", 1.0, 7);
  CHECK(cfg.agents == 50);
  CHECK(cfg.horizon == 24);
  CHECK(cfg.noise_variance == 3.0);
  CHECK(cfg.input_weight == 0.01);
  const Scenario scenario = build_scenario(cfg, ".");
  CHECK(scenario.fleet.n_tot() == 50);
  int alpha = 0;
  for (int i = 0; i < 50; ++i) alpha += scenario.agent_class[i] == 0 ? 1 : 0;
  CHECK(alpha == 25);
  CHECK_THROWS_AS(demo_config("both", 1.0, 7), ConfigParseError);
}

}  // TEST_SUITE
