#include <doctest.h>

#include <cmath>
#include <random>

#include "lqfleet/errors.hpp"
#include "lqfleet/model.hpp"

using namespace lqfleet;

TEST_SUITE("model") {

TEST_CASE("sample_fleet produces the residential-battery setting") {
  const SampledFleet s = sample_fleet(50, 42);
  CHECK(s.fleet.n_tot() == 50);
  CHECK(s.fleet.m_tot() == 50);

  int target64 = 0, target32 = 0;
  for (int i = 0; i < 50; ++i) {
    const double a = s.fleet.A(i, i);
    CHECK(a >= 0.96);
    CHECK(a <= 0.99);
    CHECK(s.fleet.B(i, i) == 1.0);
    CHECK(s.fleet.W(i, i) == 3.0);
    CHECK(s.x0[i] >= 32.0);  // 40% of 80
    CHECK(s.x0[i] <= 48.0);  // 60% of 80
    if (s.target[i] == 64.0) ++target64;
    if (s.target[i] == 32.0) ++target32;
  }
  CHECK(target64 == 25);
  CHECK(target32 == 25);
}

TEST_CASE("sample_fleet is reproducible and single-agent works") {
  const SampledFleet a = sample_fleet(2, 7);
  const SampledFleet b = sample_fleet(2, 7);
  CHECK(a.fleet.A == b.fleet.A);
  CHECK(a.x0 == b.x0);
  const SampledFleet c = sample_fleet(2, 8);
  CHECK(c.fleet.A != a.fleet.A);

  const SampledFleet single = sample_fleet(1, 3);
  CHECK(single.fleet.n_tot() == 1);
  CHECK(single.agent_class[0] == 0);
  CHECK_THROWS_AS(sample_fleet(0, 1), ValidationError);
}

TEST_CASE("synthetic_solar half-sine values") {
  const SolarProfile zero = synthetic_solar(24, 0.0, 6, 18);
  for (double v : zero.samples) CHECK(v == 0.0);

  const SolarProfile p = synthetic_solar(24, 100.0, 6, 18);
  CHECK(p.samples[0] == 0.0);
  CHECK(p.samples[5] == 0.0);
  CHECK(p.samples[12] == doctest::Approx(100.0).epsilon(1e-12));
  // closed form at t=9: 100 sin(pi (9-6)/12)
  CHECK(p.samples[9] == doctest::Approx(100.0 * std::sin(M_PI * 3.0 / 12.0)).epsilon(1e-12));
  CHECK(p.samples[9] == doctest::Approx(70.71067811865476).epsilon(1e-12));
  CHECK(p.samples[18] == 0.0);
  CHECK(p.samples[23] == 0.0);

  CHECK_THROWS_AS(synthetic_solar(24, 100.0, 18, 6), InvalidWindow);
  CHECK_THROWS_AS(synthetic_solar(24, 100.0, 6, 25), InvalidWindow);
  CHECK_THROWS_AS(synthetic_solar(24, -1.0, 6, 18), InvalidWindow);
}

TEST_CASE("schedule_from_profile marks hard exactly where the profile is nonzero") {
  SolarProfile profile;
  profile.samples.assign(8, 0.0);
  const ConstraintSchedule none_sched =
      schedule_from_profile(profile, StepMode{Mode::None, 0.0});
  for (const StepMode& m : none_sched.modes) CHECK(m.kind == Mode::None);

  profile.samples[5] = 10.0;
  const ConstraintSchedule sched = schedule_from_profile(profile, StepMode{Mode::Soft, 2.0});
  for (int t = 0; t < 8; ++t) {
    if (t == 5) {
      CHECK(sched.modes[t].kind == Mode::Hard);
    } else {
      CHECK(sched.modes[t].kind == Mode::Soft);
      CHECK(sched.modes[t].eta == 2.0);
    }
    CHECK(sched.targets[t] == profile.samples[t]);
  }
}

TEST_CASE("stage_cost formula") {
  CostSpec cost;
  cost.Q = Matrix(1, 1, {1.0});
  cost.R = Matrix(1, 1, {1.0});
  cost.Q_T = Matrix(1, 1, {1.0});
  cost.refs.assign(3, Vector{1.0});

  ConstraintSchedule sched;
  sched.modes = {StepMode{Mode::None, 0.0}, StepMode{Mode::Soft, 2.0}};
  sched.targets = {0.0, 1.0};

  // x = r, u = 0 -> 0
  CHECK(stage_cost({1.0}, {0.0}, 0, cost, sched) == 0.0);
  // x - r = 2, u = 3 -> 4 + 9
  CHECK(stage_cost({3.0}, {3.0}, 0, cost, sched) == doctest::Approx(13.0));
  // soft step adds eta (1'u - c)^2 = 2 (3-1)^2
  CHECK(stage_cost({3.0}, {3.0}, 1, cost, sched) == doctest::Approx(21.0));
  // terminal
  CHECK(terminal_cost({3.0}, cost) == doctest::Approx(4.0));

  CHECK_THROWS_AS(stage_cost({1.0, 2.0}, {0.0}, 0, cost, sched), DimensionMismatch);
  CHECK_THROWS_AS(stage_cost({1.0}, {0.0}, 5, cost, sched), IndexOutOfRange);
}

TEST_CASE("stage_cost is nonnegative for PSD weights") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> entry(-5.0, 5.0);
  CostSpec cost;
  cost.Q = Matrix(2, 2, {2.0, 1.0, 1.0, 2.0});
  cost.R = Matrix(2, 2, {1.0, 0.0, 0.0, 3.0});
  cost.Q_T = cost.Q;
  cost.refs.assign(2, Vector{0.5, -0.5});
  ConstraintSchedule sched;
  sched.modes = {StepMode{Mode::Soft, 1.5}};
  sched.targets = {0.3};
  for (int trial = 0; trial < 50; ++trial) {
    const Vector x{entry(rng), entry(rng)};
    const Vector u{entry(rng), entry(rng)};
    CHECK(stage_cost(x, u, 0, cost, sched) >= 0.0);
  }
}

TEST_CASE("make_fleet assembles block-diagonal matrices") {
  const Matrix a0(1, 1, {0.9});
  const Matrix a1(2, 2, {1.0, 0.1, 0.0, 1.0});
  const Matrix b0(1, 1, {1.0});
  const Matrix b1(2, 1, {0.0, 1.0});
  const FleetModel fleet = make_fleet({a0, a1}, {b0, b1}, Matrix(3, 3, 0.0));
  CHECK(fleet.n_tot() == 3);
  CHECK(fleet.m_tot() == 2);
  CHECK(fleet.state_offset(1) == 1);
  CHECK(fleet.A(1, 2) == 0.1);
  CHECK(fleet.A(0, 1) == 0.0);
  CHECK(fleet.B(2, 1) == 1.0);
  CHECK_THROWS_AS(make_fleet({a0}, {b0, b1}, Matrix(3, 3, 0.0)), DimensionMismatch);
}

TEST_CASE("scenario validation names the violated invariant") {
  const SampledFleet s = sample_fleet(2, 1);
  Scenario scenario;
  scenario.fleet = s.fleet;
  scenario.horizon = 3;
  scenario.x0 = s.x0;
  scenario.agent_class = s.agent_class;
  scenario.cost.Q = Matrix::identity(2);
  scenario.cost.R = 0.01 * Matrix::identity(2);
  scenario.cost.Q_T = Matrix::identity(2);
  scenario.cost.refs.assign(4, s.target);
  scenario.schedule.modes.assign(3, StepMode{Mode::Hard, 0.0});
  scenario.schedule.targets.assign(3, 1.0);
  CHECK(scenario.validate().empty());

  Scenario bad = scenario;
  bad.horizon = 0;
  bad.schedule.modes.clear();
  bad.schedule.targets.clear();
  bad.cost.refs.resize(1);
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("empty horizon"), ValidationError);

  bad = scenario;
  bad.cost.refs.pop_back();
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("refs"), ValidationError);

  bad = scenario;
  bad.cost.R = Matrix(2, 2, {0.0, 0.0, 0.0, 0.0});
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("R not positive definite"),
                       ValidationError);

  bad = scenario;
  bad.schedule.modes[1] = StepMode{Mode::Soft, -1.0};
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("eta"), ValidationError);

  // infeasible hard target is only a warning
  bad = scenario;
  bad.u_min = -1.0;
  bad.u_max = 1.0;
  bad.schedule.targets[0] = 100.0;
  const std::vector<std::string> warnings = bad.validate();
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("c_0") != std::string::npos);
}

}  // TEST_SUITE
