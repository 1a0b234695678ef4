#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "pedcross/env.hpp"
#include "pedcross/scenario.hpp"

using namespace pedcross;

namespace {

const ScenarioSpec* find_row(const std::vector<ScenarioSpec>& cat, ScenarioKind kind, double v0, double d0,
                             std::optional<double> d_stop = std::nullopt) {
  for (const auto& s : cat) {
    if (s.kind == kind && s.v0 == v0 && s.d0 == d0 && s.d_stop == d_stop) return &s;
  }
  return nullptr;
}

ScenarioSpec constant(double v0, double d0) {
  return ScenarioSpec{"c", ScenarioKind::constant, v0, d0, d0 / v0, std::nullopt};
}

}  // namespace

TEST_SUITE("scenario-env") {
  TEST_CASE("catalog rows") {
    const auto cat = build_catalog();
    CHECK(cat.size() == 16);
    CHECK(evaluation_scenarios(cat).size() == 14);

    const auto* first = find_row(cat, ScenarioKind::constant, 6.94, 15.90);
    REQUIRE(first != nullptr);
    CHECK(first->tau0 == doctest::Approx(2.29).epsilon(0.005));

    const auto* yield = find_row(cat, ScenarioKind::yielding, 13.89, 63.61, 8.0);
    REQUIRE(yield != nullptr);
    CHECK(yield->tau0 == doctest::Approx(4.58).epsilon(0.005));

    const auto* train = find_row(cat, ScenarioKind::infeasible_training, 6.94, 6.94);
    REQUIRE(train != nullptr);
    CHECK(train->tau0 == 1.0);
    CHECK(find_row(cat, ScenarioKind::infeasible_training, 13.89, 13.89) != nullptr);

    for (const auto& s : cat) {
      CHECK(std::abs(s.tau0 - s.d0 / s.v0) <= 1e-6 * s.tau0);
      CHECK_NOTHROW(s.validate());
    }
  }

  TEST_CASE("unknown scenario id") {
    const auto cat = build_catalog();
    CHECK_THROWS_WITH(find_scenario(cat, "nope"), doctest::Contains("unknown scenario id"));
  }

  TEST_CASE("validate rejects bad specs") {
    ScenarioSpec s = constant(6.94, 15.90);
    s.tau0 = 3.0;
    CHECK_THROWS(s.validate());
    ScenarioSpec y{"y", ScenarioKind::yielding, 6.94, 15.90, 15.90 / 6.94, 16.0};
    CHECK_THROWS(y.validate());
    CHECK_THROWS(vehicle_state(y, 1.0));
  }

  TEST_CASE("vehicle_state closed form") {
    const auto c = constant(6.94, 15.90);
    CHECK(vehicle_state(c, 0.0).x == 15.90);
    CHECK(vehicle_state(c, 0.0).v == 6.94);
    CHECK(vehicle_state(c, 2.2911).x == doctest::Approx(15.90 - 6.94 * 2.2911));
    CHECK(std::abs(vehicle_state(c, 2.2911).x) < 1e-3);

    const ScenarioSpec y{"y", ScenarioKind::yielding, 6.94, 15.90, 15.90 / 6.94, 4.0};
    const double a = 6.94 * 6.94 / (2.0 * 11.90);
    const auto stopped = vehicle_state(y, 6.94 / a + 0.5);
    CHECK(stopped.x == 4.0);
    CHECK(stopped.v == 0.0);
    CHECK(vehicle_state(y, 6.94 / a).x == doctest::Approx(4.0));
  }

  TEST_CASE("constant scenarios reach the line at tau0") {
    for (const auto& s : build_catalog()) {
      if (s.kind == ScenarioKind::yielding) continue;
      CHECK(std::abs(vehicle_state(s, s.tau0).x) < 1e-9);
    }
  }

  TEST_CASE("yielding trajectories are monotone and stop at d_stop") {
    for (const auto& s : build_catalog()) {
      if (s.kind != ScenarioKind::yielding) continue;
      double prev_x = s.d0, prev_v = s.v0;
      const double max_dv = s.v0 * s.v0 / (2.0 * (s.d0 - *s.d_stop)) * 0.05;
      for (int i = 1; i <= 400; ++i) {
        const auto k = vehicle_state(s, i * 0.05);
        CHECK(k.x <= prev_x + 1e-12);
        CHECK(k.v <= prev_v + 1e-12);
        CHECK(std::abs(k.v - prev_v) <= max_dv + 1e-9);  // no jumps
        prev_x = k.x;
        prev_v = k.v;
      }
      CHECK(prev_x == *s.d_stop);
      CHECK(prev_v == 0.0);
    }
  }

  TEST_CASE("check_collision geometry") {
    WorldConfig cfg;
    SimState s;
    s.y_ped = 0.0;
    for (double x : {-10.0, -2.25, 0.0, 0.2, 5.0}) {
      s.x_veh = x;
      CHECK_FALSE(check_collision(s, cfg));
    }
    s.y_ped = cfg.lane_near_edge + 0.5 * cfg.vehicle_width;
    s.x_veh = -cfg.vehicle_length / 2.0;
    CHECK(check_collision(s, cfg));
    s.x_veh = cfg.ped_radius + 0.001;
    CHECK_FALSE(check_collision(s, cfg));
    s.x_veh = cfg.ped_radius - 0.001;
    CHECK(check_collision(s, cfg));
    // rear of the vehicle just clear of the disc
    s.x_veh = -cfg.vehicle_length - cfg.ped_radius - 0.001;
    CHECK_FALSE(check_collision(s, cfg));
  }

  TEST_CASE("step branches") {
    WorldConfig cfg;
    Rng rng(1);
    const auto spec = constant(6.94, 47.71);

    SimState s = initial_state(spec);
    auto out = step(s, Action::not_go, spec, cfg, rng);
    CHECK_FALSE(out.terminal);
    CHECK(out.terminal_kind == TerminalKind::none);
    CHECK(out.next_state.ped_phase == PedPhase::waiting);
    CHECK(out.next_state.t == 1);
    CHECK(out.next_state.x_veh == doctest::Approx(47.71 - 6.94 * 0.1));

    SimState w = s;
    w.ped_phase = PedPhase::walking;
    w.y_ped = cfg.road_width - cfg.walk_speed * cfg.dt;
    out = step(w, Action::not_go, spec, cfg, rng);
    CHECK(out.terminal);
    CHECK(out.terminal_kind == TerminalKind::arrival);
    CHECK(out.next_state.ped_phase == PedPhase::done);

    // inside the lane band with the vehicle straddling the crossing line
    SimState c = s;
    c.ped_phase = PedPhase::walking;
    c.y_ped = cfg.lane_center() - cfg.walk_speed * cfg.dt;
    c.t = static_cast<int>(std::round(spec.tau0 / cfg.dt));
    out = step(c, Action::not_go, spec, cfg, rng);
    const double x_next = spec.d0 - spec.v0 * (c.t + 1) * cfg.dt;
    REQUIRE(x_next < cfg.ped_radius);
    REQUIRE(x_next + cfg.vehicle_length > -cfg.ped_radius);
    CHECK(out.terminal_kind == TerminalKind::collision);
  }

  TEST_CASE("go records inverse tau and starts walking") {
    WorldConfig cfg;
    Rng rng(2);
    const auto spec = constant(13.89, 63.61);
    const auto out = step(initial_state(spec), Action::go, spec, cfg, rng);
    CHECK(out.inverse_tau_at_go == doctest::Approx(13.89 / 63.61));
    CHECK(out.motor_delay >= 0.0);
    CHECK(out.next_state.ped_phase == PedPhase::walking);
  }

  TEST_CASE("delay before walking when configured") {
    WorldConfig cfg;
    cfg.delay_before_walk = true;
    cfg.motor_delay_std = 0.0;
    cfg.motor_delay_mean = 0.3;
    Rng rng(3);
    const auto spec = constant(6.94, 47.71);
    auto out = step(initial_state(spec), Action::go, spec, cfg, rng);
    CHECK(out.next_state.ped_phase == PedPhase::delaying);
    CHECK(out.next_state.delay_remaining == doctest::Approx(0.3));
    int delaying_steps = 0;
    while (out.next_state.ped_phase == PedPhase::delaying) {
      out = step(out.next_state, Action::not_go, spec, cfg, rng);
      ++delaying_steps;
      CHECK(out.next_state.y_ped == 0.0);
    }
    CHECK(delaying_steps == 3);
    CHECK(out.next_state.ped_phase == PedPhase::walking);
    CHECK(out.next_state.delay_remaining == 0.0);
  }

  TEST_CASE("never going times out at the step limit") {
    WorldConfig cfg;
    CHECK(cfg.max_steps() == 200);
    Rng rng(4);
    for (const auto& spec : build_catalog()) {
      SimState s = initial_state(spec);
      int steps = 0;
      StepOutcome out;
      do {
        out = step(s, Action::not_go, spec, cfg, rng);
        s = out.next_state;
        ++steps;
      } while (!out.terminal);
      CHECK(out.terminal_kind == TerminalKind::timeout);
      CHECK(steps == 200);
    }
  }

  TEST_CASE("terminal rewards") {
    WorldConfig cfg;
    CHECK(terminal_reward(TerminalKind::collision, 7, 50.0, 2.0, cfg) == -20.0);
    CHECK(terminal_reward(TerminalKind::timeout, 200, 0.0, 0.0, cfg) == -20.0);
    CHECK(terminal_reward(TerminalKind::arrival, 0, 0.0, 0.0, cfg) == 20.0);
    CHECK(terminal_reward(TerminalKind::arrival, 100, 100.0, 1.0, cfg) == -20.0);
    CHECK(terminal_reward(TerminalKind::arrival, 30, 10.0, 0.5, cfg) == doctest::Approx(20.0 - 0.3 - 5.0));

    Rng rng(5);
    std::uniform_int_distribution<int> steps(0, 10000);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    for (int i = 0; i < 2000; ++i) {
      for (auto kind : {TerminalKind::arrival, TerminalKind::collision, TerminalKind::timeout}) {
        const double r = terminal_reward(kind, steps(rng), u(rng), u(rng) / 100.0, cfg);
        CHECK(r >= -20.0);
        CHECK(r <= 20.0);
      }
    }
  }

  TEST_CASE("motor delay is truncated at zero") {
    WorldConfig cfg;
    cfg.motor_delay_mean = 0.0;
    cfg.motor_delay_std = 1.0;
    Rng rng(6);
    int zeros = 0;
    for (int i = 0; i < 10000; ++i) {
      const double d = sample_motor_delay(cfg, rng);
      CHECK(d >= 0.0);
      zeros += d == 0.0;
    }
    CHECK(zeros > 4000);
  }

  TEST_CASE("world config validation") {
    WorldConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.dt = 0.0;
    CHECK_THROWS(cfg.validate());
    cfg = WorldConfig{};
    cfg.motor_delay_std = -0.1;
    CHECK_THROWS(cfg.validate());
  }
}
