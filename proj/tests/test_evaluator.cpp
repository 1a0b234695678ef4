#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "pedcross/evaluator.hpp"

using namespace pedcross;

namespace {

struct Fixture {
  WorldConfig world;
  std::vector<ScenarioSpec> catalog = build_catalog(world);
  SimContext ctx = SimContext::make(world, PerceptionConfig{}, catalog);
};

// Greedy Go everywhere.
QNet always_go(Variant v) {
  QNet net(v, observation_size(v), 4, 4);
  net.biases(LayerId::advantage)[1] = 1.0;
  return net;
}

}  // namespace

TEST_SUITE("evaluator") {
  TEST_CASE("zero network waits until timeout") {
    Fixture f;
    Rng rng(31);
    const QNet zero(Variant::VLM, 10, 8, 8);
    const auto r = rollout(zero, find_scenario(f.catalog, "const_v6.94_d15.90"), {0.2, 30.0}, f.ctx, rng);
    CHECK(r.outcome == TerminalKind::timeout);
    CHECK_FALSE(r.cit.has_value());
    CHECK_FALSE(r.go_step.has_value());
  }

  TEST_CASE("go at the first step records the motor delay as CIT") {
    Fixture f;
    Rng rng(32);
    const auto& spec = find_scenario(f.catalog, "const_v6.94_d15.90");
    for (int i = 0; i < 50; ++i) {
      const auto r = rollout(always_go(Variant::BM), spec, {}, f.ctx, rng);
      REQUIRE(r.cit.has_value());
      CHECK(*r.go_step == 0);
      CHECK(*r.cit >= 0.0);
      CHECK(*r.cit < spec.tau0);
      CHECK(r.outcome == TerminalKind::arrival);
    }
    // walking into a 1 s gap is a collision
    const auto r = rollout(always_go(Variant::BM), find_scenario(f.catalog, "train_v6.94_d6.94"), {}, f.ctx, rng);
    CHECK(r.outcome == TerminalKind::collision);
  }

  TEST_CASE("grid simulation counts and determinism") {
    Fixture f;
    const QNet net = always_go(Variant::BM);
    const ParamGrid grid = ParamGrid::standard();
    const auto a = simulate_grid(net, f.catalog, grid, 20, f.ctx, 7);
    CHECK(a.trials.size() == 14 * 20);
    std::size_t values = 0;
    for (const auto& [key, list] : a.samples) {
      values += list.size();
      CHECK(std::is_sorted(list.begin(), list.end()));
      CHECK(key.sigma_v == 0.0);
      CHECK(key.c == 0.0);
    }
    CHECK(values <= 14 * 20);
    CHECK(a.samples.size() == 14);

    const auto b = simulate_grid(net, f.catalog, grid, 20, f.ctx, 7);
    CHECK(a.samples == b.samples);
  }

  TEST_CASE("worker count does not change results") {
    Fixture f;
    Rng rng(33);
    const QNet net = QNet::random(Variant::VLM, 10, 8, 8, rng);
    const ParamGrid grid{{0.0, 0.3}, {0.0, 40.0}};
    const auto one = simulate_grid(net, f.catalog, grid, 5, f.ctx, 9, 1);
    const auto four = simulate_grid(net, f.catalog, grid, 5, f.ctx, 9, 4);
    CHECK(one.samples == four.samples);
    REQUIRE(one.trials.size() == four.trials.size());
    for (std::size_t i = 0; i < one.trials.size(); ++i) {
      CHECK(one.trials[i].result.cit == four.trials[i].result.cit);
      CHECK(one.trials[i].result.outcome == four.trials[i].result.outcome);
    }
  }

  TEST_CASE("empty cell list gives an empty result") {
    Fixture f;
    const QNet net = always_go(Variant::VM);
    const auto sim = simulate_grid(net, f.catalog, ParamGrid{}, 5, f.ctx, 1);
    CHECK(sim.trials.empty());
    CHECK(sim.samples.empty());
    CHECK_THROWS(simulate_grid(net, f.catalog, ParamGrid{}, 0, f.ctx, 1));
  }

  TEST_CASE("gap acceptance") {
    Fixture f;
    const auto& spec = find_scenario(f.catalog, "const_v6.94_d31.81");
    CHECK(gap_acceptance_rate({5.0, 6.0, 7.0}, spec) == 0.0);
    CHECK(gap_acceptance_rate({0.5, 1.0, 2.0}, spec) == 1.0);
    CHECK(gap_acceptance_rate({1.0, 2.0, 3.0, 5.0, 6.0}, spec) == doctest::Approx(0.6));
    CHECK_THROWS(gap_acceptance_rate({1.0}, find_scenario(f.catalog, "yield_v6.94_d15.90_s4")));

    // raising tau0 never lowers the rate
    const std::vector<double> cits{0.4, 1.1, 2.5, 2.9, 4.0, 5.5, 7.2};
    double prev = 0.0;
    for (int i = 1; i < 100; ++i) {
      ScenarioSpec s = spec;
      s.tau0 = 0.1 * i;
      const double rate = gap_acceptance_rate(cits, s);
      CHECK(rate >= prev);
      prev = rate;
    }
  }

  TEST_CASE("KS statistic") {
    CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
    CHECK(ks_statistic({1, 2}, {10, 11}) == 1.0);
    CHECK(ks_statistic({1, 2, 3}, {1.5, 2.5, 3.5}) == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS(ks_statistic({}, {1.0}));

    Rng rng(34);
    std::uniform_int_distribution<int> len(1, 9);
    std::uniform_int_distribution<int> val(0, 6);  // small range forces ties
    for (int i = 0; i < 300; ++i) {
      std::vector<double> a(len(rng)), b(len(rng));
      for (auto& x : a) x = val(rng) * 0.5;
      for (auto& x : b) x = val(rng) * 0.5;
      const double d = ks_statistic(a, b);
      CHECK(d == oracle::ks_brute(a, b));
      CHECK(d == ks_statistic(b, a));
      std::vector<double> ta = a, tb = b;
      for (auto& x : ta) x = std::exp(x) + 3.0;
      for (auto& x : tb) x = std::exp(x) + 3.0;
      CHECK(ks_statistic(ta, tb) == d);
    }
  }

  TEST_CASE("MAD") {
    const std::map<std::string, double> p{{"a", 1.0}, {"b", 2.0}};
    CHECK(mad(p, p) == 0.0);
    CHECK(mad(p, {{"a", 1.5}, {"b", 2.5}}) == doctest::Approx(0.5));
    CHECK(mad(p, {{"a", 2.0}, {"b", 1.0}}) == doctest::Approx(1.0));
    CHECK_THROWS(mad(p, {{"a", 1.0}}));
    CHECK_THROWS(mad(p, {{"a", 1.0}, {"c", 2.0}}));
  }

  TEST_CASE("arrivals in constant scenarios go ahead of or behind the vehicle") {
    // The pedestrian disc first meets the lane band (lane_near_edge -
    // ped_radius) / walk_speed after it starts walking. Walking advances from
    // the step after Go and contact is sampled on the step grid, so allow two
    // steps of slack.
    Fixture f;
    Rng rng(35);
    const double lead = (f.world.lane_near_edge - f.world.ped_radius) / f.world.walk_speed;
    int arrivals = 0, collisions = 0;
    for (int n = 0; n < 40; ++n) {
      const QNet net = QNet::random(Variant::BM, 6, 8, 8, rng);
      for (const auto& spec : f.catalog) {
        if (spec.kind == ScenarioKind::yielding) continue;
        const auto r = rollout(net, spec, {}, f.ctx, rng, {false, 0.2});
        if (!r.go_step) continue;
        const double go_time = *r.go_step * f.world.dt;
        const double pass = *vehicle_pass_time(spec, f.world);
        if (r.outcome == TerminalKind::arrival) {
          ++arrivals;
          INFO(spec.id, " go ", go_time, " pass ", pass);
          CHECK((go_time < spec.tau0 || go_time >= pass - lead - 2.0 * f.world.dt - 1e-9));
        } else {
          ++collisions;
          CHECK(go_time < pass);
        }
      }
    }
    CHECK(arrivals > 0);
    CHECK(collisions > 0);
  }
}
