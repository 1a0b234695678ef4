#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"
#include "pedcross/dqn.hpp"
#include "pedcross/evaluator.hpp"
#include "pedcross/trainer.hpp"

using namespace pedcross;

namespace {

QNet with_go_bias(Variant v, double not_go, double go) {
  QNet net(v, observation_size(v), 4, 4);
  auto b = net.biases(LayerId::advantage);
  b[0] = not_go;
  b[1] = go;
  return net;
}

std::vector<double> random_obs(std::size_t n, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

}  // namespace

TEST_SUITE("policy-learner") {
  TEST_CASE("observation sizes") {
    CHECK(observation_size(Variant::BM) == 6);
    CHECK(observation_size(Variant::LM) == 7);
    CHECK(observation_size(Variant::VM) == 9);
    CHECK(observation_size(Variant::VLM) == 10);
    CHECK(parse_variant("VLM") == Variant::VLM);
    CHECK_THROWS(parse_variant("XL"));
  }

  TEST_CASE("observation encoding") {
    WorldConfig cfg;
    const auto cat = build_catalog(cfg);
    const auto prior = belief_prior(cat);
    const auto scale = make_observation_scale(cfg, prior);
    CHECK(scale.time_steps == 200.0);
    CHECK(scale.pos_variance == doctest::Approx(prior.pos_std * prior.pos_std));

    SimState s;
    s.t = 50;
    s.x_veh = 31.81;
    s.v_veh = 13.89;
    s.y_ped = 1.2;
    const Belief b{30.0, 13.0, 40.0, 1.0, 2.0};

    const auto bm = encode_observation(Variant::BM, s, cfg, scale, std::nullopt, std::nullopt, std::nullopt);
    REQUIRE(bm.size() == 6);
    CHECK(bm[0] == 0.0);
    CHECK(bm[1] == doctest::Approx(1.2 / 100.0));
    CHECK(bm[2] == doctest::Approx(31.81 / 100.0));
    CHECK(bm[3] == doctest::Approx(cfg.lane_center() / 100.0));
    CHECK(bm[4] == doctest::Approx(13.89 / 15.0));
    CHECK(bm[5] == doctest::Approx(0.25));

    const auto lm = encode_observation(Variant::LM, s, cfg, scale, std::nullopt, std::nullopt, 40.0);
    REQUIRE(lm.size() == 7);
    CHECK(lm[5] == doctest::Approx(0.4));

    const auto vlm = encode_observation(Variant::VLM, s, cfg, scale, b, 0.3, 40.0);
    REQUIRE(vlm.size() == 10);
    CHECK(vlm[2] == doctest::Approx(0.30));
    CHECK(vlm[4] == doctest::Approx(13.0 / 15.0));
    CHECK(vlm[5] == doctest::Approx(40.0 / scale.pos_variance));
    CHECK(vlm[6] == doctest::Approx(2.0 / scale.vel_variance));
    CHECK(vlm[7] == doctest::Approx(0.3));
    CHECK(vlm[8] == doctest::Approx(0.4));
    CHECK(vlm[9] == doctest::Approx(0.25));

    CHECK_THROWS_WITH(encode_observation(Variant::VM, s, cfg, scale, std::nullopt, 0.1, std::nullopt),
                      doctest::Contains("belief"));
    CHECK_THROWS_WITH(encode_observation(Variant::VM, s, cfg, scale, b, std::nullopt, std::nullopt),
                      doctest::Contains("sigma_v"));
    CHECK_THROWS_WITH(encode_observation(Variant::LM, s, cfg, scale, std::nullopt, std::nullopt, std::nullopt),
                      doctest::Contains("looming"));
  }

  TEST_CASE("observation round trip") {
    const auto scale = make_observation_scale(WorldConfig{}, belief_prior(build_catalog()));
    ObservationFeatures f;
    f.y_p = 2.5;
    f.x_veh = 47.7;
    f.y_veh = 1.4625;
    f.v = 6.94;
    f.p_pos = 120.0;
    f.p_vel = 3.3;
    f.sigma_v = 0.7;
    f.looming_weight = 60.0;
    f.t = 123.0;
    const auto obs = encode_features(Variant::VLM, f, scale);
    const auto back = decode_observation(Variant::VLM, obs, scale);
    CHECK(std::abs(back.y_p - f.y_p) < 1e-12);
    CHECK(std::abs(back.x_veh - f.x_veh) < 1e-12);
    CHECK(std::abs(back.v - f.v) < 1e-12);
    CHECK(std::abs(back.p_pos - f.p_pos) < 1e-12);
    CHECK(std::abs(back.p_vel - f.p_vel) < 1e-12);
    CHECK(std::abs(back.sigma_v - f.sigma_v) < 1e-12);
    CHECK(std::abs(back.looming_weight - f.looming_weight) < 1e-12);
    CHECK(std::abs(back.t - f.t) < 1e-12);
    CHECK_THROWS(decode_observation(Variant::BM, obs, scale));
  }

  TEST_CASE("forward pass") {
    const QNet zero(Variant::BM, 6, 8, 8);
    const std::vector<double> x(6, 0.3);
    const auto q = zero.forward(x);
    CHECK(q.not_go == 0.0);
    CHECK(q.go == 0.0);
    CHECK(q.argmax() == Action::not_go);
    CHECK_THROWS(zero.forward(std::vector<double>(7, 0.0)));

    Rng rng(21);
    QNet net = QNet::random(Variant::VLM, 10, 16, 12, rng);
    const auto obs = random_obs(10, rng);
    const auto before = net.forward(obs);
    for (auto& b : net.biases(LayerId::advantage)) b += 3.7;
    const auto after = net.forward(obs);
    CHECK(after.not_go == doctest::Approx(before.not_go).epsilon(1e-12));
    CHECK(after.go == doctest::Approx(before.go).epsilon(1e-12));
  }

  TEST_CASE("gradient matches finite differences") {
    Rng rng(22);
    for (int trial = 0; trial < 5; ++trial) {
      QNet net = QNet::random(Variant::VLM, 10, 8, 8, rng);
      std::vector<std::vector<double>> xs;
      std::vector<TdSample> batch;
      for (int i = 0; i < 6; ++i) xs.push_back(random_obs(10, rng));
      for (int i = 0; i < 6; ++i) batch.push_back({xs[i], i % 2 ? Action::go : Action::not_go, 0.5 * i - 1.0});
      std::vector<double> grad;
      td_loss(net, batch, &grad);
      std::vector<double> p(net.params().begin(), net.params().end());
      const auto fd = oracle::finite_difference(p, [&] {
        std::copy(p.begin(), p.end(), net.params().begin());
        return td_loss(net, batch, nullptr);
      });
      double worst = 0.0;
      for (std::size_t i = 0; i < grad.size(); ++i) worst = std::max(worst, oracle::relative_error(grad[i], fd[i]));
      CHECK(worst < 1e-4);
    }
  }

  TEST_CASE("epsilon schedule") {
    TrainConfig cfg;
    CHECK(epsilon(0, cfg) == 1.0);
    CHECK(epsilon(10000, cfg) == 0.5);
    CHECK(epsilon(19980, cfg) == 0.001);
    CHECK(epsilon(50000, cfg) == 0.001);
    double prev = 2.0;
    for (long long s = 0; s < 30000; s += 37) {
      const double e = epsilon(s, cfg);
      CHECK(e <= prev);
      CHECK(e >= cfg.eps_min);
      prev = e;
    }
  }

  TEST_CASE("action selection") {
    Rng rng(23);
    const std::vector<double> x(6, 0.0);
    CHECK(select_action(with_go_bias(Variant::BM, 1.0, 2.0), x, 0.0, rng) == Action::go);
    CHECK(select_action(with_go_bias(Variant::BM, 1.0, 1.0), x, 0.0, rng) == Action::not_go);
    CHECK(select_action(with_go_bias(Variant::BM, 3.0, 1.0), x, 0.0, rng) == Action::not_go);
    const auto net = with_go_bias(Variant::BM, 5.0, 1.0);
    int go = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) go += select_action(net, x, 1.0, rng) == Action::go;
    CHECK(std::abs(go / static_cast<double>(n) - 0.5) < 0.01);
  }

  TEST_CASE("double DQN target") {
    TrainConfig cfg;
    Transition t;
    t.obs.assign(6, 0.1);
    t.next_obs.assign(6, 0.2);
    t.reward = 20.0;
    t.terminal = true;
    Rng rng(24);
    const QNet a = QNet::random(Variant::BM, 6, 8, 8, rng);
    const QNet b = QNet::random(Variant::BM, 6, 8, 8, rng);
    CHECK(double_dqn_target(a, b, t, 0.99) == 20.0);

    // online prefers Go, target prefers NotGo: target must evaluate Go
    const QNet online = with_go_bias(Variant::BM, 0.0, 1.0);
    const QNet target = with_go_bias(Variant::BM, 10.0, 2.0);
    t.terminal = false;
    t.reward = 1.0;
    const auto qt = target.forward(t.next_obs);
    CHECK(qt.argmax() == Action::not_go);
    CHECK(double_dqn_target(online, target, t, 0.9) == doctest::Approx(1.0 + 0.9 * qt.go));
  }

  TEST_CASE("update converges to the fixed-target value") {
    Rng rng(25);
    QNet net = QNet::random(Variant::BM, 6, 16, 16, rng);
    const QNet target = QNet::random(Variant::BM, 6, 16, 16, rng);
    TrainConfig cfg;
    cfg.learning_rate = 1e-2;
    cfg.optimizer = OptimizerKind::adam;
    Optimizer opt(cfg.optimizer_config(), net.parameter_count());
    Transition t;
    t.obs = random_obs(6, rng);
    t.next_obs = random_obs(6, rng);
    t.action = Action::go;
    t.reward = 3.0;
    const Transition* batch[] = {&t};
    for (int i = 0; i < 3000; ++i) dqn_update(net, target, batch, cfg, opt);
    const double y = double_dqn_target(net, target, t, cfg.gamma);
    CHECK(std::abs(net.forward(t.obs).go - y) < 0.01);
  }

  TEST_CASE("loss falls on a fixed batch") {
    Rng rng(26);
    QNet net = QNet::random(Variant::LM, 7, 16, 16, rng);
    const QNet target = net;
    TrainConfig cfg;
    Optimizer opt(cfg.optimizer_config(), net.parameter_count());
    std::vector<Transition> ts(16);
    std::uniform_real_distribution<double> r(-20.0, 20.0);
    for (std::size_t i = 0; i < ts.size(); ++i) {
      ts[i].obs = random_obs(7, rng);
      ts[i].next_obs = random_obs(7, rng);
      ts[i].action = i % 2 ? Action::go : Action::not_go;
      ts[i].reward = r(rng);
      ts[i].terminal = i % 3 == 0;
    }
    std::vector<const Transition*> batch;
    for (const auto& t : ts) batch.push_back(&t);
    const double first = dqn_update(net, target, batch, cfg, opt);
    double last = first;
    for (int i = 0; i < 100; ++i) last = dqn_update(net, target, batch, cfg, opt);
    CHECK(last < first);
  }

  TEST_CASE("replay buffer capacity and uniform sampling") {
    ReplayBuffer buf(50);
    for (int i = 0; i < 120; ++i) {
      Transition t;
      t.reward = i;
      buf.push(t);
      CHECK(buf.size() <= 50);
    }
    CHECK(buf.size() == 50);
    double lo = 1e9;
    for (std::size_t i = 0; i < buf.size(); ++i) lo = std::min(lo, buf[i].reward);
    CHECK(lo == 70.0);

    Rng rng(27);
    std::vector<int> counts(50, 0);
    const int n = 100000;
    for (auto i : buf.sample_indices(n, rng)) ++counts[i];
    const double expected = n / 50.0;
    double chi2 = 0.0;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    // 49 degrees of freedom; upper 0.001 quantile is about 85.35
    CHECK(chi2 < 85.35);
  }

  TEST_CASE("train config validation") {
    TrainConfig cfg;
    CHECK_NOTHROW(cfg.validate());
    cfg.gamma = 1.0;
    CHECK_THROWS(cfg.validate());
    cfg = TrainConfig{};
    cfg.eps_min = 2.0;
    CHECK_THROWS(cfg.validate());
  }

  TEST_CASE("conditioned variants need a grid") {
    CHECK_NOTHROW(check_grid_for_variant(Variant::BM, ParamGrid{}));
    CHECK_THROWS_WITH(check_grid_for_variant(Variant::VLM, ParamGrid{}),
                      doctest::Contains("conditioned variant requires parameter grid"));
    CHECK_THROWS(check_grid_for_variant(Variant::LM, ParamGrid{{0.1}, {}}));
    CHECK_NOTHROW(check_grid_for_variant(Variant::VM, ParamGrid{{0.1}, {}}));
  }

  TEST_CASE("training log and determinism") {
    WorldConfig world;
    const auto cat = build_catalog(world);
    const auto ctx = SimContext::make(world, PerceptionConfig{}, cat);
    TrainConfig cfg;
    cfg.episodes = 1000;
    cfg.hidden1 = 8;
    cfg.hidden2 = 8;
    cfg.seed = 5;
    const ParamGrid grid{{0.0, 0.5}, {0.0, 50.0}};
    Rng r1(cfg.seed), r2(cfg.seed);
    const auto a = train_variant(Variant::VLM, cat, ctx, cfg, grid, r1);
    const auto b = train_variant(Variant::VLM, cat, ctx, cfg, grid, r2);
    REQUIRE(a.reward_log.size() == 2);
    CHECK(a.reward_log[0].episode == 500);
    CHECK(a.reward_log[1].episode == 1000);
    CHECK(a.net == b.net);
    for (std::size_t i = 0; i < a.reward_log.size(); ++i) {
      CHECK(a.reward_log[i].mean_reward == b.reward_log[i].mean_reward);
      CHECK(a.reward_log[i].mean_reward >= -20.0);
      CHECK(a.reward_log[i].mean_reward <= 20.0);
    }
    CHECK(a.learn_steps > 0);
    CHECK(a.learn_steps <= a.env_steps);
  }

  TEST_CASE("desk BM policy earns close to the optimal return") {
    WorldConfig world;
    const auto cat = build_catalog(world);
    const auto ctx = SimContext::make(world, PerceptionConfig{}, cat);
    TrainConfig cfg;
    cfg.episodes = 5000;
    cfg.hidden1 = 64;
    cfg.hidden2 = 64;
    cfg.optimizer = OptimizerKind::adam;
    cfg.learning_rate = 1e-3;
    cfg.seed = 1;
    Rng rng(cfg.seed);
    const auto result = train_variant(Variant::BM, cat, ctx, cfg, ParamGrid{}, rng);
    REQUIRE(result.reward_log.size() == 10);

    // greedy return averaged over the catalog, scenarios weighted equally
    Rng eval(99);
    double total = 0.0;
    int n = 0;
    for (const auto& spec : cat) {
      for (int i = 0; i < 20; ++i) {
        CrossingEpisode ep(spec, Variant::BM, {}, ctx);
        double ret = 0.0;
        while (!ep.finished()) ret += ep.act(result.net.forward(ep.observe()).argmax(), eval).reward;
        total += ret;
        ++n;
      }
    }
    CHECK(total / n > 15.0);
  }
}
