#include "pedcross/trainer.hpp"

#include <stdexcept>

namespace pedcross {

void check_grid_for_variant(Variant variant, const ParamGrid& grid) {
  grid.validate();
  if (uses_belief(variant) && grid.sigma_v_values.empty()) {
    throw std::invalid_argument("conditioned variant requires parameter grid (sigma_v values missing for " +
                                to_string(variant) + ")");
  }
  if (uses_looming(variant) && grid.c_values.empty()) {
    throw std::invalid_argument("conditioned variant requires parameter grid (c values missing for " +
                                to_string(variant) + ")");
  }
}

namespace {

double pick(const std::vector<double>& values, Rng& rng) {
  std::uniform_int_distribution<std::size_t> u(0, values.size() - 1);
  return values[u(rng)];
}

}  // namespace

TrainResult train_variant(Variant variant, const std::vector<ScenarioSpec>& catalog, const SimContext& ctx,
                          const TrainConfig& cfg, const ParamGrid& grid, Rng& rng, const TrainProgress& progress) {
  cfg.validate();
  check_grid_for_variant(variant, grid);
  if (catalog.empty()) throw std::invalid_argument("train_variant: empty catalog");

  TrainResult result;
  result.net = QNet::random(variant, observation_size(variant), cfg.hidden1, cfg.hidden2, rng);
  QNet target = result.net;
  Optimizer optimizer(cfg.optimizer_config(), result.net.parameter_count());
  ReplayBuffer replay(cfg.replay_capacity);
  std::uniform_int_distribution<std::size_t> pick_scenario(0, catalog.size() - 1);
  std::vector<const Transition*> batch(cfg.batch_size);

  double block_sum = 0.0;
  int block_count = 0;
  for (int episode = 0; episode < cfg.episodes; ++episode) {
    const ScenarioSpec& spec = catalog[pick_scenario(rng)];
    ModelParams params;
    if (uses_belief(variant)) params.sigma_v = pick(grid.sigma_v_values, rng);
    if (uses_looming(variant)) params.looming_weight = pick(grid.c_values, rng);

    CrossingEpisode ep(spec, variant, params, ctx);
    Observation obs = ep.observe();
    double episode_reward = 0.0;
    while (!ep.finished()) {
      const Action action = select_action(result.net, obs, epsilon(result.learn_steps, cfg), rng);
      const DecisionResult dr = ep.act(action, rng);
      Observation next = dr.terminal ? Observation(obs.size(), 0.0) : ep.observe();
      replay.push({obs, action, dr.reward, next, dr.terminal});
      obs = std::move(next);
      episode_reward += dr.reward;
      ++result.env_steps;

      if (replay.size() >= cfg.batch_size) {
        const auto idx = replay.sample_indices(cfg.batch_size, rng);
        for (std::size_t i = 0; i < idx.size(); ++i) batch[i] = &replay[idx[i]];
        dqn_update(result.net, target, batch, cfg, optimizer);
        ++result.learn_steps;
        if (result.learn_steps % cfg.target_sync_steps == 0) target = result.net;
      }
    }

    block_sum += episode_reward;
    ++block_count;
    if (block_count == cfg.log_every || episode + 1 == cfg.episodes) {
      RewardLogEntry entry{episode + 1, block_sum / block_count};
      result.reward_log.push_back(entry);
      if (progress) progress(entry);
      block_sum = 0.0;
      block_count = 0;
    }
  }
  return result;
}

}  // namespace pedcross
