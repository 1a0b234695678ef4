#pragma once

#include <functional>
#include <vector>

#include "pedcross/dqn.hpp"
#include "pedcross/episode.hpp"
#include "pedcross/grid.hpp"

namespace pedcross {

struct RewardLogEntry {
  int episode = 0;  // index one past the last episode of the block
  double mean_reward = 0.0;
};

struct TrainResult {
  QNet net;
  std::vector<RewardLogEntry> reward_log;
  long long learn_steps = 0;
  long long env_steps = 0;
};

using TrainProgress = std::function<void(const RewardLogEntry&)>;

// Throws std::invalid_argument when a conditioned variant gets no values for
// the parameter(s) it is conditioned on.
void check_grid_for_variant(Variant variant, const ParamGrid& grid);

// Dueling Double-DQN on scenarios drawn uniformly from the catalog.
TrainResult train_variant(Variant variant, const std::vector<ScenarioSpec>& catalog, const SimContext& ctx,
                          const TrainConfig& cfg, const ParamGrid& grid, Rng& rng,
                          const TrainProgress& progress = {});

}  // namespace pedcross
