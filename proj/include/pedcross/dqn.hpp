#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pedcross/qnet.hpp"

namespace pedcross {

struct Transition {
  Observation obs;
  Action action = Action::not_go;
  double reward = 0.0;
  Observation next_obs;
  bool terminal = false;
};

struct TrainConfig {
  double learning_rate = 1e-4;
  double gamma = 0.99;
  double eps_start = 1.0;
  double eps_decay_per_step = 5e-5;
  double eps_min = 0.001;
  int episodes = 25000;
  std::size_t replay_capacity = 100000;
  std::size_t batch_size = 64;
  long long target_sync_steps = 1000;
  std::uint64_t seed = 1;
  std::size_t hidden1 = 512;
  std::size_t hidden2 = 256;
  OptimizerKind optimizer = OptimizerKind::sgd;
  int log_every = 500;

  void validate() const;
  OptimizerConfig optimizer_config() const { return {optimizer, learning_rate}; }
};

// Fixed-capacity ring buffer with uniform sampling (with replacement).
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& operator[](std::size_t i) const { return items_[i]; }

  // Indices into the buffer, drawn uniformly.
  std::vector<std::size_t> sample_indices(std::size_t n, Rng& rng) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

// Linear decay from eps_start, floored at eps_min.
double epsilon(long long learn_step, const TrainConfig& cfg);

// Uniform random action with probability eps, otherwise greedy (ties to NotGo).
Action select_action(const QNet& net, std::span<const double> obs, double eps, Rng& rng);

// r for terminal transitions, else r + gamma * Q_target(s', argmax_a Q_online(s', a)).
double double_dqn_target(const QNet& online, const QNet& target, const Transition& t, double gamma);

// One optimizer step on the batch; returns the loss before the step.
double dqn_update(QNet& net, const QNet& target_net, std::span<const Transition* const> batch, const TrainConfig& cfg,
                  Optimizer& optimizer);

}  // namespace pedcross
