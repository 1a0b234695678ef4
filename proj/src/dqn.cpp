#include "pedcross/dqn.hpp"

#include <algorithm>
#include <stdexcept>

namespace pedcross {

void TrainConfig::validate() const {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("train config: gamma must be in (0, 1)");
  if (!(eps_min <= eps_start)) throw std::invalid_argument("train config: eps_min must not exceed eps_start");
  if (eps_min < 0.0 || eps_start > 1.0) throw std::invalid_argument("train config: epsilon bounds outside [0, 1]");
  if (!(learning_rate > 0.0)) throw std::invalid_argument("train config: learning_rate must be positive");
  if (episodes < 0) throw std::invalid_argument("train config: episodes must be >= 0");
  if (batch_size == 0 || replay_capacity < batch_size) {
    throw std::invalid_argument("train config: need 0 < batch_size <= replay_capacity");
  }
  if (target_sync_steps <= 0) throw std::invalid_argument("train config: target_sync_steps must be positive");
  if (hidden1 == 0 || hidden2 == 0) throw std::invalid_argument("train config: hidden sizes must be positive");
  if (log_every <= 0) throw std::invalid_argument("train config: log_every must be positive");
}

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t n, Rng& rng) const {
  if (items_.empty()) throw std::logic_error("cannot sample from an empty replay buffer");
  std::uniform_int_distribution<std::size_t> pick(0, items_.size() - 1);
  std::vector<std::size_t> out(n);
  for (auto& i : out) i = pick(rng);
  return out;
}

double epsilon(long long learn_step, const TrainConfig& cfg) {
  if (cfg.eps_decay_per_step <= 0.0) return std::max(cfg.eps_min, cfg.eps_start);
  // Same line as eps_start - decay * step, written as decay * (steps left)
  // so values near eps_min don't lose digits to cancellation.
  const double steps_to_zero = cfg.eps_start / cfg.eps_decay_per_step;
  const double raw = cfg.eps_decay_per_step * (steps_to_zero - static_cast<double>(std::max(0LL, learn_step)));
  return std::max(cfg.eps_min, raw);
}

Action select_action(const QNet& net, std::span<const double> obs, double eps, Rng& rng) {
  if (eps > 0.0) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    if (u(rng) < eps) {
      std::uniform_int_distribution<int> coin(0, 1);
      return coin(rng) == 1 ? Action::go : Action::not_go;
    }
  }
  return net.forward(obs).argmax();
}

double double_dqn_target(const QNet& online, const QNet& target, const Transition& t, double gamma) {
  if (t.terminal) return t.reward;
  const Action best = online.forward(t.next_obs).argmax();
  return t.reward + gamma * target.forward(t.next_obs)[best];
}

double dqn_update(QNet& net, const QNet& target_net, std::span<const Transition* const> batch, const TrainConfig& cfg,
                  Optimizer& optimizer) {
  if (batch.empty()) throw std::invalid_argument("dqn_update: empty batch");
  std::vector<TdSample> samples;
  samples.reserve(batch.size());
  for (const Transition* t : batch) {
    samples.push_back({t->obs, t->action, double_dqn_target(net, target_net, *t, cfg.gamma)});
  }
  std::vector<double> grad;
  const double loss = td_loss(net, samples, &grad);
  optimizer.apply(net, grad);
  return loss;
}

}  // namespace pedcross
