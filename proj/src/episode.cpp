#include "pedcross/episode.hpp"

#include <stdexcept>

namespace pedcross {

SimContext SimContext::make(const WorldConfig& world, const PerceptionConfig& perception,
                            const std::vector<ScenarioSpec>& catalog) {
  SimContext ctx;
  ctx.world = world;
  ctx.perception = perception;
  ctx.prior = belief_prior(catalog);
  ctx.scale = make_observation_scale(world, ctx.prior);
  return ctx;
}

CrossingEpisode::CrossingEpisode(const ScenarioSpec& spec, Variant variant, ModelParams params, const SimContext& ctx)
    : spec_(&spec), ctx_(&ctx), variant_(variant), params_(params), state_(initial_state(spec)) {
  if (!uses_belief(variant_)) params_.sigma_v = 0.0;
  if (!uses_looming(variant_)) params_.looming_weight = 0.0;
  belief_ = belief_init(spec, ctx.prior);
}

Observation CrossingEpisode::observe() const {
  std::optional<Belief> b;
  std::optional<double> sigma, c;
  if (uses_belief(variant_)) {
    b = belief_;
    sigma = params_.sigma_v;
  }
  if (uses_looming(variant_)) c = params_.looming_weight;
  return encode_observation(variant_, state_, ctx_->world, ctx_->scale, b, sigma, c);
}

std::optional<double> CrossingEpisode::cit() const {
  if (!go_step_) return std::nullopt;
  return *go_step_ * ctx_->world.dt + motor_delay_;
}

DecisionResult CrossingEpisode::act(Action action, Rng& rng) {
  if (finished()) throw std::logic_error("act() on a finished episode");
  const WorldConfig& world = ctx_->world;
  DecisionResult result;

  if (action == Action::not_go) {
    const StepOutcome out = step(state_, Action::not_go, *spec_, world, rng);
    state_ = out.next_state;
    if (out.terminal) {
      outcome_ = out.terminal_kind;
      result.terminal = true;
      result.outcome = outcome_;
      result.reward = terminal_reward(outcome_, state_.t, params_.looming_weight, 0.0, world);
      return result;
    }
    if (uses_belief(variant_)) {
      const NoiseParams noise{params_.sigma_v};
      const double z = sample_measurement(state_.x_veh, state_.y_ped, world, noise, rng);
      const double r = measurement_variance(belief_predict(belief_, world.dt, ctx_->perception), state_.y_ped,
                                            world, noise);
      belief_ = belief_step(belief_, z, r, world.dt, ctx_->perception);
    }
    return result;
  }

  go_step_ = state_.t;
  StepOutcome out = step(state_, Action::go, *spec_, world, rng);
  motor_delay_ = out.motor_delay;
  const double inv_tau = uses_belief(variant_) ? inverse_tau(belief_.x_hat, belief_.v_hat) : out.inverse_tau_at_go;
  while (!out.terminal) {
    out = step(out.next_state, Action::not_go, *spec_, world, rng);
  }
  state_ = out.next_state;
  outcome_ = out.terminal_kind;
  result.terminal = true;
  result.outcome = outcome_;
  result.reward = terminal_reward(outcome_, state_.t, params_.looming_weight, inv_tau, world);
  return result;
}

}  // namespace pedcross
