#pragma once

#include <optional>
#include <vector>

#include "pedcross/env.hpp"
#include "pedcross/observation.hpp"
#include "pedcross/perception.hpp"

namespace pedcross {

// Non-policy parameters of one simulated pedestrian.
struct ModelParams {
  double sigma_v = 0.0;
  double looming_weight = 0.0;
};

// Immutable configuration shared by every episode of a run.
struct SimContext {
  WorldConfig world;
  PerceptionConfig perception;
  BeliefPrior prior;
  ObservationScale scale;

  static SimContext make(const WorldConfig& world, const PerceptionConfig& perception,
                         const std::vector<ScenarioSpec>& catalog);
};

struct DecisionResult {
  double reward = 0.0;
  bool terminal = false;
  TerminalKind outcome = TerminalKind::none;
};

// One episode seen from the agent: a decision is taken every dt while
// waiting. Go commits; the rest of the crossing is simulated inside act() and
// its terminal reward is returned for that single decision.
class CrossingEpisode {
 public:
  CrossingEpisode(const ScenarioSpec& spec, Variant variant, ModelParams params, const SimContext& ctx);

  Observation observe() const;
  DecisionResult act(Action action, Rng& rng);

  bool finished() const { return outcome_ != TerminalKind::none; }
  TerminalKind outcome() const { return outcome_; }
  const SimState& state() const { return state_; }
  const Belief& belief() const { return belief_; }
  std::optional<int> go_step() const { return go_step_; }
  double motor_delay() const { return motor_delay_; }
  // Go decision time plus motor delay, present once Go was chosen.
  std::optional<double> cit() const;

 private:
  const ScenarioSpec* spec_;
  const SimContext* ctx_;
  Variant variant_;
  ModelParams params_;
  SimState state_;
  Belief belief_;
  std::optional<int> go_step_;
  double motor_delay_ = 0.0;
  TerminalKind outcome_ = TerminalKind::none;
};

}  // namespace pedcross
