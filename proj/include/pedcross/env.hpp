#pragma once

#include <random>
#include <string>

#include "pedcross/scenario.hpp"

namespace pedcross {

using Rng = std::mt19937_64;

enum class Action { not_go = 0, go = 1 };

enum class PedPhase { waiting, delaying, walking, done };

enum class TerminalKind { none, arrival, collision, timeout };

std::string to_string(TerminalKind kind);
TerminalKind parse_terminal_kind(const std::string& text);

struct SimState {
  int t = 0;               // step index
  double x_veh = 0.0;      // front bumper, m; negative once past the line
  double v_veh = 0.0;      // m/s
  double y_ped = 0.0;      // progress across the road, m
  PedPhase ped_phase = PedPhase::waiting;
  double delay_remaining = 0.0;  // s
};

struct StepOutcome {
  SimState next_state;
  bool terminal = false;
  TerminalKind terminal_kind = TerminalKind::none;
  // Set on the step that executes Go; zero otherwise.
  double inverse_tau_at_go = 0.0;
  double motor_delay = 0.0;
};

SimState initial_state(const ScenarioSpec& spec);

// Pedestrian disc at (0, y_ped) against the vehicle footprint
// [x_veh, x_veh + length] x [lane_near_edge, lane_near_edge + width].
bool check_collision(const SimState& state, const WorldConfig& cfg);

// Advances one dt. Go is honoured only while waiting.
StepOutcome step(const SimState& state, Action action, const ScenarioSpec& spec, const WorldConfig& cfg, Rng& rng);

// Terminal reward; looming_weight multiplies inverse tau on arrival.
double terminal_reward(TerminalKind kind, int t_steps, double looming_weight, double inverse_tau,
                       const WorldConfig& cfg);

double sample_motor_delay(const WorldConfig& cfg, Rng& rng);

}  // namespace pedcross
